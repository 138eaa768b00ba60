#pragma once

// Ensemble specification files (YAML). Schema, version 1:
//
//   schema_version: 1            required
//   family: <name>               required, one of the families below
//   scale: <M>                   optional Bernstein scale (default: canonical)
//
//   degenerate                   grid: [[c_11, ..., c_1n], ...]
//   checkerboard_exponential     n: <even int>, rate: <real> (default 1)
//   k_sequence                   palette: [<law>, ...], assignment: [[int, ...], ...]
//   rademacher                   means: [[...]], amplitudes: [[...]]
//   row_constant                 rows: [<law>, ...]   or   row_law: <law>, n: <int>
//   grid                         cells: [[<law>, ...], ...]
//
// A <law> is a map:
//   {law: point, c: <real>}
//   {law: discrete, atoms: [[value, prob], ...]}
//   {law: exponential, rate: <real>, sign: 1 | -1}
//   {law: gamma, shape: <real>, rate: <real>, sign: 1 | -1}
// sign defaults to 1. Unknown keys are rejected everywhere. Numbers are
// parsed with from_chars, so every decimal round-trips exactly.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "combsum/ensemble.hpp"

namespace combsum {

inline constexpr int kSpecSchemaVersion = 1;

/// Malformed or schema-violating specification.
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnsembleSpec {
  std::string family;
  std::optional<std::size_t> n;
  std::optional<double> scale;

  double rate = 1.0;                                // checkerboard_exponential
  std::vector<EntryDistribution> palette;           // k_sequence
  SquareMatrix<int> assignment;                     // k_sequence
  SquareMatrix<double> grid;                        // degenerate
  SquareMatrix<double> means, amplitudes;           // rademacher
  std::vector<EntryDistribution> rows;              // row_constant
  std::optional<EntryDistribution> row_law;         // row_constant, size-free form
  SquareMatrix<EntryDistribution> cells;            // grid

  /// True when the family can be built at any n (checkerboard, row_law).
  bool resizable() const noexcept;

  /// Ensemble at the file's own size.
  MatrixEnsemble build(Centering centering = Centering::require) const;

  /// Ensemble at size n. Families with an explicit grid accept only their
  /// own size.
  MatrixEnsemble build(std::size_t n, Centering centering = Centering::require) const;

  bool operator==(const EnsembleSpec&) const = default;
};

EnsembleSpec parse_spec(std::string_view yaml_text);
EnsembleSpec load_spec(const std::filesystem::path& path);

/// YAML text of the spec in its own family, numbers with 17 significant digits.
std::string serialize_spec(const EnsembleSpec& spec);

/// YAML text describing any ensemble as a `grid` family.
std::string serialize_ensemble(const MatrixEnsemble& e);

}  // namespace combsum
