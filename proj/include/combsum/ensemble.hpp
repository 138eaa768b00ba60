#pragma once

// Matrix ensembles ‖X_ij‖ of independent entries, the builders for the
// standard families, and the structural checks (row/column centering and
// the Bernstein moment condition).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "combsum/distribution.hpp"
#include "combsum/matrix.hpp"
#include "combsum/rng.hpp"

namespace combsum {

/// Absolute tolerance on row and column sums of entry means.
inline constexpr double kCenteringTolerance = 1e-10;

/// n×n grid of entry laws together with the Bernstein scale M.
///
/// The constructor only checks shape (n >= 2) and that M is positive and
/// finite; centering is verified by the builders below and reported by
/// check_centering, so that uncentered grids can still be inspected.
class MatrixEnsemble {
 public:
  MatrixEnsemble(SquareMatrix<EntryDistribution> cells, double scale);

  std::size_t size() const noexcept { return cells_.size(); }
  const EntryDistribution& operator()(std::size_t i, std::size_t j) const { return cells_(i, j); }
  const SquareMatrix<EntryDistribution>& cells() const noexcept { return cells_; }

  /// Bernstein scale M_n.
  double scale() const noexcept { return scale_; }

  bool bounded() const noexcept;

  /// Max over cells of the per-family canonical scale, or 1 when every
  /// cell is the point mass at zero.
  double canonical_scale() const noexcept;

  /// Every entry multiplied by lambda > 0; M scales along.
  MatrixEnsemble rescaled(double lambda) const;

  SquareMatrix<double> mean_matrix() const;

  bool operator==(const MatrixEnsemble&) const = default;

 private:
  SquareMatrix<EntryDistribution> cells_;
  double scale_;
};

struct CenteringReport {
  bool pass = false;
  double worst_residual = 0.0;
  /// "row i" or "column j" (0-based) of the worst residual.
  std::string worst_location;
  std::vector<double> row_residuals;
  std::vector<double> column_residuals;
};

CenteringReport check_centering(const MatrixEnsemble& e);

/// Throws CenteringError naming the worst row or column when the ensemble
/// is not centered.
void require_centered(const MatrixEnsemble& e);

struct BernsteinReport {
  bool pass = false;
  double D = 0.0;
  int K = 0;
  /// max |E X^k| / (k! M^{k-s} E|X|^s) over cells, s in {1,2,3}, k in [s, K].
  double max_ratio = 0.0;
  /// Smallest constant that passes (equals max_ratio).
  double minimal_D = 0.0;
  std::size_t worst_row = 0, worst_col = 0;
  int worst_s = 0, worst_k = 0;
  /// Cells with E|X|^s = 0 (point mass at zero); their inequality is trivial.
  std::size_t skipped_cells = 0;
};

/// Bernstein condition |E X^k| <= D k! M^{k-s} E|X|^s for every cell, with
/// the ratios evaluated in log space so K may go up to 170.
BernsteinReport check_bernstein(const MatrixEnsemble& e, double D, int K);

// ---------------------------------------------------------------------------
// Builders. By default every builder enforces centering (CenteringError
// otherwise); Centering::skip builds the grid as given so it can be
// inspected. M is the canonical scale unless an explicit scale is passed.

enum class Centering { require, skip };

/// Degenerate ensemble P(X_ij = c_ij) = 1.
MatrixEnsemble make_degenerate(const SquareMatrix<double>& grid,
                               std::optional<double> scale = std::nullopt,
                               Centering centering = Centering::require);

/// n even; cell (i, j) is +Exp(rate) when i + j is even and -Exp(rate) otherwise.
MatrixEnsemble make_checkerboard_exponential(std::size_t n, double rate);

/// Entry (i, j) follows palette[assignment(i, j)].
MatrixEnsemble make_k_sequence(const std::vector<EntryDistribution>& palette,
                               const SquareMatrix<int>& assignment,
                               std::optional<double> scale = std::nullopt,
                               Centering centering = Centering::require);

/// Two-point cells {mean - amplitude, mean + amplitude} with probability 1/2 each
/// (a point mass where the amplitude is zero).
MatrixEnsemble make_rademacher(const SquareMatrix<double>& means,
                               const SquareMatrix<double>& amplitudes,
                               std::optional<double> scale = std::nullopt,
                               Centering centering = Centering::require);

/// Row i holds row_laws[i] in every column. Centering forces each law to have
/// mean zero, and S_n is then a sum of independent draws, one per row.
MatrixEnsemble make_row_constant(const std::vector<EntryDistribution>& row_laws,
                                 std::optional<double> scale = std::nullopt,
                                 Centering centering = Centering::require);

/// Arbitrary explicit grid of laws.
MatrixEnsemble make_grid(SquareMatrix<EntryDistribution> cells,
                         std::optional<double> scale = std::nullopt,
                         Centering centering = Centering::require);

// ---------------------------------------------------------------------------
// Random centered ensembles for fuzzing and experiments.

/// Double-centers a matrix: subtracts row and column means and adds back the
/// grand mean, so every row and column sums to zero.
SquareMatrix<double> double_center(SquareMatrix<double> grid);

/// Degenerate grid with i.i.d. uniform(-1, 1) values, then double-centered.
MatrixEnsemble random_degenerate(std::size_t n, Philox4x64& rng);

/// Cells are a centered mean grid plus independent zero-mean noise with two
/// or three atoms.
MatrixEnsemble random_discrete(std::size_t n, Philox4x64& rng);

/// Mix of the families: checkerboard exponential and Gamma k-sequences
/// (sign patterns from a cyclic Latin square), degenerate, discrete.
MatrixEnsemble random_ensemble(std::size_t n, Philox4x64& rng);

}  // namespace combsum
