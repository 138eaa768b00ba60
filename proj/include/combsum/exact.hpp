#pragma once

// Exact small-n computations: the permanent form of the m.g.f. of S_n/√B_n
// and the law of S_n by enumerating all n! permutations.

#include <complex>
#include <cstddef>
#include <vector>

#include "combsum/distribution.hpp"
#include "combsum/ensemble.hpp"

namespace combsum {

/// Atoms closer than this are merged; tail events use the same slack.
inline constexpr double kAtomTolerance = 1e-9;

inline constexpr std::size_t kMaxEnumerateDegenerate = 10;
inline constexpr std::size_t kMaxEnumerateDiscrete = 7;
inline constexpr double kMaxSupportProduct = 1e6;

/// Finite law: strictly increasing values with positive probabilities
/// summing to 1.
class ExactDistribution {
 public:
  /// Sorts, merges atoms within kAtomTolerance and validates.
  static ExactDistribution from_atoms(std::vector<Atom> atoms);

  const std::vector<Atom>& support() const noexcept { return support_; }

  double mean() const noexcept;
  double variance() const noexcept;
  /// P(S >= x), counting atoms within kAtomTolerance of x.
  double tail(double x) const noexcept;

 private:
  explicit ExactDistribution(std::vector<Atom> support);

  std::vector<Atom> support_;
  // upper_[k] = sum of probabilities of atoms k, k+1, ...
  std::vector<double> upper_;
};

/// φ_n(z) = E exp(z S_n / √B_n) = per(‖E e^{z X_ij/√B_n}‖) / n!.
std::complex<double> mgf_exact(const MatrixEnsemble& e, std::complex<double> z);

/// Law of S_n: uniform mixture over the n! permutations of the convolution of
/// the selected entries. Guards: n <= 10 for degenerate grids; n <= 7 and at
/// most 10^6 support points per permutation for finite discrete grids;
/// exponential and Gamma entries are rejected.
ExactDistribution enumerate_law(const MatrixEnsemble& e);

/// P(S_n >= x) from the enumerated law.
double exact_tail(const MatrixEnsemble& e, double x);

/// True when enumerate_law would accept the ensemble.
bool enumerable(const MatrixEnsemble& e) noexcept;

}  // namespace combsum
