#pragma once

#include <complex>
#include <cstddef>

#include "combsum/matrix.hpp"

namespace combsum {

/// Largest matrix accepted by the permanent kernels (cost 2^n · n).
inline constexpr std::size_t kMaxPermanentSize = 20;

/// per(A) = Σ_π Π_i a_{i,π(i)} by Ryser's inclusion–exclusion formula,
/// visiting column subsets in Gray-code order so each step updates the row
/// sums by a single column. O(2^n · n); throws GuardError for n > 20.
std::complex<double> permanent(const SquareMatrix<std::complex<double>>& a);
double permanent(const SquareMatrix<double>& a);

/// Same value by dynamic programming over column subsets: row k is expanded
/// against every subset of k+1 columns. No inclusion–exclusion signs, so for
/// non-negative matrices every partial sum is a sum of non-negative terms and
/// the result is accurate to a few ulps per row. O(2^n · n) time, 2^n memory.
double permanent_subset_dp(const SquareMatrix<double>& a);

/// per(A(h)) and its first two h-derivatives, given the entrywise
/// derivatives A'(h) and A''(h).
struct PermanentJet {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

/// By multilinearity per(A)' is the sum over columns of per(A) with that
/// column replaced by A', and per(A)'' adds the single-column A'' terms to
/// twice the sum over column pairs both replaced by A'. Summed over
/// permutations this is the product rule applied to Π_i a_{i,π(i)}, so all
/// three values come out of one subset-DP pass that carries the derivative
/// accumulators along. O(3 · 2^n · n); throws GuardError for n > 20.
PermanentJet permanent_jet(const SquareMatrix<double>& a, const SquareMatrix<double>& da,
                           const SquareMatrix<double>& d2a);

}  // namespace combsum
