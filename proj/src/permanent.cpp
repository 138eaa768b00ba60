#include "combsum/permanent.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "combsum/error.hpp"

namespace combsum {

namespace {

void require_size(std::size_t n) {
  if (n > kMaxPermanentSize) {
    throw GuardError("permanent of a " + std::to_string(n) + "x" + std::to_string(n) +
                         " matrix exceeds the size guard n <= " + std::to_string(kMaxPermanentSize),
                     std::ldexp(static_cast<double>(n), static_cast<int>(n)));
  }
}

template <typename T>
T ryser(const SquareMatrix<T>& a) {
  const std::size_t n = a.size();
  require_size(n);
  if (n == 0) return T(1);

  std::vector<T> row_sums(n, T(0));
  T total(0);
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const std::uint64_t gray = k ^ (k >> 1);
    const auto j = static_cast<std::size_t>(std::countr_zero(k));
    if (gray & (std::uint64_t{1} << j)) {
      for (std::size_t i = 0; i < n; ++i) row_sums[i] += a(i, j);
    } else {
      for (std::size_t i = 0; i < n; ++i) row_sums[i] -= a(i, j);
    }
    T prod(1);
    for (std::size_t i = 0; i < n; ++i) prod *= row_sums[i];
    if (std::popcount(gray) % 2 == 1) {
      total -= prod;
    } else {
      total += prod;
    }
  }
  return (n % 2 == 1) ? -total : total;
}

}  // namespace

std::complex<double> permanent(const SquareMatrix<std::complex<double>>& a) { return ryser(a); }

double permanent(const SquareMatrix<double>& a) { return ryser(a); }

double permanent_subset_dp(const SquareMatrix<double>& a) {
  const std::size_t n = a.size();
  require_size(n);
  if (n == 0) return 1.0;

  const std::uint64_t subsets = std::uint64_t{1} << n;
  std::vector<double> dp(subsets, 0.0);
  dp[0] = 1.0;
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    const auto row = static_cast<std::size_t>(std::popcount(mask) - 1);
    const auto coeffs = a.row(row);
    double acc = 0.0;
    for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
      const auto j = static_cast<std::size_t>(std::countr_zero(rest));
      acc += dp[mask ^ (std::uint64_t{1} << j)] * coeffs[j];
    }
    dp[mask] = acc;
  }
  return dp[subsets - 1];
}

PermanentJet permanent_jet(const SquareMatrix<double>& a, const SquareMatrix<double>& da,
                           const SquareMatrix<double>& d2a) {
  const std::size_t n = a.size();
  if (da.size() != n || d2a.size() != n) {
    throw std::invalid_argument("permanent_jet: derivative matrices must match the matrix size");
  }
  require_size(n);
  if (n == 0) return {1.0, 0.0, 0.0};

  const std::uint64_t subsets = std::uint64_t{1} << n;
  std::vector<double> v0(subsets, 0.0), v1(subsets, 0.0), v2(subsets, 0.0);
  v0[0] = 1.0;
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    const auto row = static_cast<std::size_t>(std::popcount(mask) - 1);
    const auto c0 = a.row(row);
    const auto c1 = da.row(row);
    const auto c2 = d2a.row(row);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) {
      const auto j = static_cast<std::size_t>(std::countr_zero(rest));
      const std::uint64_t prev = mask ^ (std::uint64_t{1} << j);
      s0 += v0[prev] * c0[j];
      s1 += v1[prev] * c0[j] + v0[prev] * c1[j];
      s2 += v2[prev] * c0[j] + 2.0 * v1[prev] * c1[j] + v0[prev] * c2[j];
    }
    v0[mask] = s0;
    v1[mask] = s1;
    v2[mask] = s2;
  }
  return {v0[subsets - 1], v1[subsets - 1], v2[subsets - 1]};
}

}  // namespace combsum
