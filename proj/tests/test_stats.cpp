#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "combsum/error.hpp"
#include "combsum/stats.hpp"
#include "oracles.hpp"

using namespace combsum;

namespace {

// E S and E S² by brute force. Cells on a permutation are independent, so
// E S² = Σ_i E X² + Σ_{i≠k} E X E X along each permutation.
std::pair<double, double> enumerated_moments(const MatrixEnsemble& e) {
  const std::size_t n = e.size();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  double count = 0.0, s1 = 0.0, s2 = 0.0;
  do {
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mean += e(i, p[i]).mean();
      var += e(i, p[i]).variance();
    }
    s1 += mean;
    s2 += var + mean * mean;
    count += 1.0;
  } while (std::next_permutation(p.begin(), p.end()));
  return {s1 / count, s2 / count};
}

}  // namespace

TEST_CASE("B_n examples") {
  CHECK(b_n(oracle::grid3()) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(b_n(make_checkerboard_exponential(2, 1.0)) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK_THROWS_AS(b_n(make_degenerate(SquareMatrix<double>(3, 0.0))), DegenerateEnsembleError);
}

TEST_CASE("Var S_n examples") {
  CHECK(var_S(oracle::grid3()) == doctest::Approx(3.0).epsilon(1e-15));
  const auto coins = make_row_constant({oracle::coin(), oracle::coin()});
  CHECK(var_S(coins) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(var_S(make_degenerate(SquareMatrix<double>(3, 0.0))) == 0.0);
}

TEST_CASE("gamma_n on the 3x3 grid") {
  const auto s = gamma_n(oracle::grid3());
  CHECK(s.n == 3);
  CHECK(s.B_n == doctest::Approx(2.0));
  CHECK(s.var_S == doctest::Approx(3.0));
  CHECK(s.gamma_terms[0] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));
  CHECK(s.gamma_terms[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.gamma_terms[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.gamma_terms[3] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));
  CHECK(s.gamma_n == doctest::Approx(1.224744871391589).epsilon(1e-15));
}

TEST_CASE("zone edge") {
  const double z = zone_u_max(oracle::grid3(), 1.0);
  CHECK(z == doctest::Approx(std::pow(2.0, 1.0 / 6.0)).epsilon(1e-14));
  CHECK(zone_u_max(oracle::grid3(), 0.5) == doctest::Approx(z / 2.0).epsilon(1e-15));
  CHECK_THROWS(zone_u_max(oracle::grid3(), 0.0));
  CHECK_THROWS(zone_u_max(oracle::grid3(), 1.5));

  // 64 i.i.d. coin rows: γ_n = 1 (row energy), √B/M = 8, so the edge is 64^{1/6} = 2.
  std::vector<EntryDistribution> rows(64, oracle::coin());
  const auto big = make_row_constant(rows);
  const auto s = gamma_n(big, 1.0);
  CHECK(s.gamma_n == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.zone_u_max == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("gamma_n >= 1 and scale invariance over random ensembles") {
  Philox4x64 rng(7, 3);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 2 + k % 9;
    const auto e = random_ensemble(n, rng);
    const auto s = gamma_n(e);
    CHECK(s.gamma_n >= 1.0);
    const double lambda = 0.01 + 50.0 * uniform01(rng);
    const auto t = gamma_n(e.rescaled(lambda));
    CHECK(std::abs(t.gamma_n - s.gamma_n) <= 1e-12 * s.gamma_n);
    CHECK(std::abs(t.zone_u_max - s.zone_u_max) <= 1e-12 * s.zone_u_max);
  }
}

TEST_CASE("Var S_n agrees with permutation enumeration") {
  Philox4x64 rng(11, 0);
  for (int k = 0; k < 60; ++k) {
    const std::size_t n = 2 + k % 5;
    const auto e = random_ensemble(n, rng);
    const auto [m1, m2] = enumerated_moments(e);
    CHECK(std::abs(m1) <= 1e-10 * std::sqrt(m2));
    CHECK(var_S(e) == doctest::Approx(m2 - m1 * m1).epsilon(1e-10));
  }
  CHECK(enumerated_moments(oracle::grid3()).second == doctest::Approx(3.0));
}

TEST_CASE("zero-mean entries give Var S_n = B_n") {
  Philox4x64 rng(5, 5);
  for (int k = 0; k < 50; ++k) {
    std::vector<EntryDistribution> laws;
    const std::size_t n = 2 + k % 6;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = 0.1 + uniform01(rng);
      laws.push_back(EntryDistribution::discrete({{-a, 0.5}, {a, 0.5}}));
    }
    const auto e = make_row_constant(laws);
    CHECK(var_S(e) == b_n(e));
  }
  const auto cb = make_k_sequence(
      {EntryDistribution::discrete({{-1.0, 0.5}, {1.0, 0.5}}),
       EntryDistribution::discrete({{-3.0, 0.25}, {1.0, 0.75}})},
      SquareMatrix<int>(3, std::vector<int>{0, 1, 0, 1, 0, 1, 0, 0, 0}));
  CHECK(var_S(cb) == b_n(cb));
}
