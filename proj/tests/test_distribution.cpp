#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "combsum/distribution.hpp"
#include "combsum/error.hpp"
#include "combsum/rng.hpp"

using namespace combsum;

namespace {

std::vector<EntryDistribution> zoo() {
  return {
      EntryDistribution::point_mass(2.0),
      EntryDistribution::point_mass(-0.75),
      EntryDistribution::discrete({{-1.0, 0.5}, {1.0, 0.5}}),
      EntryDistribution::discrete({{-2.0, 0.2}, {0.5, 0.7}, {3.0, 0.1}}),
      EntryDistribution::exponential(2.0, Sign::plus),
      EntryDistribution::exponential(1.5, Sign::minus),
      EntryDistribution::gamma(2.5, 3.0, Sign::plus),
      EntryDistribution::gamma(0.4, 2.0, Sign::minus),
  };
}

// Fornberg's recursion for finite-difference weights of the derivative of
// order `order` at 0 on the given nodes.
std::vector<double> fd_weights(const std::vector<double>& x, int order) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0, c4 = x[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

}  // namespace

TEST_CASE("raw and absolute moments of the closed-form families") {
  CHECK(raw_moment(EntryDistribution::point_mass(2.0), 3) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(raw_moment(EntryDistribution::exponential(2.0, Sign::plus), 3) ==
        doctest::Approx(0.75).epsilon(1e-15));
  CHECK(raw_moment(EntryDistribution::discrete({{-1.0, 0.5}, {1.0, 0.5}}), 2) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(abs_moment(EntryDistribution::exponential(1.0, Sign::minus), 1) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(abs_moment(EntryDistribution::discrete({{-2.0, 0.5}, {2.0, 0.5}}), 3) ==
        doctest::Approx(8.0).epsilon(1e-15));
  CHECK(abs_moment(EntryDistribution::gamma(2.0, 1.0, Sign::plus), 2) ==
        doctest::Approx(6.0).epsilon(1e-14));

  // Odd raw moments of negative laws change sign, absolute ones do not.
  const auto neg = EntryDistribution::gamma(2.0, 1.0, Sign::minus);
  CHECK(raw_moment(neg, 3) == doctest::Approx(-24.0).epsilon(1e-14));
  CHECK(abs_moment(neg, 3) == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(raw_moment(neg, 0) == 1.0);
}

TEST_CASE("moment orders past the factorial range are rejected") {
  const auto d = EntryDistribution::exponential(1.0);
  CHECK_THROWS_AS(raw_moment(d, 171), MomentRangeError);
  CHECK_NOTHROW(raw_moment(d, 170));
  CHECK_THROWS_AS(raw_moment(EntryDistribution::exponential(0.01), 170), MomentRangeError);
  CHECK_THROWS_AS(raw_moment(d, -1), std::invalid_argument);
  // The log forms never overflow.
  CHECK(log_abs_raw_moment(EntryDistribution::exponential(0.01), 170) ==
        doctest::Approx(std::lgamma(171.0) + 170.0 * std::log(100.0)).epsilon(1e-13));
}

TEST_CASE("log moments agree with the direct closed forms") {
  for (const auto& d : zoo()) {
    for (int k = 1; k <= 8; ++k) {
      const double a = abs_moment(d, k);
      if (a > 0.0) CHECK(std::exp(log_abs_moment(d, k)) == doctest::Approx(a).epsilon(1e-12));
      const double r = std::abs(raw_moment(d, k));
      if (r > 0.0) CHECK(std::exp(log_abs_raw_moment(d, k)) == doctest::Approx(r).epsilon(1e-12));
    }
  }
}

TEST_CASE("entry m.g.f. values") {
  for (const auto& d : zoo()) {
    const auto one = entry_mgf(d, 0.0);
    CHECK(std::abs(one - 1.0) <= 1e-14);
  }
  CHECK(std::abs(entry_mgf(EntryDistribution::exponential(2.0), 1.0) - 2.0) < 1e-15);
  CHECK(std::abs(entry_mgf(EntryDistribution::point_mass(-1.0), std::numbers::ln2) - 0.5) < 1e-15);

  // Complex arguments: e^{iθc} for a point mass, rate/(rate - z) for Exp.
  const std::complex<double> z(0.3, 0.7);
  CHECK(std::abs(entry_mgf(EntryDistribution::point_mass(1.5), z) - std::exp(1.5 * z)) < 1e-15);
  CHECK(std::abs(entry_mgf(EntryDistribution::exponential(2.0, Sign::minus), z) -
                 2.0 / (2.0 + z)) < 1e-15);
  CHECK(std::abs(entry_mgf(EntryDistribution::gamma(3.0, 2.0), z) -
                 std::pow(2.0 / (2.0 - z), 3.0)) < 1e-14);
}

TEST_CASE("m.g.f. domain violations carry the admissible bound") {
  try {
    entry_mgf(EntryDistribution::exponential(2.0, Sign::plus), 2.5);
    FAIL("expected a domain error");
  } catch (const TiltDomainError& err) {
    CHECK(err.max_abs_z() == 2.0);
    CHECK(err.reason() == "tilt-domain");
  }
  CHECK_THROWS_AS(entry_mgf(EntryDistribution::gamma(2.0, 1.0, Sign::minus), -1.0),
                  TiltDomainError);
  CHECK_NOTHROW(entry_mgf(EntryDistribution::gamma(2.0, 1.0, Sign::minus), 50.0));
  CHECK_THROWS_AS(tilt_entry(EntryDistribution::exponential(1.0), 1.0), TiltDomainError);
}

TEST_CASE("exponential tilts in closed form") {
  const auto pm = EntryDistribution::point_mass(4.0);
  CHECK(tilt_entry(pm, 0.7) == pm);
  CHECK(tilt_entry(EntryDistribution::exponential(3.0, Sign::plus), 1.0) ==
        EntryDistribution::exponential(2.0, Sign::plus));
  CHECK(tilt_entry(EntryDistribution::exponential(3.0, Sign::minus), 1.0) ==
        EntryDistribution::exponential(4.0, Sign::minus));
  CHECK(tilt_entry(EntryDistribution::gamma(2.0, 3.0, Sign::plus), 0.5) ==
        EntryDistribution::gamma(2.0, 2.5, Sign::plus));

  for (double h : {-1.3, 0.0, 0.4, 2.0}) {
    const auto t = tilt_entry(EntryDistribution::discrete({{-1.0, 0.5}, {1.0, 0.5}}), h);
    const auto& atoms = t.get_if<FiniteDiscrete>()->atoms;
    REQUIRE(atoms.size() == 2);
    const double z = std::exp(h) + std::exp(-h);
    CHECK(atoms[0].value == -1.0);
    CHECK(atoms[0].prob == doctest::Approx(std::exp(-h) / z).epsilon(1e-14));
    CHECK(atoms[1].prob == doctest::Approx(std::exp(h) / z).epsilon(1e-14));
  }
}

TEST_CASE("tilted mean is the derivative of the log m.g.f.") {
  for (const auto& d : zoo()) {
    for (double h : {-0.6, 0.0, 0.35, 0.9}) {
      if (!(h < d.mgf_upper_limit() - 0.1) || !(h > d.mgf_lower_limit() + 0.1)) continue;
      const double step = 1e-5;
      const double fd = (entry_log_mgf(d, h + step) - entry_log_mgf(d, h - step)) / (2.0 * step);
      CHECK(std::abs(fd - tilt_entry(d, h).mean()) <= 1e-8 * std::max(1.0, std::abs(fd)));
      CHECK(entry_tilted_moments(d, h).mean ==
            doctest::Approx(tilt_entry(d, h).mean()).epsilon(1e-12));
    }
  }
}

TEST_CASE("raw moments are derivatives of the m.g.f. at zero") {
  // Eleven symmetric nodes; the stencil is exact for polynomials of degree 10.
  std::vector<double> nodes;
  const double step = 0.04;
  for (int k = -5; k <= 5; ++k) nodes.push_back(k * step);
  for (const auto& d : zoo()) {
    for (int k = 1; k <= 4; ++k) {
      const auto w = fd_weights(nodes, k);
      double fd = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) fd += w[i] * entry_mgf(d, nodes[i]).real();
      const double exact = raw_moment(d, k);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("sampling matches the closed-form mean and variance") {
  constexpr int N = 1000000;
  int idx = 0;
  for (const auto& d : zoo()) {
    Philox4x64 rng(2024, static_cast<std::uint64_t>(idx++));
    const double mu = d.mean();
    const double sigma2 = d.variance();
    double s = 0.0, s2 = 0.0;
    for (int k = 0; k < N; ++k) {
      const double x = d.sample(rng);
      s += x;
      s2 += (x - mu) * (x - mu);
    }
    const double mean = s / N;
    // Spread around the known mean: an average of i.i.d. terms with
    // variance m4 - σ⁴, so its standard error is exact.
    const double var = s2 / N;
    CHECK(mu == doctest::Approx(raw_moment(d, 1)).epsilon(1e-14));
    CHECK(sigma2 == doctest::Approx(raw_moment(d, 2) - mu * mu).epsilon(1e-12).scale(1.0));
    const double m4 = raw_moment(d, 4) - 4.0 * mu * raw_moment(d, 3) +
                      6.0 * mu * mu * raw_moment(d, 2) - 3.0 * std::pow(mu, 4);
    const double se_mean = std::sqrt(sigma2 / N);
    const double se_var = std::sqrt(std::max(m4 - sigma2 * sigma2, 0.0) / N);
    INFO(d.describe());
    CHECK(std::abs(mean - mu) <= 5.0 * se_mean + 1e-15);
    CHECK(std::abs(var - sigma2) <= 5.0 * se_var + 1e-12);
  }
}

TEST_CASE("factories enforce parameter invariants") {
  CHECK_THROWS_AS(EntryDistribution::discrete({{0.0, 0.5}, {1.0, 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(EntryDistribution::discrete({{0.0, 0.0}, {1.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(EntryDistribution::discrete({}), std::invalid_argument);
  CHECK_THROWS_AS(EntryDistribution::exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(EntryDistribution::gamma(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(EntryDistribution::point_mass(NAN), std::invalid_argument);
  // Probabilities within 1e-12 of one are accepted; equal values merge.
  const auto d = EntryDistribution::discrete({{1.0, 0.25}, {-1.0, 0.5}, {1.0, 0.25 + 5e-13}});
  const auto& atoms = d.get_if<FiniteDiscrete>()->atoms;
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[0].value == -1.0);
  CHECK(atoms[1].prob == doctest::Approx(0.5));
}

TEST_CASE("rescaling multiplies the variable") {
  for (const auto& d : zoo()) {
    const auto s = d.scaled(2.5);
    CHECK(s.mean() == doctest::Approx(2.5 * d.mean()).epsilon(1e-14));
    CHECK(s.variance() == doctest::Approx(6.25 * d.variance()).epsilon(1e-14));
    CHECK(s.canonical_scale() == doctest::Approx(2.5 * d.canonical_scale()).epsilon(1e-14));
  }
}
