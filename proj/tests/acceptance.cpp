// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "combsum/error.hpp"
#include "combsum/exact.hpp"
#include "combsum/mc.hpp"
#include "combsum/normal.hpp"
#include "combsum/permanent.hpp"
#include "combsum/stats.hpp"
#include "combsum/tilt.hpp"
#include "oracles.hpp"

using namespace combsum;
using cd = std::complex<double>;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double combined_sigma(const TailEstimate& e) { return std::hypot(e.std_err, e.rounding_err); }

MatrixEnsemble small_random(int k, Philox4x64& rng) {
  const std::size_t n = 2 + static_cast<std::size_t>(k) % 5;
  return (k % 2 == 0) ? random_degenerate(n, rng) : random_discrete(n, rng);
}

// 1. m.g.f. and variance against enumeration.
Outcome criterion1() {
  const auto t0 = Clock::now();
  Philox4x64 rng(1001, 0);
  double worst_mgf = 0.0, worst_var = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto e = small_random(k, rng);
    const auto outcomes = oracle::brute_force_outcomes(e);
    const double root_b = std::sqrt(b_n(e));
    for (cd z : {cd(0.5, 0.0), cd(-1.5, 0.0), cd(1.0, 2.0), cd(0.0, -3.0)}) {
      cd ref = 0.0;
      for (const auto& o : outcomes) ref += o.prob * std::exp(z * o.value / root_b);
      worst_mgf = std::max(worst_mgf, std::abs(mgf_exact(e, z) - ref) / std::abs(ref));
    }
    double m1 = 0.0, m2 = 0.0;
    for (const auto& o : outcomes) {
      m1 += o.prob * o.value;
      m2 += o.prob * o.value * o.value;
    }
    worst_var = std::max(worst_var, std::abs(var_S(e) - (m2 - m1 * m1)) / (m2 - m1 * m1));
  }
  const double secs = seconds_since(t0);
  return {worst_mgf <= 1e-10 && worst_var <= 1e-10 && secs < 10.0,
          fmt("max rel mgf err %.3g, max rel var err %.3g, %.2f s (limits 1e-10, 1e-10, 10 s)",
              worst_mgf, worst_var, secs)};
}

// 2. Ryser against the n! expansion, then timing at n = 18.
Outcome criterion2() {
  Philox4x64 rng(1002, 0);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k) % 7;
    SquareMatrix<cd> a(n);
    for (auto& x : a.data()) x = cd(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0);
    const cd ref = oracle::naive_permanent(a);
    worst = std::max(worst, std::abs(permanent(a) - ref) / std::abs(ref));
  }
  SquareMatrix<cd> big(18);
  for (auto& x : big.data()) x = cd(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0);
  const auto t0 = Clock::now();
  const cd p = permanent(big);
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 5.0 && std::isfinite(p.real()),
          fmt("max rel err %.3g over 50 matrices (limit 1e-12), n=18 in %.3f s (limit 5 s)", worst,
              secs)};
}

// 3. gamma_n >= 1 and scale invariance on 1000 random ensembles.
Outcome criterion3() {
  Philox4x64 rng(1003, 0);
  double smallest = INFINITY, worst_scale = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto e = random_ensemble(2 + static_cast<std::size_t>(k) % 15, rng);
    const double g = gamma_n(e).gamma_n;
    smallest = std::min(smallest, g);
    const double lambda = std::exp(8.0 * uniform01(rng) - 4.0);
    worst_scale = std::max(worst_scale, std::abs(gamma_n(e.rescaled(lambda)).gamma_n - g) / g);
  }
  return {smallest >= 1.0 && worst_scale <= 1e-12,
          fmt("min gamma_n %.17g (must be >= 1), max rel change under rescaling %.3g (limit 1e-12)",
              smallest, worst_scale)};
}

// 4. Bernstein condition with D = 1 on the two textbook families, k <= 20.
Outcome criterion4() {
  Philox4x64 rng(1004, 0);
  double worst = 0.0;
  bool all = true;
  std::vector<MatrixEnsemble> cases{oracle::grid3(), random_degenerate(7, rng),
                                    random_degenerate(12, rng)};
  for (const auto& e : cases) {
    const auto r = check_bernstein(e, 1.0, 20);
    all = all && r.pass;
    worst = std::max(worst, r.minimal_D);
  }
  const auto expo = make_k_sequence(
      {EntryDistribution::exponential(1.0, Sign::plus),
       EntryDistribution::exponential(1.0, Sign::minus),
       EntryDistribution::exponential(2.0, Sign::plus),
       EntryDistribution::exponential(2.0, Sign::minus)},
      SquareMatrix<int>(4, std::vector<int>{0, 1, 2, 3, 1, 0, 3, 2, 2, 3, 0, 1, 3, 2, 1, 0}));
  const auto cb = make_checkerboard_exponential(10, 0.5);
  for (const auto& e : {expo, cb}) {
    const auto r = check_bernstein(e, 1.0, 20);
    all = all && r.pass;
    worst = std::max(worst, r.minimal_D);
  }
  return {all, fmt("bounded and exponential examples, worst minimal D = %.6g (must be <= 1)", worst)};
}

// 5. Saddlepoint residuals, and h close to u inside the zone at n = 12.
Outcome criterion5() {
  Philox4x64 rng(1005, 0);
  double worst_res = 0.0;
  int failures = 0;
  for (int k = 0; k < 100; ++k) {
    const auto e = random_ensemble(2 + static_cast<std::size_t>(k) % 11, rng);
    const double reach = edge_state(e).m;
    const double u = (0.02 + 0.9 * uniform01(rng)) * reach;
    try {
      const auto r = solve_saddlepoint(e, u);
      const double res = std::abs(tilted_state(e, r.h).m - u) / std::max(1.0, u);
      worst_res = std::max(worst_res, res);
    } catch (const Error&) {
      ++failures;
    }
  }

  const std::vector<std::pair<std::string, MatrixEnsemble>> twelve{
      {"checkerboard", make_checkerboard_exponential(12, 1.0)},
      {"coins", make_row_constant(std::vector<EntryDistribution>(12, oracle::coin()))},
      {"skewed", make_row_constant(std::vector<EntryDistribution>(
                     12, EntryDistribution::discrete({{-1.0, 2.0 / 3.0}, {2.0, 1.0 / 3.0}})))}};
  double worst_rel = 0.0;
  int tested = 0;
  std::string notes;
  for (const auto& [name, e] : twelve) {
    const double zone = zone_u_max(e, 1.0);
    for (double u : {1.0, 1.25, 1.5, 1.75, 2.0}) {
      const double h = solve_saddlepoint(e, u).h;
      const double rel = std::abs(h - u) / u;
      if (u <= zone) {
        worst_rel = std::max(worst_rel, rel);
        ++tested;
      } else {
        notes += fmt(" %s u=%.2f h=%.4f (outside zone %.3f, not asserted);", name.c_str(), u, h, zone);
      }
    }
  }
  std::printf("  criterion 5 detail:%s\n", notes.c_str());
  return {failures == 0 && worst_res <= 1e-10 && tested > 0 && worst_rel <= 0.10,
          fmt("100 cases: %d failures, max residual/max(1,u) %.3g (limit 1e-10); "
              "n=12 in-zone points %d, max |h-u|/u %.4f (limit 0.10)",
              failures, worst_res, tested, worst_rel)};
}

// 6. Tilted IS against exact tails.
Outcome criterion6() {
  const auto t0 = Clock::now();
  bool all = true;
  double worst_z = 0.0, smallest_tail = 1.0;

  const auto run = [&](const MatrixEnsemble& e, double u, std::uint64_t seed) {
    const double exact = exact_tail(e, u * std::sqrt(b_n(e)));
    TiltedChainConfig cfg;
    cfg.h = choose_tilt(e, u);
    cfg.seed = seed;
    cfg.batch_size = 20000;
    const auto est = tilted_is_tail(e, u, cfg);
    const double z = std::abs(est.p_hat - exact) / combined_sigma(est);
    worst_z = std::max(worst_z, z);
    smallest_tail = std::min(smallest_tail, exact);
    all = all && z <= 4.0;
  };

  run(oracle::grid3(), 3.0 / std::sqrt(2.0), 60);
  Philox4x64 rng(1006, 0);
  int cases = 1;
  for (int k = 0; k < 6; ++k) {
    const auto e = random_discrete(6, rng);
    const auto law = enumerate_law(e);
    const double root_b = std::sqrt(b_n(e));
    for (double level : {1e-1, 1e-2, 1e-3}) {
      double x = law.support().front().value;
      for (const auto& a : law.support())
        if (law.tail(a.value) >= level) x = a.value;
      if (x <= 0.0) continue;
      run(e, x / root_b, derive_seed(61, 10 * k + cases));
      ++cases;
    }
  }
  const double secs = seconds_since(t0);
  return {all && secs < 60.0 && smallest_tail <= 2e-3,
          fmt("%d cases, max |IS - exact| / sigma = %.3f (limit 4), smallest exact tail %.3g, "
              "%.1f s (limit 60 s)",
              cases, worst_z, smallest_tail, secs)};
}

// 7. Ratio trend along the checkerboard family at u = 2.
Outcome criterion7() {
  const auto t0 = Clock::now();
  RatioConfig cfg;
  cfg.n_list = {50, 100, 200, 400};
  cfg.u_rule = [](const MatrixEnsemble&) { return 2.0; };
  cfg.N = 10000000;
  cfg.seed = 7;
  cfg.zone_guard = false;
  cfg.method = Method::naive;
  const auto rows =
      ratio_experiment([](std::size_t n) { return make_checkerboard_exponential(n, 1.0); }, cfg);
  std::vector<double> r, s;
  for (const auto& row : rows) {
    if (row.skipped) return {false, "row n=" + std::to_string(row.n) + " skipped: " + row.skip_reason};
    r.push_back(row.ratio);
    s.push_back(row.std_err / row.gauss_tail);
    std::printf("  criterion 7 detail: n=%zu ratio=%.5f sigma=%.5f\n", row.n, row.ratio,
                row.std_err / row.gauss_tail);
  }
  bool monotone = true;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j <= std::min(i + 2, r.size() - 1); ++j)
      if (std::abs(r[j] - 1.0) > std::abs(r[i] - 1.0) + 4.0 * std::hypot(s[i], s[j])) monotone = false;
  const bool band = r.back() >= 0.8 && r.back() <= 1.2;
  const double secs = seconds_since(t0);
  return {band && monotone && secs < 900.0,
          fmt("ratio at n=400 %.5f (band [0.8, 1.2]), trend %s, %.1f s (limit 900 s)", r.back(),
              monotone ? "non-increasing within 4 sigma" : "VIOLATED", secs)};
}

// 8. KS distance at n = 400 below n = 100, separated by 4 sigma of KS noise.
Outcome criterion8() {
  const std::uint64_t N = 1000000;
  const auto t = esseen_decay([](std::size_t n) { return make_checkerboard_exponential(n, 1.0); },
                              {100, 400}, N, 8);
  const double ks100 = t.rows[0].ks, ks400 = t.rows[1].ks;
  const double sigma = std::hypot(t.rows[0].ks_sigma, t.rows[1].ks_sigma);
  const double sep = (ks100 - ks400) / sigma;
  return {ks400 < ks100 && sep >= 4.0,
          fmt("KS(100) = %.6f, KS(400) = %.6f, separation %.2f sigma (need >= 4, sigma = %.3g)",
              ks100, ks400, sep, sigma)};
}

// 9. Row-constant ensembles: enumerated law equals the independent convolution.
Outcome criterion9() {
  Philox4x64 rng(1009, 0);
  double worst = 0.0;
  bool same_support = true;
  for (int k = 0; k < 25; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k) % 5;
    std::vector<EntryDistribution> rows;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = 0.25 + uniform01(rng), b = 0.25 + uniform01(rng);
      if (k % 2 == 0) {
        rows.push_back(EntryDistribution::discrete({{-a, b / (a + b)}, {b, a / (a + b)}}));
      } else {
        rows.push_back(EntryDistribution::discrete(
            {{-a, 0.25}, {0.0, 0.5}, {a, 0.25}}));
      }
    }
    oracle::Outcomes conv{{0.0, 1.0}};
    for (const auto& d : rows) conv = oracle::convolve(conv, oracle::atoms_of(d));
    const auto law = enumerate_law(make_row_constant(rows));
    // Same atoms on both sides: every oracle atom's mass appears in the
    // enumerated law and vice versa.
    const oracle::TailTable ref(conv);
    for (const auto& atom : law.support())
      worst = std::max(worst, std::abs(ref.mass_near(atom.value) - atom.prob));
    for (const auto& o : conv) {
      double p = 0.0;
      for (const auto& atom : law.support())
        if (std::abs(atom.value - o.value) <= 1e-9) p += atom.prob;
      worst = std::max(worst, std::abs(p - ref.mass_near(o.value)));
    }
    double total = 0.0;
    for (const auto& atom : law.support()) total += atom.prob;
    same_support = same_support && std::abs(total - 1.0) <= 1e-12;
  }
  return {worst <= 1e-12 && same_support,
          fmt("25 ensembles, max atom-wise |enumerated - convolution| = %.3g (limit 1e-12)", worst)};
}

}  // namespace

// Optional arguments select criteria by number; the default runs all nine.
int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3,
                                                       criterion4, criterion5, criterion6,
                                                       criterion7, criterion8, criterion9};
  std::vector<bool> selected(criteria.size(), argc < 2);
  for (int a = 1; a < argc; ++a) {
    const long k = std::strtol(argv[a], nullptr, 10);
    if (k >= 1 && k <= static_cast<long>(criteria.size())) selected[k - 1] = true;
  }
  int failed = 0, ran = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!selected[k]) continue;
    ++ran;
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& err) {
      o = {false, std::string("exception: ") + err.what()};
    }
    std::printf("criterion %zu: %s  %s\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
