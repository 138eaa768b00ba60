#include "combsum/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "combsum/error.hpp"
#include "combsum/normal.hpp"
#include "combsum/permanent.hpp"
#include "combsum/stats.hpp"

namespace combsum {

namespace {

// Entry m.g.f.s at t = h/√B_n after dividing row i by e^{r_i} and column j
// by e^{c_j}. Every permutation picks up the same factor e^{-Σr-Σc}, so
// permanents of the rescaled grid differ from the true ones by log_scale
// only, while the largest entry of every row and column is 1.
struct TiltedGrid {
  SquareMatrix<double> weight;
  SquareMatrix<double> mean;    // tilted E[X/√B]
  SquareMatrix<double> second;  // tilted E[(X/√B)²]
  double log_scale = 0.0;
};

TiltedGrid tilted_grid(const MatrixEnsemble& e, double h) {
  if (!std::isfinite(h)) throw std::invalid_argument("tilt h must be finite");
  const std::size_t n = e.size();
  const double root_b = std::sqrt(b_n(e));
  const double t = h / root_b;

  TiltedGrid g{SquareMatrix<double>(n), SquareMatrix<double>(n), SquareMatrix<double>(n), 0.0};
  SquareMatrix<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const TiltedMoments tm = entry_tilted_moments(e(i, j), t);
      logs(i, j) = tm.log_mgf;
      g.mean(i, j) = tm.mean / root_b;
      g.second(i, j) = tm.second_moment / (root_b * root_b);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = logs.row(i);
    const double r = *std::max_element(row.begin(), row.end());
    for (auto& x : row) x -= r;
    g.log_scale += r;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double c = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) c = std::max(c, logs(i, j));
    for (std::size_t i = 0; i < n; ++i) g.weight(i, j) = std::exp(logs(i, j) - c);
    g.log_scale += c;
  }
  return g;
}

double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

void require_tilt_size(std::size_t n) {
  if (n > kMaxTiltSize) {
    throw GuardError("tilted state needs n <= " + std::to_string(kMaxTiltSize) + ", got n = " +
                         std::to_string(n),
                     3.0 * std::ldexp(static_cast<double>(n), static_cast<int>(n)));
  }
}

SaddlepointResult make_result(double u, const TiltedState& st, int iters) {
  SaddlepointResult r;
  r.u = u;
  r.h = st.h;
  r.log_mgf = st.log_mgf;
  r.m = st.m;
  r.sigma2 = st.sigma2;
  r.newton_iters = iters;
  r.residual = std::abs(st.m - u);
  r.gauss_tail = normal_sf(u);
  r.tail_approx = std::exp(st.log_mgf - 0.5 * st.h * st.h) * r.gauss_tail;
  return r;
}

}  // namespace

double tilt_domain_edge(const MatrixEnsemble& e) {
  double limit = std::numeric_limits<double>::infinity();
  for (const auto& d : e.cells().data()) limit = std::min(limit, d.mgf_upper_limit());
  if (!std::isfinite(limit)) return limit;
  return std::sqrt(b_n(e)) * limit;
}

double lemma_circle_radius(const MatrixEnsemble& e) {
  const double n = static_cast<double>(e.size());
  return std::min(std::sqrt(n), std::sqrt(b_n(e)) / e.scale()) / 8.0;
}

double max_admissible_tilt(const MatrixEnsemble& e, const TiltOptions& opts) {
  if (!(opts.safety > 0.0 && opts.safety < 1.0)) {
    throw std::invalid_argument("tilt safety factor must lie in (0, 1)");
  }
  if (!(opts.max_tilt > 0.0)) throw std::invalid_argument("max_tilt must be positive");
  double h = std::min(opts.safety * tilt_domain_edge(e), opts.max_tilt);
  if (opts.lemma_circle) h = std::min(h, lemma_circle_radius(e));
  return h;
}

double log_mgf(const MatrixEnsemble& e, double h) {
  const TiltedGrid g = tilted_grid(e, h);
  const double per = permanent_subset_dp(g.weight);
  if (!(per > 0.0) || !std::isfinite(per)) {
    throw NumericalDegeneracyError("rescaled permanent is not a positive finite number at h = " +
                                   std::to_string(h));
  }
  return g.log_scale + std::log(per) - log_factorial(e.size());
}

TiltedState tilted_state(const MatrixEnsemble& e, double h) {
  const std::size_t n = e.size();
  require_tilt_size(n);
  const TiltedGrid g = tilted_grid(e, h);

  SquareMatrix<double> d1(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d1(i, j) = g.weight(i, j) * g.mean(i, j);
      d2(i, j) = g.weight(i, j) * g.second(i, j);
    }
  }
  const PermanentJet raw = permanent_jet(g.weight, d1, d2);
  if (!(raw.value > 0.0) || !std::isfinite(raw.value)) {
    throw NumericalDegeneracyError("rescaled permanent is not a positive finite number at h = " +
                                   std::to_string(h));
  }
  const double m = raw.first / raw.value;

  // Second pass on X_ij/√B - m/n: the shifted entries sum to T - m along
  // every permutation, so the jet now yields E(T - m) and E(T - m)².
  const double c = m / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = g.weight(i, j);
      const double mu = g.mean(i, j);
      d1(i, j) = w * (mu - c);
      d2(i, j) = w * (g.second(i, j) - 2.0 * c * mu + c * c);
    }
  }
  const PermanentJet centered = permanent_jet(g.weight, d1, d2);
  const double drift = centered.first / centered.value;
  const double sigma2 = centered.second / centered.value - drift * drift;
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    std::ostringstream os;
    os << "tilted variance " << sigma2 << " is not positive at h = " << h;
    throw NumericalDegeneracyError(os.str());
  }

  TiltedState st;
  st.h = h;
  st.log_mgf = g.log_scale + std::log(raw.value) - log_factorial(n);
  st.m = m + drift;
  st.sigma2 = sigma2;
  return st;
}

TiltedState edge_state(const MatrixEnsemble& e, const TiltOptions& opts) {
  const double h_max = max_admissible_tilt(e, opts);
  try {
    return tilted_state(e, h_max);
  } catch (const NumericalDegeneracyError&) {
  }
  // Far out the tilted law sits on a single permutation sum and σ² drowns
  // in rounding. Bisect for the largest tilt that still has a usable state.
  TiltedState good = tilted_state(e, 0.0);
  double bad = h_max;
  for (int k = 0; k < 60 && bad - good.h > 1e-9 * h_max; ++k) {
    const double mid = 0.5 * (good.h + bad);
    try {
      good = tilted_state(e, mid);
    } catch (const NumericalDegeneracyError&) {
      bad = mid;
    }
  }
  return good;
}

SaddlepointResult solve_saddlepoint(const MatrixEnsemble& e, double u, const TiltOptions& opts) {
  if (!(u >= 0.0) || !std::isfinite(u)) {
    throw std::invalid_argument("saddlepoint level u must be finite and non-negative");
  }
  require_tilt_size(e.size());
  if (u == 0.0) return make_result(u, tilted_state(e, 0.0), 0);

  const double tol = kSaddlepointTolerance * std::max(1.0, u);
  const TiltedState edge = edge_state(e, opts);
  const double h_max = edge.h;
  if (edge.m < u - tol) {
    std::ostringstream os;
    os << "u = " << u << " is out of reach: m_n(" << h_max << ") = " << edge.m;
    throw ZoneExceededError(os.str(), edge.m);
  }

  double lo = 0.0, hi = h_max;
  double h = std::min(u, h_max);
  TiltedState st = tilted_state(e, h);
  int iters = 0;
  while (std::abs(st.m - u) > tol && iters < kSaddlepointMaxIterations) {
    ++iters;
    if (st.m < u) {
      lo = h;
    } else {
      hi = h;
    }
    double next = h - (st.m - u) / st.sigma2;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == h) break;
    h = next;
    st = tilted_state(e, h);
  }
  if (std::abs(st.m - u) > tol && std::abs(edge.m - u) <= tol) st = edge;
  return make_result(u, st, iters);
}

double saddlepoint_tail(const MatrixEnsemble& e, double u, const TiltOptions& opts) {
  return solve_saddlepoint(e, u, opts).tail_approx;
}

}  // namespace combsum
