#pragma once

// Conjugate (exponentially tilted) law of T = S_n / √B_n: log φ_n, the
// tilted mean m_n(h) and variance σ_n²(h), the saddlepoint equation
// m_n(h) = u and the leading-order tail approximation built on it.

#include <cstddef>

#include "combsum/ensemble.hpp"

namespace combsum {

/// Largest n for which tilted_state evaluates the derivative permanents.
inline constexpr std::size_t kMaxTiltSize = 16;

struct TiltOptions {
  /// Fraction of the analyticity edge that h may reach.
  double safety = 0.95;
  /// Hard cap on h. Bounded ensembles have an entire m.g.f., so this is
  /// their only limit unless lemma_circle is set.
  double max_tilt = 30.0;
  /// Also cap h by the conservative circle min{√n, √B_n/M}/8.
  bool lemma_circle = false;
};

/// √B_n · min over cells of the right edge of the entry m.g.f. domain,
/// i.e. the first h > 0 where some E e^{h X_ij/√B_n} diverges. +inf for
/// bounded ensembles.
double tilt_domain_edge(const MatrixEnsemble& e);

/// min{√n, √B_n/M} / 8.
double lemma_circle_radius(const MatrixEnsemble& e);

/// Largest admissible tilt: min(safety · edge, max_tilt), further capped by
/// the lemma circle when requested.
double max_admissible_tilt(const MatrixEnsemble& e, const TiltOptions& opts = {});

/// log φ_n(h) for real h, computed from a row- and column-rescaled
/// permanent so that it stays finite for large tilts. n <= 20.
double log_mgf(const MatrixEnsemble& e, double h);

struct TiltedState {
  double h = 0.0;
  double log_mgf = 0.0;
  double m = 0.0;
  double sigma2 = 0.0;
};

/// φ_n and its first two logarithmic derivatives at h. n <= 16.
/// The variance comes from a second pass with every entry shifted by m/n,
/// which makes it a direct second central moment instead of the difference
/// φ''/φ - m². Throws NumericalDegeneracyError when σ² is not positive.
TiltedState tilted_state(const MatrixEnsemble& e, double h);

/// State at the largest admissible tilt. When σ² has vanished numerically
/// there (the tilted law is concentrated on one permutation sum), the tilt
/// is bisected back to the largest value with a usable state.
TiltedState edge_state(const MatrixEnsemble& e, const TiltOptions& opts = {});

struct SaddlepointResult {
  double u = 0.0;
  double h = 0.0;
  /// φ_n(h) e^{-h²/2} (1 - Φ(u))
  double tail_approx = 0.0;
  /// 1 - Φ(u)
  double gauss_tail = 0.0;
  int newton_iters = 0;
  double residual = 0.0;
  double log_mgf = 0.0;
  double m = 0.0;
  double sigma2 = 0.0;
};

/// Residual target |m_n(h) - u| <= kSaddlepointTolerance · max(1, u).
inline constexpr double kSaddlepointTolerance = 1e-10;
inline constexpr int kSaddlepointMaxIterations = 100;

/// Solves m_n(h) = u for u >= 0 by Newton's method started at h = u, with a
/// bisection step whenever Newton leaves the current bracket. Throws
/// ZoneExceededError (carrying m_n at edge_state) when u is out of reach.
SaddlepointResult solve_saddlepoint(const MatrixEnsemble& e, double u,
                                    const TiltOptions& opts = {});

/// Leading-order approximation φ_n(h) e^{-h²/2} (1 - Φ(u)) of P(S_n >= u √B_n).
double saddlepoint_tail(const MatrixEnsemble& e, double u, const TiltOptions& opts = {});

}  // namespace combsum
