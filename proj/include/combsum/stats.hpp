#pragma once

#include <array>
#include <cstddef>

#include "combsum/ensemble.hpp"

namespace combsum {

inline constexpr double kDefaultZoneSlack = 0.5;

struct MomentSummary {
  std::size_t n = 0;
  double B_n = 0.0;
  double var_S = 0.0;
  /// {max scaled mean, max row energy, max column energy, scaled third-moment sum}
  std::array<double, 4> gamma_terms{};
  double gamma_n = 0.0;
  /// zone_u_max at the slack used to build the summary.
  double zone_u_max = 0.0;
};

/// B_n = (1/n) Σ_ij E X_ij². Throws DegenerateEnsembleError when it vanishes.
double b_n(const MatrixEnsemble& e);

/// Var S_n = (1/n) Σ E X² + Σ (E X)² / (n(n-1)) for a centered ensemble.
double var_S(const MatrixEnsemble& e);

/// The four normalized moment functionals and their maximum γ_n.
/// Row and column energies are taken separately: max_i Σ_j E X_ij² / B_n and
/// max_j Σ_i E X_ij² / B_n.
MomentSummary gamma_n(const MatrixEnsemble& e, double slack = kDefaultZoneSlack);

/// slack · min{(√n/γ_n)^{1/3}, √B_n / M}: a concrete upper edge for the
/// large-deviation grids, slack in (0, 1].
double zone_u_max(const MatrixEnsemble& e, double slack = kDefaultZoneSlack);

}  // namespace combsum
