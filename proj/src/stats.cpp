#include "combsum/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "combsum/error.hpp"

namespace combsum {

namespace {

double second_moment_sum(const MatrixEnsemble& e) {
  double total = 0.0;
  for (const auto& d : e.cells().data()) total += raw_moment(d, 2);
  return total;
}

}  // namespace

double b_n(const MatrixEnsemble& e) {
  const double b = second_moment_sum(e) / static_cast<double>(e.size());
  if (!(b > 0.0)) {
    throw DegenerateEnsembleError("B_n = 0: every entry is the point mass at zero");
  }
  return b;
}

double var_S(const MatrixEnsemble& e) {
  const double n = static_cast<double>(e.size());
  double mean_square = 0.0;
  for (const auto& d : e.cells().data()) mean_square += d.mean() * d.mean();
  return second_moment_sum(e) / n + mean_square / (n * (n - 1.0));
}

MomentSummary gamma_n(const MatrixEnsemble& e, double slack) {
  if (!(slack > 0.0 && slack <= 1.0)) throw std::invalid_argument("slack must lie in (0, 1]");
  const std::size_t n = e.size();
  const double dn = static_cast<double>(n);
  const double b = b_n(e);

  MomentSummary s;
  s.n = n;
  s.B_n = b;
  s.var_S = var_S(e);

  std::vector<double> row(n, 0.0), col(n, 0.0);
  double max_abs_mean = 0.0;
  double third = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& d = e(i, j);
      const double m2 = raw_moment(d, 2);
      row[i] += m2;
      col[j] += m2;
      max_abs_mean = std::max(max_abs_mean, abs_moment(d, 1));
      third += abs_moment(d, 3);
    }
  }
  s.gamma_terms[0] = std::sqrt(dn / b) * max_abs_mean;
  s.gamma_terms[1] = *std::max_element(row.begin(), row.end()) / b;
  s.gamma_terms[2] = *std::max_element(col.begin(), col.end()) / b;
  s.gamma_terms[3] = third / (std::sqrt(dn) * b * std::sqrt(b));
  // The largest row (column) energy is at least the mean one, i.e. the ratio
  // is >= 1; rounding in B_n can leave it a few ulps short.
  for (int t = 1; t <= 2; ++t) {
    if (s.gamma_terms[t] < 1.0 && s.gamma_terms[t] > 1.0 - 1e-12) s.gamma_terms[t] = 1.0;
  }
  s.gamma_n = *std::max_element(s.gamma_terms.begin(), s.gamma_terms.end());
  s.zone_u_max =
      slack * std::min(std::cbrt(std::sqrt(dn) / s.gamma_n), std::sqrt(b) / e.scale());
  return s;
}

double zone_u_max(const MatrixEnsemble& e, double slack) { return gamma_n(e, slack).zone_u_max; }

}  // namespace combsum
