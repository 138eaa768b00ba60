#include "combsum/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "combsum/error.hpp"

namespace combsum {

MatrixEnsemble::MatrixEnsemble(SquareMatrix<EntryDistribution> cells, double scale)
    : cells_(std::move(cells)), scale_(scale) {
  if (cells_.size() < 2) throw std::invalid_argument("ensemble size n must be at least 2");
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) {
    throw std::invalid_argument("Bernstein scale M must be finite and strictly positive");
  }
}

bool MatrixEnsemble::bounded() const noexcept {
  return std::all_of(cells_.data().begin(), cells_.data().end(),
                     [](const EntryDistribution& d) { return d.bounded(); });
}

double MatrixEnsemble::canonical_scale() const noexcept {
  double m = 0.0;
  for (const auto& d : cells_.data()) m = std::max(m, d.canonical_scale());
  return m > 0.0 ? m : 1.0;
}

MatrixEnsemble MatrixEnsemble::rescaled(double lambda) const {
  std::vector<EntryDistribution> cells;
  cells.reserve(cells_.data().size());
  for (const auto& d : cells_.data()) cells.push_back(d.scaled(lambda));
  return MatrixEnsemble(SquareMatrix<EntryDistribution>(size(), std::move(cells)), scale_ * lambda);
}

SquareMatrix<double> MatrixEnsemble::mean_matrix() const {
  const std::size_t n = size();
  SquareMatrix<double> mu(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) mu(i, j) = cells_(i, j).mean();
  return mu;
}

CenteringReport check_centering(const MatrixEnsemble& e) {
  const std::size_t n = e.size();
  const auto mu = e.mean_matrix();
  CenteringReport r;
  r.row_residuals.assign(n, 0.0);
  r.column_residuals.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      r.row_residuals[i] += mu(i, j);
      r.column_residuals[j] += mu(i, j);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(r.row_residuals[k]) > r.worst_residual) {
      r.worst_residual = std::abs(r.row_residuals[k]);
      r.worst_location = "row " + std::to_string(k);
    }
    if (std::abs(r.column_residuals[k]) > r.worst_residual) {
      r.worst_residual = std::abs(r.column_residuals[k]);
      r.worst_location = "column " + std::to_string(k);
    }
  }
  r.pass = r.worst_residual <= kCenteringTolerance;
  return r;
}

void require_centered(const MatrixEnsemble& e) {
  const auto report = check_centering(e);
  if (!report.pass) {
    std::ostringstream os;
    os.precision(17);
    os << "ensemble is not centered: " << report.worst_location << " of entry means sums to "
       << report.worst_residual << " (tolerance " << kCenteringTolerance << ")";
    throw CenteringError(os.str(), report.worst_location, report.worst_residual);
  }
}

BernsteinReport check_bernstein(const MatrixEnsemble& e, double D, int K) {
  if (K < 3) throw std::invalid_argument("Bernstein check needs K >= 3");
  if (K > kMaxMomentOrder) throw std::invalid_argument("Bernstein check needs K <= 170");
  if (!(D > 0.0)) throw std::invalid_argument("Bernstein constant D must be positive");

  BernsteinReport r;
  r.D = D;
  r.K = K;
  const double log_m = std::log(e.scale());
  const std::size_t n = e.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& d = e(i, j);
      bool skipped = false;
      for (int s = 1; s <= 3; ++s) {
        const double log_abs_s = log_abs_moment(d, s);
        if (log_abs_s == -std::numeric_limits<double>::infinity()) {
          skipped = true;
          continue;
        }
        for (int k = s; k <= K; ++k) {
          const double log_raw = log_abs_raw_moment(d, k);
          if (log_raw == -std::numeric_limits<double>::infinity()) continue;
          const double ratio =
              std::exp(log_raw - std::lgamma(k + 1.0) - (k - s) * log_m - log_abs_s);
          if (ratio > r.max_ratio) {
            r.max_ratio = ratio;
            r.worst_row = i;
            r.worst_col = j;
            r.worst_s = s;
            r.worst_k = k;
          }
        }
      }
      if (skipped) ++r.skipped_cells;
    }
  }
  r.minimal_D = r.max_ratio;
  // Ratios are formed in log space; allow a few ulps when the bound is attained.
  r.pass = r.max_ratio <= D * (1.0 + 1e-12);
  return r;
}

namespace {

MatrixEnsemble finish(SquareMatrix<EntryDistribution> cells, std::optional<double> scale,
                      Centering centering) {
  MatrixEnsemble probe(cells, 1.0);
  const double m = scale ? *scale : probe.canonical_scale();
  MatrixEnsemble e(std::move(cells), m);
  if (centering == Centering::require) require_centered(e);
  return e;
}

}  // namespace

MatrixEnsemble make_degenerate(const SquareMatrix<double>& grid, std::optional<double> scale,
                               Centering centering) {
  std::vector<EntryDistribution> cells;
  cells.reserve(grid.data().size());
  for (double c : grid.data()) cells.push_back(EntryDistribution::point_mass(c));
  return finish(SquareMatrix<EntryDistribution>(grid.size(), std::move(cells)), scale, centering);
}

MatrixEnsemble make_checkerboard_exponential(std::size_t n, double rate) {
  if (n < 2 || n % 2 != 0) {
    throw std::invalid_argument("checkerboard ensemble needs an even n >= 2, got " +
                                std::to_string(n));
  }
  std::vector<EntryDistribution> cells;
  cells.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      cells.push_back(EntryDistribution::exponential(rate, (i + j) % 2 == 0 ? Sign::plus : Sign::minus));
  return finish(SquareMatrix<EntryDistribution>(n, std::move(cells)), std::nullopt,
                Centering::require);
}

MatrixEnsemble make_k_sequence(const std::vector<EntryDistribution>& palette,
                               const SquareMatrix<int>& assignment, std::optional<double> scale,
                               Centering centering) {
  if (palette.empty()) throw std::invalid_argument("k-sequence palette is empty");
  std::vector<EntryDistribution> cells;
  cells.reserve(assignment.data().size());
  for (int idx : assignment.data()) {
    if (idx < 0 || static_cast<std::size_t>(idx) >= palette.size()) {
      throw std::invalid_argument("k-sequence assignment index " + std::to_string(idx) +
                                  " outside palette of size " + std::to_string(palette.size()));
    }
    cells.push_back(palette[static_cast<std::size_t>(idx)]);
  }
  return finish(SquareMatrix<EntryDistribution>(assignment.size(), std::move(cells)), scale,
                centering);
}

MatrixEnsemble make_rademacher(const SquareMatrix<double>& means,
                               const SquareMatrix<double>& amplitudes, std::optional<double> scale,
                               Centering centering) {
  if (means.size() != amplitudes.size()) {
    throw std::invalid_argument("means and amplitudes grids differ in size");
  }
  std::vector<EntryDistribution> cells;
  cells.reserve(means.data().size());
  for (std::size_t k = 0; k < means.data().size(); ++k) {
    const double c = means.data()[k];
    const double a = amplitudes.data()[k];
    if (!(a >= 0.0)) throw std::invalid_argument("amplitudes must be non-negative");
    cells.push_back(a == 0.0 ? EntryDistribution::point_mass(c)
                             : EntryDistribution::discrete({{c - a, 0.5}, {c + a, 0.5}}));
  }
  return finish(SquareMatrix<EntryDistribution>(means.size(), std::move(cells)), scale, centering);
}

MatrixEnsemble make_row_constant(const std::vector<EntryDistribution>& row_laws,
                                 std::optional<double> scale, Centering centering) {
  const std::size_t n = row_laws.size();
  if (n < 2) throw std::invalid_argument("ensemble size n must be at least 2");
  std::vector<EntryDistribution> cells;
  cells.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cells.push_back(row_laws[i]);
  return finish(SquareMatrix<EntryDistribution>(n, std::move(cells)), scale, centering);
}

MatrixEnsemble make_grid(SquareMatrix<EntryDistribution> cells, std::optional<double> scale,
                         Centering centering) {
  return finish(std::move(cells), scale, centering);
}

SquareMatrix<double> double_center(SquareMatrix<double> grid) {
  const std::size_t n = grid.size();
  std::vector<double> row(n, 0.0), col(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      row[i] += grid(i, j);
      col[j] += grid(i, j);
      total += grid(i, j);
    }
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      grid(i, j) = grid(i, j) - row[i] / dn - col[j] / dn + total / (dn * dn);
  return grid;
}

namespace {

double uniform(Philox4x64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

SquareMatrix<double> random_centered_grid(std::size_t n, Philox4x64& rng, double magnitude) {
  SquareMatrix<double> g(n);
  for (auto& v : g.data()) v = uniform(rng, -magnitude, magnitude);
  return double_center(std::move(g));
}

// Two or three atoms with mean exactly `center` up to rounding.
EntryDistribution random_noise_law(double center, Philox4x64& rng) {
  const std::size_t k = 2 + uniform_index(rng, 2);
  std::vector<Atom> atoms(k);
  double total = 0.0;
  for (auto& a : atoms) {
    a.value = uniform(rng, -1.0, 1.0);
    a.prob = uniform(rng, 0.2, 1.0);
    total += a.prob;
  }
  double mean = 0.0;
  for (auto& a : atoms) {
    a.prob /= total;
    mean += a.prob * a.value;
  }
  for (auto& a : atoms) a.value += center - mean;
  return EntryDistribution::discrete(std::move(atoms));
}

}  // namespace

MatrixEnsemble random_degenerate(std::size_t n, Philox4x64& rng) {
  return make_degenerate(random_centered_grid(n, rng, 1.0));
}

MatrixEnsemble random_discrete(std::size_t n, Philox4x64& rng) {
  const auto means = random_centered_grid(n, rng, 1.0);
  std::vector<EntryDistribution> cells;
  cells.reserve(n * n);
  for (double c : means.data()) cells.push_back(random_noise_law(c, rng));
  return make_grid(SquareMatrix<EntryDistribution>(n, std::move(cells)));
}

MatrixEnsemble random_ensemble(std::size_t n, Philox4x64& rng) {
  const double lambda = std::exp(uniform(rng, -3.0, 3.0));
  switch (uniform_index(rng, 4)) {
    case 0:
      return random_degenerate(n, rng).rescaled(lambda);
    case 1:
      return random_discrete(n, rng).rescaled(lambda);
    case 2:
      if (n % 2 == 0) return make_checkerboard_exponential(n, uniform(rng, 0.2, 5.0));
      [[fallthrough]];
    default: {
      // Cyclic Latin square: every row and column holds each symbol once.
      // Symbols come in sign-flipped pairs; odd n adds one zero-mean symbol.
      std::vector<EntryDistribution> palette;
      for (std::size_t p = 0; p + 1 < n; p += 2) {
        const double rate = uniform(rng, 0.3, 4.0);
        const double shape = uniform(rng, 0.3, 4.0);
        const bool gamma = uniform_index(rng, 2) == 1;
        for (Sign s : {Sign::plus, Sign::minus}) {
          palette.push_back(gamma ? EntryDistribution::gamma(shape, rate, s)
                                  : EntryDistribution::exponential(rate, s));
        }
      }
      if (n % 2 == 1) {
        const double a = uniform(rng, 0.1, 2.0);
        palette.push_back(EntryDistribution::discrete({{-a, 0.5}, {a, 0.5}}));
      }
      SquareMatrix<int> assignment(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) assignment(i, j) = static_cast<int>((i + j) % n);
      return make_k_sequence(palette, assignment).rescaled(lambda);
    }
  }
}

}  // namespace combsum
