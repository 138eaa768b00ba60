#include "combsum/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "combsum/error.hpp"
#include "combsum/permanent.hpp"
#include "combsum/stats.hpp"

namespace combsum {

namespace {

// Neumaier summation. Enumeration folds up to n!·|support| tiny masses, and
// a plain running sum drifts by about count·ε.
struct CompensatedSum {
  double sum = 0.0, carry = 0.0;
  void add(double x) noexcept {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

// Sort by value and fold every run of atoms within kAtomTolerance of the
// run's first value into that value.
std::vector<Atom> merge_atoms(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> out;
  out.reserve(atoms.size());
  CompensatedSum run;
  for (const auto& a : atoms) {
    if (!out.empty() && a.value - out.back().value <= kAtomTolerance) {
      run.add(a.prob);
    } else {
      if (!out.empty()) out.back().prob = run.value();
      out.push_back(a);
      run = {};
      run.add(a.prob);
    }
  }
  if (!out.empty()) out.back().prob = run.value();
  return out;
}

std::vector<Atom> atoms_of(const EntryDistribution& d) {
  if (const auto* p = d.get_if<PointMass>()) return {{p->c, 1.0}};
  return d.get_if<FiniteDiscrete>()->atoms;
}

double factorial(std::size_t n) { return std::tgamma(static_cast<double>(n) + 1.0); }

struct EnumerationPlan {
  bool degenerate = true;
  double support_bound = 1.0;  // Π_i max_j |supp(X_ij)|
};

EnumerationPlan plan_enumeration(const MatrixEnsemble& e) {
  const std::size_t n = e.size();
  EnumerationPlan plan;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t widest = 1;
    for (std::size_t j = 0; j < n; ++j) {
      const auto& d = e(i, j);
      if (!d.bounded()) {
        throw GuardError("exact law unavailable: cell (" + std::to_string(i) + ", " +
                         std::to_string(j) + ") is " + d.describe() +
                         "; only point-mass and finite discrete entries can be enumerated");
      }
      if (const auto* f = d.get_if<FiniteDiscrete>()) {
        widest = std::max(widest, f->atoms.size());
        plan.degenerate = plan.degenerate && f->atoms.size() == 1;
      }
    }
    plan.support_bound *= static_cast<double>(widest);
  }
  const std::size_t limit = plan.degenerate ? kMaxEnumerateDegenerate : kMaxEnumerateDiscrete;
  const double cost = factorial(n) * plan.support_bound;
  if (n > limit) {
    std::ostringstream os;
    os << "exact enumeration of n = " << n << " exceeds the guard n <= " << limit << " for "
       << (plan.degenerate ? "degenerate" : "discrete") << " grids (about " << cost
       << " terms)";
    throw GuardError(os.str(), cost);
  }
  if (plan.support_bound > kMaxSupportProduct) {
    std::ostringstream os;
    os << "exact enumeration needs up to " << plan.support_bound
       << " support points per permutation (guard " << kMaxSupportProduct << ")";
    throw GuardError(os.str(), cost);
  }
  return plan;
}

}  // namespace

ExactDistribution ExactDistribution::from_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("exact law needs at least one atom");
  CompensatedSum total;
  for (const auto& a : atoms) {
    if (!(a.prob > 0.0) || !std::isfinite(a.value)) {
      throw std::invalid_argument("exact law atoms need finite values and positive probabilities");
    }
    total.add(a.prob);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw std::invalid_argument("exact law probabilities do not sum to 1");
  }
  return ExactDistribution(merge_atoms(std::move(atoms)));
}

double ExactDistribution::mean() const noexcept {
  double m = 0.0;
  for (const auto& a : support_) m += a.prob * a.value;
  return m;
}

double ExactDistribution::variance() const noexcept {
  const double m = mean();
  double v = 0.0;
  for (const auto& a : support_) v += a.prob * (a.value - m) * (a.value - m);
  return v;
}

ExactDistribution::ExactDistribution(std::vector<Atom> support)
    : support_(std::move(support)), upper_(support_.size() + 1, 0.0) {
  for (std::size_t k = support_.size(); k-- > 0;) upper_[k] = upper_[k + 1] + support_[k].prob;
}

double ExactDistribution::tail(double x) const noexcept {
  const auto it = std::lower_bound(
      support_.begin(), support_.end(), x - kAtomTolerance,
      [](const Atom& a, double v) { return a.value < v; });
  return std::min(upper_[static_cast<std::size_t>(it - support_.begin())], 1.0);
}

std::complex<double> mgf_exact(const MatrixEnsemble& e, std::complex<double> z) {
  const std::size_t n = e.size();
  const std::complex<double> t = z / std::sqrt(b_n(e));
  SquareMatrix<std::complex<double>> a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = entry_mgf(e(i, j), t);
  return permanent(a) / factorial(n);
}

bool enumerable(const MatrixEnsemble& e) noexcept {
  try {
    plan_enumeration(e);
    return true;
  } catch (const GuardError&) {
    return false;
  }
}

ExactDistribution enumerate_law(const MatrixEnsemble& e) {
  const std::size_t n = e.size();
  const EnumerationPlan plan = plan_enumeration(e);
  const double weight = 1.0 / factorial(n);

  SquareMatrix<std::vector<Atom>> cell_atoms(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cell_atoms(i, j) = atoms_of(e(i, j));

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  std::vector<Atom> pool;
  std::vector<Atom> partial, next;
  constexpr std::size_t kCompactAt = std::size_t{1} << 22;
  do {
    if (plan.degenerate) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += cell_atoms(i, perm[i]).front().value;
      pool.push_back({s, weight});
    } else {
      partial.assign(1, Atom{0.0, weight});
      for (std::size_t i = 0; i < n; ++i) {
        const auto& row_atoms = cell_atoms(i, perm[i]);
        next.clear();
        next.reserve(partial.size() * row_atoms.size());
        for (const auto& p : partial)
          for (const auto& a : row_atoms) next.push_back({p.value + a.value, p.prob * a.prob});
        partial = merge_atoms(std::move(next));
        next = {};
      }
      pool.insert(pool.end(), partial.begin(), partial.end());
    }
    if (pool.size() > kCompactAt) pool = merge_atoms(std::move(pool));
  } while (std::next_permutation(perm.begin(), perm.end()));

  return ExactDistribution::from_atoms(std::move(pool));
}

double exact_tail(const MatrixEnsemble& e, double x) { return enumerate_law(e).tail(x); }

}  // namespace combsum
