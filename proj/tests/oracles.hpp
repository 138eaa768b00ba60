#pragma once

// Brute-force reference computations shared by the tests. Everything here
// is deliberately naive: permutations are walked one by one and laws are
// kept as flat outcome lists.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "combsum/distribution.hpp"
#include "combsum/ensemble.hpp"
#include "combsum/matrix.hpp"

namespace oracle {

template <typename T>
T naive_permanent(const combsum::SquareMatrix<T>& a) {
  const std::size_t n = a.size();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  T total(0);
  do {
    T prod(1);
    for (std::size_t i = 0; i < n; ++i) prod *= a(i, p[i]);
    total += prod;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

/// A law as an unmerged list of (value, probability) outcomes. Values are
/// kept as computed; nothing is rounded or merged.
struct Outcome {
  double value;
  double prob;
};
using Outcomes = std::vector<Outcome>;

inline Outcomes atoms_of(const combsum::EntryDistribution& d) {
  if (const auto* p = d.get_if<combsum::PointMass>()) return {{p->c, 1.0}};
  Outcomes out;
  for (const auto& a : d.get_if<combsum::FiniteDiscrete>()->atoms) out.push_back({a.value, a.prob});
  return out;
}

inline Outcomes convolve(const Outcomes& a, const Outcomes& b) {
  Outcomes out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back({x.value + y.value, x.prob * y.prob});
  return out;
}

/// Every (permutation, atom combination) of the ensemble with its
/// probability, by walking all n! permutations.
inline Outcomes brute_force_outcomes(const combsum::MatrixEnsemble& e) {
  const std::size_t n = e.size();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  double nfact = 1.0;
  for (std::size_t k = 2; k <= n; ++k) nfact *= static_cast<double>(k);
  Outcomes total;
  do {
    Outcomes s{{0.0, 1.0 / nfact}};
    for (std::size_t i = 0; i < n; ++i) s = convolve(s, atoms_of(e(i, p[i])));
    total.insert(total.end(), s.begin(), s.end());
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

/// P(value >= x - tol) and the mass within tol of x, after one sort.
class TailTable {
 public:
  explicit TailTable(Outcomes o) : o_(std::move(o)) {
    std::sort(o_.begin(), o_.end(), [](const Outcome& a, const Outcome& b) { return a.value < b.value; });
    suffix_.assign(o_.size() + 1, 0.0);
    for (std::size_t k = o_.size(); k-- > 0;) suffix_[k] = suffix_[k + 1] + o_[k].prob;
  }

  double tail(double x, double tol = 1e-9) const { return suffix_[index(x - tol)]; }
  double mass_near(double x, double tol = 1e-9) const {
    return suffix_[index(x - tol)] - suffix_[index_above(x + tol)];
  }

 private:
  std::size_t index(double x) const {
    return static_cast<std::size_t>(
        std::lower_bound(o_.begin(), o_.end(), x,
                         [](const Outcome& a, double v) { return a.value < v; }) -
        o_.begin());
  }
  std::size_t index_above(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(o_.begin(), o_.end(), x,
                         [](double v, const Outcome& a) { return v < a.value; }) -
        o_.begin());
  }

  Outcomes o_;
  std::vector<double> suffix_;
};

inline combsum::MatrixEnsemble grid3() {
  return combsum::make_degenerate(
      combsum::SquareMatrix<double>(3, std::vector<double>{1, -1, 0, -1, 0, 1, 0, 1, -1}));
}

inline combsum::EntryDistribution coin() {
  return combsum::EntryDistribution::discrete({{-1.0, 0.5}, {1.0, 0.5}});
}

}  // namespace oracle
