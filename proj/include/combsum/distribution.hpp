#pragma once

// Entry laws with closed-form moments, m.g.f.s and exponential tilts.

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "combsum/rng.hpp"

namespace combsum {

enum class Sign : int { minus = -1, plus = 1 };

inline int to_int(Sign s) noexcept { return static_cast<int>(s); }

struct Atom {
  double value;
  double prob;

  bool operator==(const Atom&) const = default;
};

struct PointMass {
  double c;
  bool operator==(const PointMass&) const = default;
};

struct FiniteDiscrete {
  std::vector<Atom> atoms;
  bool operator==(const FiniteDiscrete&) const = default;
};

/// sign · Exp(rate)
struct SignedExponential {
  double rate;
  Sign sign;
  bool operator==(const SignedExponential&) const = default;
};

/// sign · Gamma(shape, rate)
struct SignedGamma {
  double shape;
  double rate;
  Sign sign;
  bool operator==(const SignedGamma&) const = default;
};

/// log E e^{tX} together with the first two moments of the law tilted by t.
/// Dividing the m.g.f. derivatives by the m.g.f. keeps every field finite
/// far beyond the point where e^{tX} itself overflows.
struct TiltedMoments {
  double log_mgf;
  double mean;           // E X e^{tX} / E e^{tX}
  double second_moment;  // E X² e^{tX} / E e^{tX}
};

/// Law of one matrix entry. Immutable; construct through the factories,
/// which enforce the parameter invariants.
class EntryDistribution {
 public:
  using Law = std::variant<PointMass, FiniteDiscrete, SignedExponential, SignedGamma>;

  static EntryDistribution point_mass(double c);
  /// Atoms are sorted by value and atoms with equal value are merged.
  /// Probabilities must be positive and sum to 1 within 1e-12.
  static EntryDistribution discrete(std::vector<Atom> atoms);
  static EntryDistribution exponential(double rate, Sign sign = Sign::plus);
  static EntryDistribution gamma(double shape, double rate, Sign sign = Sign::plus);

  const Law& law() const noexcept { return law_; }

  template <typename T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&law_);
  }

  /// True for the point-mass and finite-discrete families.
  bool bounded() const noexcept;

  /// Per-family Bernstein scale: max|support| for bounded laws,
  /// max(1, shape)/rate for exponential and Gamma laws.
  double canonical_scale() const noexcept;

  /// Supremum of Re(z) for which E e^{zX} is finite (+inf when entire).
  double mgf_upper_limit() const noexcept;
  /// Infimum of Re(z) for which E e^{zX} is finite (-inf when entire).
  double mgf_lower_limit() const noexcept;

  double mean() const noexcept;
  double variance() const noexcept;

  /// Law of lambda·X for lambda > 0.
  EntryDistribution scaled(double lambda) const;

  double sample(Philox4x64& rng) const noexcept;

  std::string describe() const;

  bool operator==(const EntryDistribution&) const = default;

 private:
  explicit EntryDistribution(Law law) : law_(std::move(law)) {}

  Law law_;
};

/// Largest moment order accepted by the closed forms (k! overflows past 170).
inline constexpr int kMaxMomentOrder = 170;

/// E X^k. Throws MomentRangeError when k > 170 or the value overflows.
double raw_moment(const EntryDistribution& d, int k);

/// E |X|^k for k >= 1.
double abs_moment(const EntryDistribution& d, int k);

/// log |E X^k| (or -inf when the moment vanishes); never overflows.
double log_abs_raw_moment(const EntryDistribution& d, int k);

/// log E |X|^k; never overflows.
double log_abs_moment(const EntryDistribution& d, int k);

/// E e^{zX}. Throws TiltDomainError outside the analyticity domain of the
/// exponential and Gamma families.
std::complex<double> entry_mgf(const EntryDistribution& d, std::complex<double> z);

/// Tilted moments at real t; same domain rules as entry_mgf.
TiltedMoments entry_tilted_moments(const EntryDistribution& d, double t);

/// log E e^{tX} at real t.
double entry_log_mgf(const EntryDistribution& d, double t);

/// Exponentially tilted law with density proportional to e^{hx} d(x).
EntryDistribution tilt_entry(const EntryDistribution& d, double h);

}  // namespace combsum
