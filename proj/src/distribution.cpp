#include "combsum/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "combsum/error.hpp"

namespace combsum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbSumTolerance = 1e-12;

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument(std::string(what) + " must be finite and strictly positive");
  }
}

void require_order(int k) {
  if (k < 0) throw std::invalid_argument("moment order must be non-negative");
  if (k > kMaxMomentOrder) {
    throw MomentRangeError("moment order " + std::to_string(k) + " exceeds " +
                           std::to_string(kMaxMomentOrder));
  }
}

double checked(double value, int k) {
  if (!std::isfinite(value)) {
    throw MomentRangeError("moment of order " + std::to_string(k) + " overflows double");
  }
  return value;
}

// Domain test shared by the exponential and Gamma families: E e^{zX} with
// X = sign·Y, Y ~ Gamma(shape, rate), is finite iff Re(sign·z) < rate.
void require_in_domain(double re_signed_z, double rate) {
  if (!(re_signed_z < rate)) {
    std::ostringstream os;
    os << "m.g.f. argument outside the analyticity domain (Re(sign*z) = " << re_signed_z
       << " must be below rate " << rate << ")";
    throw TiltDomainError(os.str(), rate);
  }
}

// log Σ p_k e^{t x_k}, plus the tilted first and second moments.
TiltedMoments discrete_tilted_moments(const FiniteDiscrete& d, double t) {
  double top = -kInf;
  for (const auto& a : d.atoms) top = std::max(top, std::log(a.prob) + t * a.value);
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (const auto& a : d.atoms) {
    const double w = std::exp(std::log(a.prob) + t * a.value - top);
    z += w;
    m1 += w * a.value;
    m2 += w * a.value * a.value;
  }
  return {top + std::log(z), m1 / z, m2 / z};
}

}  // namespace

EntryDistribution EntryDistribution::point_mass(double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("point mass location must be finite");
  return EntryDistribution(PointMass{c});
}

EntryDistribution EntryDistribution::discrete(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("discrete law needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!std::isfinite(a.value)) throw std::invalid_argument("atom values must be finite");
    if (!(a.prob > 0.0)) throw std::invalid_argument("atom probabilities must be positive");
    total += a.prob;
  }
  if (std::abs(total - 1.0) > kProbSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "atom probabilities sum to " << total << ", not 1";
    throw std::invalid_argument(os.str());
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && merged.back().value == a.value) {
      merged.back().prob += a.prob;
    } else {
      merged.push_back(a);
    }
  }
  return EntryDistribution(FiniteDiscrete{std::move(merged)});
}

EntryDistribution EntryDistribution::exponential(double rate, Sign sign) {
  require_positive(rate, "rate");
  return EntryDistribution(SignedExponential{rate, sign});
}

EntryDistribution EntryDistribution::gamma(double shape, double rate, Sign sign) {
  require_positive(shape, "shape");
  require_positive(rate, "rate");
  return EntryDistribution(SignedGamma{shape, rate, sign});
}

bool EntryDistribution::bounded() const noexcept {
  return std::holds_alternative<PointMass>(law_) || std::holds_alternative<FiniteDiscrete>(law_);
}

double EntryDistribution::canonical_scale() const noexcept {
  return std::visit(Overloaded{
                        [](const PointMass& p) { return std::abs(p.c); },
                        [](const FiniteDiscrete& d) {
                          double m = 0.0;
                          for (const auto& a : d.atoms) m = std::max(m, std::abs(a.value));
                          return m;
                        },
                        [](const SignedExponential& e) { return 1.0 / e.rate; },
                        [](const SignedGamma& g) { return std::max(1.0, g.shape) / g.rate; },
                    },
                    law_);
}

double EntryDistribution::mgf_upper_limit() const noexcept {
  return std::visit(Overloaded{
                        [](const SignedExponential& e) { return e.sign == Sign::plus ? e.rate : kInf; },
                        [](const SignedGamma& g) { return g.sign == Sign::plus ? g.rate : kInf; },
                        [](const auto&) { return kInf; },
                    },
                    law_);
}

double EntryDistribution::mgf_lower_limit() const noexcept {
  return std::visit(Overloaded{
                        [](const SignedExponential& e) { return e.sign == Sign::minus ? -e.rate : -kInf; },
                        [](const SignedGamma& g) { return g.sign == Sign::minus ? -g.rate : -kInf; },
                        [](const auto&) { return -kInf; },
                    },
                    law_);
}

double EntryDistribution::mean() const noexcept {
  return std::visit(Overloaded{
                        [](const PointMass& p) { return p.c; },
                        [](const FiniteDiscrete& d) {
                          double m = 0.0;
                          for (const auto& a : d.atoms) m += a.prob * a.value;
                          return m;
                        },
                        [](const SignedExponential& e) { return to_int(e.sign) / e.rate; },
                        [](const SignedGamma& g) { return to_int(g.sign) * g.shape / g.rate; },
                    },
                    law_);
}

double EntryDistribution::variance() const noexcept {
  return std::visit(Overloaded{
                        [](const PointMass&) { return 0.0; },
                        [this](const FiniteDiscrete& d) {
                          const double mu = mean();
                          double v = 0.0;
                          for (const auto& a : d.atoms) v += a.prob * (a.value - mu) * (a.value - mu);
                          return v;
                        },
                        [](const SignedExponential& e) { return 1.0 / (e.rate * e.rate); },
                        [](const SignedGamma& g) { return g.shape / (g.rate * g.rate); },
                    },
                    law_);
}

EntryDistribution EntryDistribution::scaled(double lambda) const {
  require_positive(lambda, "scale factor");
  return std::visit(Overloaded{
                        [&](const PointMass& p) { return point_mass(lambda * p.c); },
                        [&](const FiniteDiscrete& d) {
                          auto atoms = d.atoms;
                          for (auto& a : atoms) a.value *= lambda;
                          return EntryDistribution(FiniteDiscrete{std::move(atoms)});
                        },
                        [&](const SignedExponential& e) { return exponential(e.rate / lambda, e.sign); },
                        [&](const SignedGamma& g) { return gamma(g.shape, g.rate / lambda, g.sign); },
                    },
                    law_);
}

double EntryDistribution::sample(Philox4x64& rng) const noexcept {
  return std::visit(Overloaded{
                        [](const PointMass& p) { return p.c; },
                        [&](const FiniteDiscrete& d) {
                          if (d.atoms.size() == 1) return d.atoms.front().value;
                          const double u = uniform01(rng);
                          double cumulative = 0.0;
                          for (const auto& a : d.atoms) {
                            cumulative += a.prob;
                            if (u < cumulative) return a.value;
                          }
                          return d.atoms.back().value;
                        },
                        [&](const SignedExponential& e) {
                          return to_int(e.sign) * standard_exponential(rng) / e.rate;
                        },
                        [&](const SignedGamma& g) {
                          return to_int(g.sign) * standard_gamma(rng, g.shape) / g.rate;
                        },
                    },
                    law_);
}

std::string EntryDistribution::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const PointMass& p) { os << "point(" << p.c << ")"; },
                 [&](const FiniteDiscrete& d) {
                   os << "discrete{";
                   for (std::size_t k = 0; k < d.atoms.size(); ++k) {
                     if (k) os << ", ";
                     os << "(" << d.atoms[k].value << ", " << d.atoms[k].prob << ")";
                   }
                   os << "}";
                 },
                 [&](const SignedExponential& e) {
                   os << (e.sign == Sign::plus ? "+" : "-") << "exp(rate=" << e.rate << ")";
                 },
                 [&](const SignedGamma& g) {
                   os << (g.sign == Sign::plus ? "+" : "-") << "gamma(shape=" << g.shape
                      << ", rate=" << g.rate << ")";
                 },
             },
             law_);
  return os.str();
}

double raw_moment(const EntryDistribution& d, int k) {
  require_order(k);
  const double value = std::visit(
      Overloaded{
          [&](const PointMass& p) { return std::pow(p.c, k); },
          [&](const FiniteDiscrete& f) {
            double s = 0.0;
            for (const auto& a : f.atoms) s += a.prob * std::pow(a.value, k);
            return s;
          },
          [&](const SignedExponential& e) {
            // k! / rate^k
            double m = 1.0;
            for (int i = 1; i <= k; ++i) m *= i / e.rate;
            return (e.sign == Sign::minus && k % 2 == 1) ? -m : m;
          },
          [&](const SignedGamma& g) {
            // Γ(shape + k) / (Γ(shape) rate^k)
            double m = 1.0;
            for (int i = 0; i < k; ++i) m *= (g.shape + i) / g.rate;
            return (g.sign == Sign::minus && k % 2 == 1) ? -m : m;
          },
      },
      d.law());
  return checked(value, k);
}

double abs_moment(const EntryDistribution& d, int k) {
  if (k < 1) throw std::invalid_argument("absolute moment order must be at least 1");
  require_order(k);
  const double value = std::visit(
      Overloaded{
          [&](const PointMass& p) { return std::pow(std::abs(p.c), k); },
          [&](const FiniteDiscrete& f) {
            double s = 0.0;
            for (const auto& a : f.atoms) s += a.prob * std::pow(std::abs(a.value), k);
            return s;
          },
          [&](const auto&) { return std::abs(raw_moment(d, k)); },
      },
      d.law());
  return checked(value, k);
}

namespace {

// log |Σ p_k v_k^j| evaluated as j·log max|v| + log|Σ p_k (v_k/max)^j|.
double log_abs_discrete_moment(const FiniteDiscrete& f, int k, bool absolute) {
  double top = 0.0;
  for (const auto& a : f.atoms) top = std::max(top, std::abs(a.value));
  if (top == 0.0) return k == 0 ? 0.0 : -kInf;
  double s = 0.0;
  for (const auto& a : f.atoms) {
    const double x = (absolute ? std::abs(a.value) : a.value) / top;
    s += a.prob * std::pow(x, k);
  }
  if (s == 0.0) return -kInf;
  return k * std::log(top) + std::log(std::abs(s));
}

double log_unsigned_gamma_moment(double shape, double rate, int k) {
  return std::lgamma(shape + k) - std::lgamma(shape) - k * std::log(rate);
}

}  // namespace

double log_abs_raw_moment(const EntryDistribution& d, int k) {
  require_order(k);
  return std::visit(Overloaded{
                        [&](const PointMass& p) {
                          if (k == 0) return 0.0;
                          return p.c == 0.0 ? -kInf : k * std::log(std::abs(p.c));
                        },
                        [&](const FiniteDiscrete& f) { return log_abs_discrete_moment(f, k, false); },
                        [&](const SignedExponential& e) { return log_unsigned_gamma_moment(1.0, e.rate, k); },
                        [&](const SignedGamma& g) { return log_unsigned_gamma_moment(g.shape, g.rate, k); },
                    },
                    d.law());
}

double log_abs_moment(const EntryDistribution& d, int k) {
  if (k < 1) throw std::invalid_argument("absolute moment order must be at least 1");
  if (const auto* f = d.get_if<FiniteDiscrete>()) return log_abs_discrete_moment(*f, k, true);
  return log_abs_raw_moment(d, k);
}

std::complex<double> entry_mgf(const EntryDistribution& d, std::complex<double> z) {
  using C = std::complex<double>;
  return std::visit(Overloaded{
                        [&](const PointMass& p) { return std::exp(z * p.c); },
                        [&](const FiniteDiscrete& f) {
                          C s = 0.0;
                          for (const auto& a : f.atoms) s += a.prob * std::exp(z * a.value);
                          return s;
                        },
                        [&](const SignedExponential& e) {
                          const C sz = static_cast<double>(to_int(e.sign)) * z;
                          require_in_domain(sz.real(), e.rate);
                          return e.rate / (e.rate - sz);
                        },
                        [&](const SignedGamma& g) {
                          const C sz = static_cast<double>(to_int(g.sign)) * z;
                          require_in_domain(sz.real(), g.rate);
                          // Re(rate - sz) > 0, so the principal log is continuous here.
                          return std::exp(g.shape * (std::log(C(g.rate)) - std::log(g.rate - sz)));
                        },
                    },
                    d.law());
}

TiltedMoments entry_tilted_moments(const EntryDistribution& d, double t) {
  return std::visit(Overloaded{
                        [&](const PointMass& p) { return TiltedMoments{t * p.c, p.c, p.c * p.c}; },
                        [&](const FiniteDiscrete& f) { return discrete_tilted_moments(f, t); },
                        [&](const SignedExponential& e) {
                          const int s = to_int(e.sign);
                          require_in_domain(s * t, e.rate);
                          const double q = e.rate - s * t;
                          return TiltedMoments{std::log(e.rate / q), s / q, 2.0 / (q * q)};
                        },
                        [&](const SignedGamma& g) {
                          const int s = to_int(g.sign);
                          require_in_domain(s * t, g.rate);
                          const double q = g.rate - s * t;
                          return TiltedMoments{g.shape * std::log(g.rate / q), s * g.shape / q,
                                               g.shape * (g.shape + 1.0) / (q * q)};
                        },
                    },
                    d.law());
}

double entry_log_mgf(const EntryDistribution& d, double t) {
  return entry_tilted_moments(d, t).log_mgf;
}

EntryDistribution tilt_entry(const EntryDistribution& d, double h) {
  if (!std::isfinite(h)) throw std::invalid_argument("tilt parameter must be finite");
  return std::visit(Overloaded{
                        [&](const PointMass&) { return d; },
                        [&](const FiniteDiscrete& f) {
                          const double log_norm = discrete_tilted_moments(f, h).log_mgf;
                          std::vector<Atom> atoms;
                          atoms.reserve(f.atoms.size());
                          for (const auto& a : f.atoms) {
                            const double p = std::exp(std::log(a.prob) + h * a.value - log_norm);
                            if (p > 0.0) atoms.push_back({a.value, p});
                          }
                          // Renormalize so that dropping underflowed atoms keeps sum == 1.
                          double total = 0.0;
                          for (const auto& a : atoms) total += a.prob;
                          for (auto& a : atoms) a.prob /= total;
                          return EntryDistribution::discrete(std::move(atoms));
                        },
                        [&](const SignedExponential& e) {
                          const int s = to_int(e.sign);
                          require_in_domain(s * h, e.rate);
                          return EntryDistribution::exponential(e.rate - s * h, e.sign);
                        },
                        [&](const SignedGamma& g) {
                          const int s = to_int(g.sign);
                          require_in_domain(s * h, g.rate);
                          return EntryDistribution::gamma(g.shape, g.rate - s * h, g.sign);
                        },
                    },
                    d.law());
}

}  // namespace combsum
