#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace combsum {

/// Base class for every library error that signals a violated guard or
/// domain condition (as opposed to a malformed argument, which is reported
/// through std::invalid_argument).
class Error : public std::runtime_error {
 public:
  Error(std::string reason, const std::string& what)
      : std::runtime_error(what), reason_(std::move(reason)) {}

  /// Short machine-readable tag, e.g. "tilt-domain" or "zone-exceeded".
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

/// A m.g.f. argument left the analyticity domain of an entry law.
class TiltDomainError : public Error {
 public:
  TiltDomainError(const std::string& what, double max_abs_z)
      : Error("tilt-domain", what), max_abs_z_(max_abs_z) {}

  /// Largest admissible |z| (real part bound) for the offending law.
  double max_abs_z() const noexcept { return max_abs_z_; }

 private:
  double max_abs_z_;
};

class DegenerateEnsembleError : public Error {
 public:
  explicit DegenerateEnsembleError(const std::string& what)
      : Error("degenerate-ensemble", what) {}
};

/// Row or column means do not sum to zero.
class CenteringError : public Error {
 public:
  CenteringError(const std::string& what, std::string location, double residual)
      : Error("centering", what), location_(std::move(location)), residual_(residual) {}

  const std::string& location() const noexcept { return location_; }
  double residual() const noexcept { return residual_; }

 private:
  std::string location_;
  double residual_;
};

/// A feasibility guard (matrix size, enumeration budget, sample count) was hit.
class GuardError : public Error {
 public:
  GuardError(const std::string& what,
             double cost_estimate = std::numeric_limits<double>::quiet_NaN())
      : Error("guard", what), cost_estimate_(cost_estimate) {}

  double cost_estimate() const noexcept { return cost_estimate_; }

 private:
  double cost_estimate_;
};

/// The saddlepoint equation m_n(h) = u has no root inside the tilt domain.
class ZoneExceededError : public Error {
 public:
  ZoneExceededError(const std::string& what, double reachable_u)
      : Error("zone-exceeded", what), reachable_u_(reachable_u) {}

  /// m_n evaluated at the edge of the admissible tilt range.
  double reachable_u() const noexcept { return reachable_u_; }

 private:
  double reachable_u_;
};

class NumericalDegeneracyError : public Error {
 public:
  explicit NumericalDegeneracyError(const std::string& what)
      : Error("numerical-degeneracy", what) {}
};

/// A closed-form moment overflowed double precision.
class MomentRangeError : public Error {
 public:
  explicit MomentRangeError(const std::string& what) : Error("range", what) {}
};

}  // namespace combsum
