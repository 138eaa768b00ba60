#pragma once

#include <cmath>
#include <numbers>

namespace combsum {

/// 1 - Φ(u) through erfc, accurate in the far right tail where 1 - cdf
/// would cancel catastrophically.
inline double normal_sf(double u) noexcept { return 0.5 * std::erfc(u / std::numbers::sqrt2); }

inline double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace combsum
