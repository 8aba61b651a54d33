#pragma once

#include <algorithm>
#include <cmath>

namespace lsmap {

/// Saturation bound of the log-odds state. Keeps probabilities distinguishable
/// from exact 0/1 while leaving ample headroom for accumulated evidence.
inline constexpr double kLogOddsMax = 50.0;

/// Probability clamp applied wherever exact 0/1 would break odds ratios.
inline constexpr double kProbEpsilon = 1e-6;

inline double clamp_probability(double p) {
  return std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
}

inline double clamp_log_odds(double l) { return std::clamp(l, -kLogOddsMax, kLogOddsMax); }

/// ln(p / (1-p)), saturated at +/-kLogOddsMax.
inline double to_log_odds(double p) {
  if (p <= 0.0) return -kLogOddsMax;
  if (p >= 1.0) return kLogOddsMax;
  return clamp_log_odds(std::log(p) - std::log1p(-p));
}

/// Logistic inverse of to_log_odds.
inline double from_log_odds(double l) {
  if (l >= 0.0) return 1.0 / (1.0 + std::exp(-l));
  const double e = std::exp(l);
  return e / (1.0 + e);
}

}  // namespace lsmap
