#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lsmap {

struct CorrelationConfig {
  double beta = 1.0;                       // angular decorrelation rate
  double phi_th = std::numbers::pi / 9.0;  // radians; beyond this, no coupling

  void validate() const {
    if (beta <= 0.0) throw std::invalid_argument("correlation: beta must be positive");
    if (!(phi_th > 0.0 && phi_th <= std::numbers::pi))
      throw std::invalid_argument("correlation: phi_th must lie in (0, pi]");
  }
};

/// Conditional link-state probabilities r_ij = Pr(l(x)=i | l(x_n)=j).
/// Columns are stochastic: r_1j + r_0j = 1.
struct CorrelationMatrix {
  double r11 = 1.0;
  double r10 = 0.0;
  double r01 = 0.0;
  double r00 = 1.0;
};

/// Wrap an absolute azimuth difference into [0, pi].
inline double wrap_angle_difference(double a, double b) {
  double d = std::abs(a - b);
  d = std::fmod(d, 2.0 * std::numbers::pi);
  return std::min(d, 2.0 * std::numbers::pi - d);
}

/// Exponential angular correlation of the LoS state: 1 at zero separation,
/// exactly 0 at pi, strictly decreasing in between; larger beta decays slower.
inline double angular_rho(double delta_phi, double beta) {
  if (delta_phi < 0.0 || delta_phi > std::numbers::pi)
    throw std::domain_error("angular_rho: separation must lie in [0, pi]");
  if (delta_phi == 0.0) return 1.0;
  return 1.0 - std::exp(beta * (1.0 - std::numbers::pi / delta_phi));
}

/// Correlation of two locations on one azimuth ray. The blocking geometry
/// pins one diagonal entry to 1 (LoS propagates inward, NLoS outward); the
/// other follows from the prior-marginal identity
///   r11*Pr(l(x_n)=1) + r10*Pr(l(x_n)=0) = Pr(l(x)=1).
inline CorrelationMatrix same_azimuth_correlation(double prior_x, double prior_xn, double r,
                                                  double r_n) {
  if (!(prior_x > 0.0 && prior_x < 1.0 && prior_xn > 0.0 && prior_xn < 1.0))
    throw std::domain_error("same_azimuth_correlation: priors must lie in (0,1)");
  CorrelationMatrix m;
  if (r < r_n) {
    m.r11 = 1.0;
    m.r00 = std::clamp((1.0 - prior_x) / (1.0 - prior_xn), 0.0, 1.0);
  } else {
    m.r00 = 1.0;
    m.r11 = std::clamp(prior_x / prior_xn, 0.0, 1.0);
  }
  m.r01 = 1.0 - m.r11;
  m.r10 = 1.0 - m.r00;
  return m;
}

/// Correlation of two locations at the same radius on different azimuths,
/// parameterized by the phi coefficient rho. Entries are clamped to [0,1] and
/// columns renormalized, which preserves stochasticity when rho and skewed
/// priors push the raw values out of range.
inline CorrelationMatrix same_distance_correlation(double prior_x, double prior_xn, double rho) {
  if (!(prior_x > 0.0 && prior_x < 1.0 && prior_xn > 0.0 && prior_xn < 1.0))
    throw std::domain_error("same_distance_correlation: priors must lie in (0,1)");
  if (rho < 0.0 || rho > 1.0)
    throw std::domain_error("same_distance_correlation: rho must lie in [0,1]");
  const double t = std::sqrt(prior_xn * (1.0 - prior_xn) / (prior_x * (1.0 - prior_x)));
  const double s = rho / t;
  CorrelationMatrix m;
  m.r11 = prior_x + s * (1.0 - prior_xn);
  m.r01 = (1.0 - prior_x) - s * (1.0 - prior_xn);
  m.r00 = (1.0 - prior_x) + s * prior_xn;
  m.r10 = prior_x - s * prior_xn;
  auto fix_column = [](double& r1, double& r0) {
    r1 = std::clamp(r1, 0.0, 1.0);
    r0 = std::clamp(r0, 0.0, 1.0);
    const double sum = r1 + r0;
    if (sum != 1.0 && sum > 0.0) {
      r1 /= sum;
      r0 /= sum;
    }
  };
  fix_column(m.r11, m.r01);
  fix_column(m.r10, m.r00);
  return m;
}

/// Phi coefficient of a 2x2 joint distribution p_ij = Pr(l(x)=i, l(x_n)=j).
inline double phi_coefficient(double p11, double p10, double p01, double p00) {
  if (p11 < 0.0 || p10 < 0.0 || p01 < 0.0 || p00 < 0.0)
    throw std::domain_error("phi_coefficient: joints must be non-negative");
  if (std::abs(p11 + p10 + p01 + p00 - 1.0) > 1e-9)
    throw std::domain_error("phi_coefficient: joints must sum to 1");
  const double m1x = p11 + p10;  // Pr(l(x)=1)
  const double m0x = p01 + p00;
  const double m1n = p11 + p01;  // Pr(l(x_n)=1)
  const double m0n = p10 + p00;
  if (m1x <= 0.0 || m0x <= 0.0 || m1n <= 0.0 || m0n <= 0.0)
    throw std::domain_error("phi_coefficient: degenerate marginal");
  return (p11 * p00 - p10 * p01) / std::sqrt(m1x * m0x * m1n * m0n);
}

}  // namespace lsmap
