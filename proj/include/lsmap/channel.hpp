#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lsmap/env.hpp"
#include "lsmap/logodds.hpp"
#include "lsmap/rng.hpp"

namespace lsmap {

/// Empirical elevation-angle LoS probability model, on the percent scale.
/// Angles in degrees.
struct PriorModelParams {
  double a = 120.0;
  double b = 0.0;
  double c = 0.0;
  double d = 24.3;
  double e = 1.229;

  void validate() const {
    if (d <= 0.0) throw std::invalid_argument("prior: d must be positive");
    if (e <= 0.0) throw std::invalid_argument("prior: e must be positive");
    if (a < b) throw std::invalid_argument("prior: requires a >= b");
  }
};

/// Log-distance path loss with class-dependent slope/offset and log-normal
/// shadowing; defaults are the 28 GHz UMa-AV fit at 129 m flight altitude.
struct ChannelParams {
  double alpha_los = -2.20;
  double beta_los = -56.9431;     // dB
  double sigma2_los = 3.9221;     // dB^2 shadowing
  double alpha_nlos = -3.12;
  double beta_nlos = -43.8849;    // dB
  double sigma2_nlos = 6.25;      // dB^2 shadowing
  double sigma2_noise = 0.0;      // dB^2 measurement noise
  double carrier_ghz = 28.0;

  double alpha(int cls) const { return cls ? alpha_los : alpha_nlos; }
  double beta(int cls) const { return cls ? beta_los : beta_nlos; }
  double sigma2(int cls) const { return cls ? sigma2_los : sigma2_nlos; }

  void validate() const {
    if (sigma2_los < 0.0 || sigma2_nlos < 0.0 || sigma2_noise < 0.0)
      throw std::invalid_argument("channel: variances must be >= 0");
    if (!(alpha_los > alpha_nlos))
      throw std::invalid_argument("channel: requires alpha_los > alpha_nlos");
  }
};

/// UMa-AV style parameters at arbitrary carrier/altitude. Shadowing and noise
/// variances keep their defaults.
inline ChannelParams uma_av_params(double carrier_ghz, double uav_height) {
  ChannelParams p;
  p.carrier_ghz = carrier_ghz;
  p.alpha_los = -2.2;
  p.beta_los = -28.0 - 20.0 * std::log10(carrier_ghz);
  p.alpha_nlos = -4.6 + 0.7 * std::log10(uav_height);
  p.beta_nlos = 17.5 - 20.0 * std::log10(40.0 * std::numbers::pi * carrier_ghz / 3.0);
  return p;
}

/// One channel-gain sample taken on the flight plane.
struct Measurement {
  Vec2 location;   // flight-plane coordinates, meters
  double z = 0.0;  // received channel gain, dB
  int index = 0;   // sequence number
};

/// Elevation angle from the flight-plane point to the UAV altitude above the
/// base station, in degrees; 90 directly overhead.
inline double elevation_angle_deg(Vec2 x, const SceneConfig& scene) {
  const double horizontal = distance(x, scene.bs_position);
  if (horizontal == 0.0) return 90.0;
  return std::atan(scene.uav_height / horizontal) * 180.0 / std::numbers::pi;
}

/// Evaluate the empirical prior at x: percent-scale curve over the elevation
/// angle, divided by 100 and clamped away from exact 0/1.
inline double prior_los_probability(Vec2 x, const PriorModelParams& p, const SceneConfig& scene) {
  const double phi = elevation_angle_deg(x, scene);
  const double t = (phi - p.c) / p.d;
  if (t <= 0.0 && p.e != std::floor(p.e))
    throw std::domain_error("prior: elevation angle at or below c with non-integer exponent");
  const double percent = p.a - (p.a - p.b) / (1.0 + std::pow(t, p.e));
  return clamp_probability(percent / 100.0);
}

/// 3D transmitter-receiver distance: GBS antenna to the point at flight altitude.
inline double link_distance(Vec2 x, const SceneConfig& scene) {
  const double dz = scene.uav_height - scene.bs_antenna_height;
  return std::sqrt(squared_distance(x, scene.bs_position) + dz * dz);
}

/// Mean channel gain (dB) of link class cls at 3D distance d meters.
inline double mean_gain_at_distance_db(double d, int cls, const ChannelParams& params) {
  if (d <= 0.0) throw std::domain_error("mean gain: distance must be positive");
  return params.beta(cls) + 10.0 * params.alpha(cls) * std::log10(d);
}

inline double mean_gain_db(Vec2 x, int cls, const ChannelParams& params,
                           const SceneConfig& scene) {
  return mean_gain_at_distance_db(link_distance(x, scene), cls, params);
}

/// Gaussian log-density of a gain sample given the link class; variance is
/// shadowing plus measurement noise.
inline double log_likelihood(double z, Vec2 x, int cls, const ChannelParams& params,
                             const SceneConfig& scene) {
  const double v = params.sigma2_noise + params.sigma2(cls);
  if (v <= 0.0)
    throw std::domain_error("likelihood: zero total variance, density degenerates");
  const double dz = z - mean_gain_db(x, cls, params, scene);
  return -0.5 * std::log(2.0 * std::numbers::pi * v) - dz * dz / (2.0 * v);
}

inline double likelihood(double z, Vec2 x, int cls, const ChannelParams& params,
                         const SceneConfig& scene) {
  return std::exp(log_likelihood(z, x, cls, params, scene));
}

/// Synthesize one measurement: class from the truth raster at x, mean gain
/// plus shadowing and noise draws. Zero-variance terms consume no randomness.
inline Measurement sample_measurement(Vec2 x, const TruthGrid& truth, const ChannelParams& params,
                                      const SceneConfig& scene, RngEngine& rng) {
  const int ix = static_cast<int>(std::floor(x.x / truth.step));
  const int iy = static_cast<int>(std::floor(x.y / truth.step));
  if (ix < 0 || iy < 0 || ix >= truth.width || iy >= truth.height)
    throw std::out_of_range("sample_measurement: location outside the truth raster");
  const int cls = truth.at(ix, iy);
  double z = mean_gain_db(x, cls, params, scene);
  if (params.sigma2(cls) > 0.0) {
    std::normal_distribution<double> shadow(0.0, std::sqrt(params.sigma2(cls)));
    z += shadow(rng);
  }
  if (params.sigma2_noise > 0.0) {
    std::normal_distribution<double> noise(0.0, std::sqrt(params.sigma2_noise));
    z += noise(rng);
  }
  return Measurement{x, z, 0};
}

/// Single-measurement posterior LoS probability at the measured location.
/// Evaluated in log space so widely separated means cannot underflow.
inline double posterior_at_measurement(double z, Vec2 x_n, double prior,
                                       const ChannelParams& params, const SceneConfig& scene) {
  if (!(prior > 0.0 && prior < 1.0))
    throw std::domain_error("posterior: prior must lie strictly inside (0,1)");
  const double a1 = log_likelihood(z, x_n, 1, params, scene) + std::log(prior);
  const double a0 = log_likelihood(z, x_n, 0, params, scene) + std::log1p(-prior);
  return clamp_probability(from_log_odds(a1 - a0));
}

}  // namespace lsmap
