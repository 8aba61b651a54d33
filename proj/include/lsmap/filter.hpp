#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "lsmap/channel.hpp"
#include "lsmap/correlate.hpp"
#include "lsmap/grid.hpp"
#include "lsmap/logodds.hpp"

namespace lsmap {

/// Counters for the propagation repairs that only fire when a user-supplied
/// prior violates radial monotonicity.
struct PropagationStats {
  std::int64_t negative_branch_clamps = 0;
};

/// One recursive log-odds step: add the measurement's posterior log odds and
/// subtract the prior log odds, saturated at +/-kLogOddsMax.
inline double bayes_update(double l_prev, double ln_k, double l0) {
  return clamp_log_odds(l_prev + ln_k - l0);
}

/// Posterior log odds ln k at the measured location itself.
inline double odds_at_measurement(double z, Vec2 x_n, double prior, const ChannelParams& params,
                                  const SceneConfig& scene) {
  if (!(prior > 0.0 && prior < 1.0))
    throw std::domain_error("odds_at_measurement: prior must lie strictly inside (0,1)");
  const double a1 = log_likelihood(z, x_n, 1, params, scene) + std::log(prior);
  const double a0 = log_likelihood(z, x_n, 0, params, scene) + std::log1p(-prior);
  return clamp_log_odds(a1 - a0);
}

/// Transport the measurement's posterior odds to another radius on the same
/// azimuth using the blocking rule: LoS certainty propagates inward (r < r_n),
/// NLoS certainty outward (r >= r_n). Input and output in log odds.
/// Non-monotone priors can push an intermediate term negative; those are
/// clamped and counted rather than producing NaN.
inline double odds_along_azimuth(double ln_k_n, double prior_x, double prior_xn, double r,
                                 double r_n, PropagationStats* stats = nullptr) {
  if (!(prior_x > 0.0 && prior_x < 1.0 && prior_xn > 0.0 && prior_xn < 1.0))
    throw std::domain_error("odds_along_azimuth: priors must lie strictly inside (0,1)");
  const double k_n = std::exp(clamp_log_odds(ln_k_n));
  const double k_min = std::exp(-kLogOddsMax);
  double k;
  if (r < r_n) {
    double num = k_n * (1.0 - prior_xn) - prior_xn + prior_x;
    if (num <= 0.0) {
      num = k_min;
      if (stats) ++stats->negative_branch_clamps;
    }
    k = num / (1.0 - prior_x);
  } else {
    double den = k_n * (prior_xn - prior_x) + prior_xn;
    if (den <= 0.0) {
      den = k_min;
      if (stats) ++stats->negative_branch_clamps;
    }
    k = k_n * prior_x / den;
  }
  return clamp_log_odds(std::log(k));
}

/// Posterior at an unmeasured direction, pulled toward the nearest measured
/// direction's result at the same radius in proportion to the angular
/// correlation. The short-circuits keep the rho=0 and rho=1 cases exact.
inline double fill_posterior(double prior_x, double prior_star, double posterior_star,
                             double rho) {
  if (rho == 0.0) return prior_x;
  if (rho == 1.0 && prior_x == prior_star) return posterior_star;
  const double t = std::sqrt(prior_star * (1.0 - prior_star) / (prior_x * (1.0 - prior_x)));
  return prior_x + (rho / t) * (posterior_star - prior_star);
}

/// Step 1: fold one measurement into its direction. Every radial sample of the
/// containing bin is updated through the same-azimuth transport; the sample
/// nearest the measurement radius takes the measurement odds directly.
template <class PriorFn>
void step1_update(LogOddsField& field, const Measurement& m, PriorFn&& prior,
                  const ChannelParams& params, const SceneConfig& scene,
                  PropagationStats* stats = nullptr) {
  if (!scene.contains(m.location))
    throw std::out_of_range("step1_update: measurement location outside the site");
  const PolarPoint pol = cartesian_to_polar(m.location, field.spec().origin);
  const int j = field.spec().direction_bin(pol.phi);
  const int count = field.radial_count(j);
  if (count == 0) return;
  const double prior_n = clamp_probability(prior(m.location));
  const double ln_k_n = odds_at_measurement(m.z, m.location, prior_n, params, scene);
  const auto own = field.nearest_radial_index(j, pol.r);
  for (int k = 0; k < count; ++k) {
    double ln_k;
    if (own && *own == k) {
      ln_k = ln_k_n;
    } else {
      const double prior_cell = from_log_odds(field.prior_log_odds(j, k));
      ln_k = odds_along_azimuth(ln_k_n, prior_cell, prior_n, field.radius(k), pol.r, stats);
    }
    field.set_log_odds(j, k, bayes_update(field.log_odds(j, k), ln_k, field.prior_log_odds(j, k)));
  }
  field.mark_measured(j);
}

/// Step 2: propagate measured directions sideways. Each unmeasured direction
/// takes its update from the nearest measured one (ties to the smaller index)
/// when the angular gap is within phi_th; otherwise it stays at the prior.
inline void step2_fill(LogOddsField& field, const CorrelationConfig& config) {
  config.validate();
  const int m = field.directions();
  std::vector<int> measured;
  for (int j = 0; j < m; ++j)
    if (field.is_measured(j)) measured.push_back(j);
  if (measured.empty()) return;

  for (int j = 0; j < m; ++j) {
    if (field.is_measured(j)) continue;
    int best = -1;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int cand : measured) {
      const double gap = wrap_angle_difference(field.spec().ray_azimuth(j),
                                               field.spec().ray_azimuth(cand));
      if (gap < best_gap) {
        best_gap = gap;
        best = cand;
      }
    }
    if (best < 0 || best_gap > config.phi_th) continue;
    const double rho = angular_rho(std::min(best_gap, std::numbers::pi), config.beta);
    const int count = std::min(field.radial_count(j), field.radial_count(best));
    for (int k = 0; k < count; ++k) {
      const double prior_x = from_log_odds(field.prior_log_odds(j, k));
      const double prior_star = from_log_odds(field.prior_log_odds(best, k));
      const double posterior_star = from_log_odds(field.log_odds(best, k));
      const double p = clamp_probability(fill_posterior(prior_x, prior_star, posterior_star, rho));
      field.set_log_odds(j, k, to_log_odds(p));
    }
  }
}

/// Full construction pipeline: prior-initialized polar field, sequential
/// per-measurement updates, cross-direction fill, Cartesian projection.
template <class PriorFn>
ProbabilityGrid build_lsm(PriorFn&& prior, const std::vector<Measurement>& measurements,
                          const PolarGridSpec& spec, const CorrelationConfig& correlation,
                          const ChannelParams& params, const SceneConfig& scene,
                          PropagationStats* stats = nullptr) {
  LogOddsField field = initialize_field(spec, prior);
  for (const Measurement& m : measurements) step1_update(field, m, prior, params, scene, stats);
  step2_fill(field, correlation);
  return rasterize(field, scene, prior);
}

}  // namespace lsmap
