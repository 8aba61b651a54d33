#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lsmap/env.hpp"
#include "lsmap/logodds.hpp"

namespace lsmap {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PolarPoint {
  double r = 0.0;
  double phi = 0.0;  // [0, 2*pi)
};

/// Polar coordinates about an origin; the origin itself maps to (0, 0).
inline PolarPoint cartesian_to_polar(Vec2 p, Vec2 origin) {
  const double dx = p.x - origin.x;
  const double dy = p.y - origin.y;
  const double r = std::hypot(dx, dy);
  if (r == 0.0) return {0.0, 0.0};
  double phi = std::atan2(dy, dx);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
  return {r, phi};
}

inline Vec2 polar_to_cartesian(double r, double phi, Vec2 origin) {
  return {origin.x + r * std::cos(phi), origin.y + r * std::sin(phi)};
}

/// Working discretization of the flight plane: M uniform azimuth rays from the
/// GBS projection, sampled radially every radial_step out to the site edge.
struct PolarGridSpec {
  int directions = 72;
  double radial_step = 1.0;
  Vec2 origin;
  std::vector<int> radial_counts;  // samples per direction

  double delta_phi() const { return kTwoPi / directions; }
  double ray_azimuth(int j) const { return j * delta_phi(); }

  /// Containing bin of an azimuth; bins are centered on the rays.
  int direction_bin(double phi) const {
    long j = std::lround(phi / delta_phi());
    j %= directions;
    if (j < 0) j += directions;
    return static_cast<int>(j);
  }

  /// Ray exit distance from origin to the site boundary along azimuth phi.
  static double ray_exit_distance(const SceneConfig& scene, Vec2 origin, double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    double t = std::numeric_limits<double>::infinity();
    if (c > 0.0) t = std::min(t, (scene.width - origin.x) / c);
    if (c < 0.0) t = std::min(t, -origin.x / c);
    if (s > 0.0) t = std::min(t, (scene.length - origin.y) / s);
    if (s < 0.0) t = std::min(t, -origin.y / s);
    return std::max(t, 0.0);
  }

  static PolarGridSpec for_scene(const SceneConfig& scene, int directions, double radial_step) {
    if (directions < 1) throw std::invalid_argument("polar grid: directions must be >= 1");
    if (radial_step <= 0.0) throw std::invalid_argument("polar grid: radial_step must be positive");
    PolarGridSpec spec;
    spec.directions = directions;
    spec.radial_step = radial_step;
    spec.origin = scene.bs_position;
    spec.radial_counts.resize(directions);
    for (int j = 0; j < directions; ++j) {
      const double reach = ray_exit_distance(scene, spec.origin, spec.ray_azimuth(j));
      spec.radial_counts[j] = static_cast<int>(std::floor(reach / radial_step));
    }
    return spec;
  }
};

/// Per-direction log-odds state of the map plus an immutable copy of the
/// initial (prior) log odds. Radial sample k of direction j sits at radius
/// (k+1)*radial_step on the ray azimuth.
class LogOddsField {
 public:
  explicit LogOddsField(PolarGridSpec spec) : spec_(std::move(spec)) {
    values_.resize(spec_.directions);
    prior_.resize(spec_.directions);
    measured_.assign(spec_.directions, 0);
    for (int j = 0; j < spec_.directions; ++j) {
      values_[j].assign(spec_.radial_counts[j], 0.0);
      prior_[j].assign(spec_.radial_counts[j], 0.0);
    }
  }

  const PolarGridSpec& spec() const { return spec_; }
  int directions() const { return spec_.directions; }
  int radial_count(int j) const { return spec_.radial_counts[j]; }
  double radius(int k) const { return (k + 1) * spec_.radial_step; }

  double log_odds(int j, int k) const { return values_[j][k]; }
  void set_log_odds(int j, int k, double l) { values_[j][k] = l; }
  double prior_log_odds(int j, int k) const { return prior_[j][k]; }
  void set_initial(int j, int k, double l) { values_[j][k] = l; prior_[j][k] = l; }

  bool is_measured(int j) const { return measured_[j] != 0; }
  void mark_measured(int j) { measured_[j] = 1; }

  Vec2 cell_position(int j, int k) const {
    return polar_to_cartesian(radius(k), spec_.ray_azimuth(j), spec_.origin);
  }

  /// Nearest stored radial index for a radius, or nullopt beyond coverage.
  std::optional<int> nearest_radial_index(int j, double r) const {
    if (spec_.radial_counts[j] == 0) return std::nullopt;
    long k = std::lround(r / spec_.radial_step);
    if (k < 1) k = 1;
    if (k > spec_.radial_counts[j]) return std::nullopt;
    return static_cast<int>(k - 1);
  }

 private:
  PolarGridSpec spec_;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<double>> prior_;
  std::vector<std::uint8_t> measured_;
};

/// Cartesian probability raster at scene resolution.
struct ProbabilityGrid {
  int width = 0;
  int height = 0;
  double step = 1.0;
  std::vector<double> values;  // row-major, row 0 at y=0

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * width + ix]; }
  double& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * width + ix]; }
};

template <class PriorFn>
LogOddsField initialize_field(const PolarGridSpec& spec, PriorFn&& prior) {
  LogOddsField field(spec);
  for (int j = 0; j < spec.directions; ++j)
    for (int k = 0; k < field.radial_count(j); ++k)
      field.set_initial(j, k, to_log_odds(clamp_probability(prior(field.cell_position(j, k)))));
  return field;
}

/// Direct per-cell evaluation of a prior closure over the scene raster.
template <class PriorFn>
ProbabilityGrid prior_map(const SceneConfig& scene, PriorFn&& prior) {
  ProbabilityGrid grid;
  grid.width = scene.cells_x();
  grid.height = scene.cells_y();
  grid.step = scene.grid_step;
  grid.values.resize(static_cast<std::size_t>(grid.width) * grid.height);
  for (int iy = 0; iy < grid.height; ++iy)
    for (int ix = 0; ix < grid.width; ++ix)
      grid.at(ix, iy) = clamp_probability(prior(scene.cell_center(ix, iy)));
  return grid;
}

/// Nearest polar cell (direction bin, radial index) of a point, or nullopt
/// when the point falls beyond the stored radial coverage of its bin.
inline std::optional<std::pair<int, int>> polar_cell_lookup(const LogOddsField& field, Vec2 p) {
  const PolarPoint pol = cartesian_to_polar(p, field.spec().origin);
  const int j = field.spec().direction_bin(pol.phi);
  const auto k = field.nearest_radial_index(j, pol.r);
  if (!k) return std::nullopt;
  return std::make_pair(j, *k);
}

/// Project the polar state onto the Cartesian raster: each cell takes the
/// probability of its nearest polar sample, falling back to the prior closure
/// where the polar grid has no coverage.
template <class PriorFn>
ProbabilityGrid rasterize(const LogOddsField& field, const SceneConfig& scene, PriorFn&& prior) {
  ProbabilityGrid grid;
  grid.width = scene.cells_x();
  grid.height = scene.cells_y();
  grid.step = scene.grid_step;
  grid.values.resize(static_cast<std::size_t>(grid.width) * grid.height);
  for (int iy = 0; iy < grid.height; ++iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      const Vec2 c = scene.cell_center(ix, iy);
      if (const auto cell = polar_cell_lookup(field, c))
        grid.at(ix, iy) = from_log_odds(field.log_odds(cell->first, cell->second));
      else
        grid.at(ix, iy) = clamp_probability(prior(c));
    }
  }
  return grid;
}

}  // namespace lsmap
