#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsmap/geometry.hpp"
#include "lsmap/rng.hpp"

namespace lsmap {

/// Raised when a synthetic scene cannot be realized (e.g. requested building
/// density does not fit without overlap).
class generation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Site geometry and flight plane. All lengths in meters.
struct SceneConfig {
  double width = 800.0;    // site extent along x
  double length = 800.0;   // site extent along y
  double uav_height = 129.0;
  Vec2 bs_position{400.0, 400.0};
  double bs_antenna_height = 15.0;
  double grid_step = 1.0;  // square raster cells

  int cells_x() const { return static_cast<int>(std::ceil(width / grid_step)); }
  int cells_y() const { return static_cast<int>(std::ceil(length / grid_step)); }

  Vec3 bs_antenna() const { return {bs_position.x, bs_position.y, bs_antenna_height}; }

  Vec2 cell_center(int ix, int iy) const {
    return {(ix + 0.5) * grid_step, (iy + 0.5) * grid_step};
  }

  bool contains(Vec2 p) const {
    return p.x >= 0.0 && p.x < width && p.y >= 0.0 && p.y < length;
  }

  void validate() const {
    if (width <= 0.0 || length <= 0.0) throw std::invalid_argument("scene: site extents must be positive");
    if (grid_step <= 0.0) throw std::invalid_argument("scene: grid_step must be positive");
    if (bs_antenna_height >= uav_height)
      throw std::invalid_argument("scene: bs_antenna_height must be below uav_height");
    if (!(bs_position.x >= 0.0 && bs_position.x <= width && bs_position.y >= 0.0 &&
          bs_position.y <= length))
      throw std::invalid_argument("scene: bs_position outside the site");
  }
};

/// Synthetic urban scene: a set of non-overlapping building boxes.
struct UrbanMap {
  std::vector<Box> buildings;
  std::uint64_t seed = 0;
};

struct UrbanGenParams {
  double density_per_km2 = 150.0;
  double side_min = 20.0;   // uniform footprint side range
  double side_max = 60.0;
  double height_scale = 35.0;  // Rayleigh scale of building heights
  int max_retries = 200;       // placement attempts per building

  void validate() const {
    if (density_per_km2 < 0.0) throw std::invalid_argument("urban: density_per_km2 must be >= 0");
    if (side_min <= 0.0 || side_max < side_min)
      throw std::invalid_argument("urban: footprint side range invalid");
    if (height_scale <= 0.0) throw std::invalid_argument("urban: height_scale must be positive");
    if (max_retries < 1) throw std::invalid_argument("urban: max_retries must be >= 1");
  }
};

/// Binary LoS raster over the flight plane; 1 = LoS to the base station.
struct TruthGrid {
  int width = 0;
  int height = 0;
  double step = 1.0;
  std::vector<std::uint8_t> values;  // row-major, row 0 at y=0

  std::uint8_t at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * width + ix]; }
  std::uint8_t& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * width + ix]; }
};

/// True iff the open segment between p0 and p1 is blocked by any building.
inline bool segment_blocked(const Vec3& p0, const Vec3& p1, const UrbanMap& map) {
  const double dx = p1.x - p0.x, dy = p1.y - p0.y, dz = p1.z - p0.z;
  if (dx == 0.0 && dy == 0.0 && dz == 0.0) return false;
  for (const Box& b : map.buildings)
    if (segment_intersects_box(p0, p1, b)) return true;
  return false;
}

/// Draw buildings with uniform footprints and Rayleigh heights until the
/// target count (density x area) is placed. Boxes may touch but not overlap,
/// never cover the base-station projection, and never reach the flight plane.
inline UrbanMap generate_urban_map(const SceneConfig& scene, const UrbanGenParams& gen,
                                   std::uint64_t seed) {
  scene.validate();
  gen.validate();
  const double area_km2 = scene.width * scene.length * 1e-6;
  const long target = std::lround(gen.density_per_km2 * area_km2);

  UrbanMap map;
  map.seed = seed;
  RngEngine engine = make_engine(seed);
  std::uniform_real_distribution<double> side(gen.side_min, gen.side_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (long n = 0; n < target; ++n) {
    bool placed = false;
    for (int attempt = 0; attempt < gen.max_retries && !placed; ++attempt) {
      const double sx = std::min(side(engine), scene.width);
      const double sy = std::min(side(engine), scene.length);
      const double x0 = unit(engine) * (scene.width - sx);
      const double y0 = unit(engine) * (scene.length - sy);
      double h = 0.0;
      do {
        h = gen.height_scale * std::sqrt(-2.0 * std::log1p(-unit(engine)));
      } while (h <= 0.0 || h >= scene.uav_height);
      Box b{x0, x0 + sx, y0, y0 + sy, h};
      if (b.footprint_contains(scene.bs_position)) continue;  // the GBS stands in open space
      bool overlaps = false;
      for (const Box& other : map.buildings)
        if (b.footprint_overlaps(other)) { overlaps = true; break; }
      if (overlaps) continue;
      map.buildings.push_back(b);
      placed = true;
    }
    if (!placed)
      throw generation_error("urban generation: could not place building " + std::to_string(n) +
                             " after " + std::to_string(gen.max_retries) + " attempts");
  }
  return map;
}

/// Ground-truth LSM: cell (ix,iy) is LoS iff the link from the GBS antenna to
/// the cell center at flight altitude clears every building.
inline TruthGrid ground_truth_lsm(const UrbanMap& map, const SceneConfig& scene) {
  scene.validate();
  TruthGrid grid;
  grid.width = scene.cells_x();
  grid.height = scene.cells_y();
  grid.step = scene.grid_step;
  grid.values.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);
  const Vec3 antenna = scene.bs_antenna();
  for (int iy = 0; iy < grid.height; ++iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      const Vec2 c = scene.cell_center(ix, iy);
      const Vec3 uav{c.x, c.y, scene.uav_height};
      grid.at(ix, iy) = segment_blocked(antenna, uav, map) ? 0 : 1;
    }
  }
  return grid;
}

}  // namespace lsmap
