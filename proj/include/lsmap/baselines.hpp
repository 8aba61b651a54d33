#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lsmap/channel.hpp"
#include "lsmap/filter.hpp"
#include "lsmap/grid.hpp"

namespace lsmap {

struct BaselineConfig {
  int k = 5;                      // neighbor count
  double resample_step = 1.0;     // ray resampling spacing, meters
  double weight_epsilon = 1e-6;   // distance floor of the inverse-distance weights

  void validate() const {
    if (k < 1) throw std::invalid_argument("baseline: k must be >= 1");
    if (resample_step <= 0.0) throw std::invalid_argument("baseline: resample_step must be positive");
    if (weight_epsilon <= 0.0) throw std::invalid_argument("baseline: weight_epsilon must be positive");
  }
};

namespace detail {

/// Bucketed K-nearest search over 2D points. Ties resolve by (squared
/// distance, insertion index) so results are independent of bucket layout.
class PointIndex {
 public:
  PointIndex(std::vector<Vec2> points, double cell_size)
      : points_(std::move(points)), h_(cell_size > 0.0 ? cell_size : 1.0) {
    if (points_.empty()) return;
    min_ = max_ = points_[0];
    for (const Vec2& p : points_) {
      min_.x = std::min(min_.x, p.x);
      min_.y = std::min(min_.y, p.y);
      max_.x = std::max(max_.x, p.x);
      max_.y = std::max(max_.y, p.y);
    }
    nx_ = static_cast<int>((max_.x - min_.x) / h_) + 1;
    ny_ = static_cast<int>((max_.y - min_.y) / h_) + 1;
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (int i = 0; i < static_cast<int>(points_.size()); ++i) {
      const auto [cx, cy] = cell_of(points_[i]);
      buckets_[static_cast<std::size_t>(cy) * nx_ + cx].push_back(i);
    }
  }

  std::size_t size() const { return points_.size(); }
  const Vec2& point(int i) const { return points_[i]; }

  /// K nearest point indices with squared distances, ordered by
  /// (squared distance, index).
  void k_nearest(Vec2 q, int k, std::vector<std::pair<double, int>>& out) const {
    out.clear();
    if (points_.empty() || k <= 0) return;
    const int want = std::min<int>(k, static_cast<int>(points_.size()));
    const int qx = static_cast<int>(std::floor((q.x - min_.x) / h_));
    const int qy = static_cast<int>(std::floor((q.y - min_.y) / h_));
    const int ring_max = std::max({std::abs(qx), std::abs(qx - (nx_ - 1)),
                                   std::abs(qy), std::abs(qy - (ny_ - 1))});

    auto consider = [&](int i) {
      const std::pair<double, int> cand{squared_distance(q, points_[i]), i};
      auto pos = std::lower_bound(out.begin(), out.end(), cand);
      if (static_cast<int>(out.size()) < want) {
        out.insert(pos, cand);
      } else if (pos != out.end()) {
        out.insert(pos, cand);
        out.pop_back();
      }
    };
    auto scan_cell = [&](int cx, int cy) {
      if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) return;
      for (int i : buckets_[static_cast<std::size_t>(cy) * nx_ + cx]) consider(i);
    };

    for (int ring = 0; ring <= ring_max; ++ring) {
      if (ring == 0) {
        scan_cell(qx, qy);
      } else {
        for (int cx = qx - ring; cx <= qx + ring; ++cx) {
          scan_cell(cx, qy - ring);
          scan_cell(cx, qy + ring);
        }
        for (int cy = qy - ring + 1; cy <= qy + ring - 1; ++cy) {
          scan_cell(qx - ring, cy);
          scan_cell(qx + ring, cy);
        }
      }
      if (static_cast<int>(out.size()) == want) {
        // all points of ring R+1 lie at least R*h away
        const double reach = ring * h_;
        if (reach * reach > out.back().first) break;
      }
    }
  }

 private:
  std::pair<int, int> cell_of(Vec2 p) const {
    int cx = static_cast<int>(std::floor((p.x - min_.x) / h_));
    int cy = static_cast<int>(std::floor((p.y - min_.y) / h_));
    cx = std::clamp(cx, 0, nx_ - 1);
    cy = std::clamp(cy, 0, ny_ - 1);
    return {cx, cy};
  }

  std::vector<Vec2> points_;
  double h_;
  Vec2 min_, max_;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<int>> buckets_;
};

inline double inverse_distance_weight(double squared_dist, double weight_epsilon) {
  return 1.0 / std::max(std::sqrt(squared_dist), weight_epsilon);
}

}  // namespace detail

/// KNN baseline: every cell is the inverse-distance weighted mean of the
/// single-measurement posteriors at its K nearest measurement locations.
template <class PriorFn>
ProbabilityGrid knn_posterior_map(const std::vector<Measurement>& measurements, PriorFn&& prior,
                                  const ChannelParams& params, const SceneConfig& scene,
                                  const BaselineConfig& cfg) {
  scene.validate();
  cfg.validate();
  if (measurements.empty()) return prior_map(scene, prior);

  std::vector<Vec2> locations;
  std::vector<double> posteriors;
  locations.reserve(measurements.size());
  posteriors.reserve(measurements.size());
  for (const Measurement& m : measurements) {
    locations.push_back(m.location);
    posteriors.push_back(posterior_at_measurement(
        m.z, m.location, clamp_probability(prior(m.location)), params, scene));
  }
  const detail::PointIndex index(std::move(locations),
                                 std::max(scene.width, scene.length) / 64.0);

  ProbabilityGrid grid;
  grid.width = scene.cells_x();
  grid.height = scene.cells_y();
  grid.step = scene.grid_step;
  grid.values.resize(static_cast<std::size_t>(grid.width) * grid.height);
  std::vector<std::pair<double, int>> near;
  for (int iy = 0; iy < grid.height; ++iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      const Vec2 c = scene.cell_center(ix, iy);
      index.k_nearest(c, cfg.k, near);
      double wsum = 0.0, acc = 0.0;
      for (const auto& [d2, i] : near) {
        const double w = detail::inverse_distance_weight(d2, cfg.weight_epsilon);
        wsum += w;
        acc += w * posteriors[i];
      }
      grid.at(ix, iy) = acc / wsum;
    }
  }
  return grid;
}

/// Distance-correlation-only baseline: per-direction updates as in the full
/// method, then log-odds KNN interpolation from a dense resampling of the
/// measured rays. Cells on measured directions keep their exact updated value.
template <class PriorFn>
ProbabilityGrid distance_only_map(const std::vector<Measurement>& measurements, PriorFn&& prior,
                                  const ChannelParams& params, const SceneConfig& scene,
                                  const PolarGridSpec& spec, const BaselineConfig& cfg,
                                  PropagationStats* stats = nullptr) {
  scene.validate();
  cfg.validate();
  LogOddsField field = initialize_field(spec, prior);
  for (const Measurement& m : measurements) step1_update(field, m, prior, params, scene, stats);

  std::vector<Vec2> sample_points;
  std::vector<double> sample_log_odds;
  for (int j = 0; j < field.directions(); ++j) {
    if (!field.is_measured(j)) continue;
    const double reach = field.radial_count(j) * spec.radial_step;
    for (int s = 1; s * cfg.resample_step <= reach; ++s) {
      const double r = s * cfg.resample_step;
      const auto k = field.nearest_radial_index(j, r);
      if (!k) break;
      sample_points.push_back(polar_to_cartesian(r, spec.ray_azimuth(j), spec.origin));
      sample_log_odds.push_back(field.log_odds(j, *k));
    }
  }
  if (sample_points.empty()) return rasterize(field, scene, prior);

  const detail::PointIndex index(std::move(sample_points),
                                 std::max(scene.width, scene.length) / 64.0);

  ProbabilityGrid grid;
  grid.width = scene.cells_x();
  grid.height = scene.cells_y();
  grid.step = scene.grid_step;
  grid.values.resize(static_cast<std::size_t>(grid.width) * grid.height);
  std::vector<std::pair<double, int>> near;
  for (int iy = 0; iy < grid.height; ++iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      const Vec2 c = scene.cell_center(ix, iy);
      const auto cell = polar_cell_lookup(field, c);
      if (cell && field.is_measured(cell->first)) {
        grid.at(ix, iy) = from_log_odds(field.log_odds(cell->first, cell->second));
        continue;
      }
      index.k_nearest(c, cfg.k, near);
      double wsum = 0.0, acc = 0.0;
      for (const auto& [d2, i] : near) {
        const double w = detail::inverse_distance_weight(d2, cfg.weight_epsilon);
        wsum += w;
        acc += w * sample_log_odds[i];
      }
      grid.at(ix, iy) = from_log_odds(acc / wsum);
    }
  }
  return grid;
}

}  // namespace lsmap
