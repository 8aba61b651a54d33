#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lsmap/baselines.hpp"
#include "lsmap/channel.hpp"
#include "lsmap/env.hpp"
#include "lsmap/filter.hpp"
#include "lsmap/grid.hpp"
#include "lsmap/rng.hpp"

namespace lsmap {

/// Mean absolute error between the binary truth and a probability map.
inline double mae(const TruthGrid& truth, const ProbabilityGrid& map) {
  if (truth.width != map.width || truth.height != map.height || truth.step != map.step)
    throw std::invalid_argument("mae: raster geometry mismatch");
  double acc = 0.0;
  const std::size_t n = truth.values.size();
  for (std::size_t i = 0; i < n; ++i)
    acc += std::abs(static_cast<double>(truth.values[i]) - map.values[i]);
  return acc / static_cast<double>(n);
}

struct SamplingConfig {
  enum class Strategy { circular, per_direction_random };

  Strategy strategy = Strategy::circular;
  double ring_step = 120.0;            // radial gap between flight circles
  double delta_phi = kTwoPi / 72.0;    // angular sampling interval
  int n_per_direction = 1;             // random strategy only
  std::uint64_t seed = 0;

  void validate() const {
    if (ring_step <= 0.0) throw std::invalid_argument("sampling: ring_step must be positive");
    if (!(delta_phi > 0.0 && delta_phi < kTwoPi))
      throw std::invalid_argument("sampling: delta_phi must lie in (0, 2*pi)");
    if (n_per_direction < 1)
      throw std::invalid_argument("sampling: n_per_direction must be >= 1");
  }

  /// Number of azimuth multiples of delta_phi inside [0, 2*pi).
  int azimuth_count() const {
    return static_cast<int>(std::floor((kTwoPi - 1e-12) / delta_phi)) + 1;
  }
};

/// Measurement locations of a flight plan. Circular: concentric rings around
/// the GBS projection sampled every delta_phi, clipped to the site. Random:
/// a fixed number of uniform radii on each discrete direction.
inline std::vector<Vec2> sample_locations(const SamplingConfig& cfg, const SceneConfig& scene) {
  cfg.validate();
  scene.validate();
  std::vector<Vec2> out;
  const int n_az = cfg.azimuth_count();
  if (cfg.strategy == SamplingConfig::Strategy::circular) {
    const Vec2 corners[4] = {{0.0, 0.0}, {scene.width, 0.0}, {0.0, scene.length},
                             {scene.width, scene.length}};
    double max_r = 0.0;
    for (const Vec2& c : corners) max_r = std::max(max_r, distance(scene.bs_position, c));
    for (int ring = 1; ring * cfg.ring_step <= max_r; ++ring) {
      const double r = ring * cfg.ring_step;
      for (int k = 0; k < n_az; ++k) {
        const Vec2 p = polar_to_cartesian(r, k * cfg.delta_phi, scene.bs_position);
        if (scene.contains(p)) out.push_back(p);
      }
    }
  } else {
    RngEngine engine = make_engine(cfg.seed);
    for (int j = 0; j < n_az; ++j) {
      const double az = j * cfg.delta_phi;
      const double reach = PolarGridSpec::ray_exit_distance(scene, scene.bs_position, az);
      std::uniform_real_distribution<double> radial(0.0, reach);
      for (int i = 0; i < cfg.n_per_direction; ++i)
        out.push_back(polar_to_cartesian(radial(engine), az, scene.bs_position));
    }
  }
  return out;
}

enum class Method { prior, knn, dist_only, proposed };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::prior: return "prior";
    case Method::knn: return "knn";
    case Method::dist_only: return "dist_only";
    case Method::proposed: return "proposed";
  }
  return "?";
}

inline std::optional<Method> parse_method(const std::string& name) {
  if (name == "prior") return Method::prior;
  if (name == "knn") return Method::knn;
  if (name == "dist_only" || name == "dist-only") return Method::dist_only;
  if (name == "proposed") return Method::proposed;
  return std::nullopt;
}

struct ExperimentConfig {
  SceneConfig scene;
  UrbanGenParams urban;
  PriorModelParams prior;
  ChannelParams channel;
  CorrelationConfig correlation;
  BaselineConfig baseline;
  SamplingConfig sampling;
  int grid_directions = 72;
  double grid_radial_step = 1.0;
  std::vector<Method> methods{Method::prior, Method::knn, Method::dist_only, Method::proposed};
  int n_maps = 5;
  int n_monte_carlo = 5;
  std::string sweep_name = "none";
  std::vector<double> sweep_values{0.0};
  std::uint64_t master_seed = 0;
  int workers = 1;
  bool record_timing = false;  // per-row wall time breaks byte-reproducibility

  void validate() const {
    scene.validate();
    urban.validate();
    prior.validate();
    channel.validate();
    correlation.validate();
    baseline.validate();
    sampling.validate();
    if (grid_directions < 1) throw std::invalid_argument("experiment: grid_directions must be >= 1");
    if (grid_radial_step <= 0.0)
      throw std::invalid_argument("experiment: grid_radial_step must be positive");
    if (n_maps < 1 || n_monte_carlo < 1)
      throw std::invalid_argument("experiment: n_maps and n_monte_carlo must be >= 1");
    if (methods.empty()) throw std::invalid_argument("experiment: empty method list");
    if (sweep_values.empty()) throw std::invalid_argument("experiment: empty sweep_values");
    if (sweep_name != "none" && sweep_name != "n_per_direction" && sweep_name != "sigma2_nlos" &&
        sweep_name != "delta_d_ring" && sweep_name != "delta_phi")
      throw std::invalid_argument("experiment: unknown sweep '" + sweep_name + "'");
    if (workers < 1) throw std::invalid_argument("experiment: workers must be >= 1");
  }
};

struct MetricsRow {
  int map_seed = 0;
  int mc_seed = 0;
  std::string method;
  std::string sweep_name;
  double sweep_value = 0.0;
  int n_meas = 0;
  double mae = 0.0;
  std::int64_t ms = 0;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;

  std::string to_csv() const {
    std::string out = "map_seed,mc_seed,method,sweep_name,sweep_value,n_meas,mae,ms\n";
    char buf[256];
    for (const MetricsRow& r : rows) {
      if (std::isnan(r.mae))
        std::snprintf(buf, sizeof buf, "%d,%d,%s,%s,%g,%d,nan,%lld\n", r.map_seed, r.mc_seed,
                      r.method.c_str(), r.sweep_name.c_str(), r.sweep_value, r.n_meas,
                      static_cast<long long>(r.ms));
      else
        std::snprintf(buf, sizeof buf, "%d,%d,%s,%s,%g,%d,%.6f,%lld\n", r.map_seed, r.mc_seed,
                      r.method.c_str(), r.sweep_name.c_str(), r.sweep_value, r.n_meas, r.mae,
                      static_cast<long long>(r.ms));
      out += buf;
    }
    return out;
  }

  /// Per-method mean/std of the MAE at every sweep point.
  std::string summary_json() const {
    nlohmann::ordered_json root;
    root["rows"] = rows.size();
    auto& points = root["sweep_points"];
    points = nlohmann::ordered_json::array();
    std::vector<std::pair<std::string, double>> seen;  // (sweep_name, value) in row order
    for (const MetricsRow& r : rows) {
      std::pair<std::string, double> key{r.sweep_name, r.sweep_value};
      if (std::find(seen.begin(), seen.end(), key) == seen.end()) seen.push_back(key);
    }
    for (const auto& [name, value] : seen) {
      nlohmann::ordered_json point;
      point["sweep_name"] = name;
      point["sweep_value"] = value;
      std::vector<std::string> method_order;
      for (const MetricsRow& r : rows)
        if (r.sweep_name == name && r.sweep_value == value &&
            std::find(method_order.begin(), method_order.end(), r.method) == method_order.end())
          method_order.push_back(r.method);
      for (const std::string& m : method_order) {
        std::vector<double> vals;
        int failed = 0;
        for (const MetricsRow& r : rows)
          if (r.sweep_name == name && r.sweep_value == value && r.method == m) {
            if (std::isnan(r.mae))
              ++failed;
            else
              vals.push_back(r.mae);
          }
        double mean = 0.0, stddev = 0.0;
        if (!vals.empty()) {
          mean = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
          if (vals.size() > 1) {
            double ss = 0.0;
            for (double v : vals) ss += (v - mean) * (v - mean);
            stddev = std::sqrt(ss / (vals.size() - 1));
          }
        }
        point["methods"][m] = {{"n", vals.size()}, {"failed", failed}, {"mean_mae", mean},
                               {"std_mae", stddev}};
      }
      points.push_back(std::move(point));
    }
    return root.dump(2) + "\n";
  }
};

/// Build one map with the given method; `prior` ignores the measurements.
template <class PriorFn>
ProbabilityGrid build_map_for_method(Method method, PriorFn&& prior,
                                     const std::vector<Measurement>& measurements,
                                     const ExperimentConfig& cfg, const ChannelParams& channel) {
  const PolarGridSpec spec =
      PolarGridSpec::for_scene(cfg.scene, cfg.grid_directions, cfg.grid_radial_step);
  switch (method) {
    case Method::prior:
      return prior_map(cfg.scene, prior);
    case Method::knn:
      return knn_posterior_map(measurements, prior, channel, cfg.scene, cfg.baseline);
    case Method::dist_only:
      return distance_only_map(measurements, prior, channel, cfg.scene, spec, cfg.baseline);
    case Method::proposed:
      return build_lsm(prior, measurements, spec, cfg.correlation, channel, cfg.scene);
  }
  throw std::invalid_argument("unknown method");
}

namespace detail {

inline void apply_sweep(const std::string& name, double value, SamplingConfig& sampling,
                        ChannelParams& channel) {
  if (name == "none") return;
  if (name == "n_per_direction") {
    sampling.strategy = SamplingConfig::Strategy::per_direction_random;
    sampling.n_per_direction = static_cast<int>(std::llround(value));
  } else if (name == "sigma2_nlos") {
    channel.sigma2_nlos = value;
  } else if (name == "delta_d_ring") {
    sampling.strategy = SamplingConfig::Strategy::circular;
    sampling.ring_step = value;
  } else if (name == "delta_phi") {
    sampling.strategy = SamplingConfig::Strategy::circular;
    sampling.delta_phi = value;
  } else {
    throw std::invalid_argument("experiment: unknown sweep '" + name + "'");
  }
}

}  // namespace detail

/// Full Monte-Carlo benchmark: n_maps scenes x n_monte_carlo measurement
/// seeds x sweep points x methods. Rows are merged in a fixed order so the
/// report does not depend on the worker count or scheduling.
inline MetricsReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  std::vector<UrbanMap> maps(cfg.n_maps);
  std::vector<TruthGrid> truths(cfg.n_maps);
  for (int h = 0; h < cfg.n_maps; ++h) {
    maps[h] = generate_urban_map(cfg.scene, cfg.urban, derive_seed(cfg.master_seed, {1, (std::uint64_t)h}));
    truths[h] = ground_truth_lsm(maps[h], cfg.scene);
  }

  struct Task {
    int h, m, s;
  };
  std::vector<Task> tasks;
  for (int h = 0; h < cfg.n_maps; ++h)
    for (int m = 0; m < cfg.n_monte_carlo; ++m)
      for (int s = 0; s < static_cast<int>(cfg.sweep_values.size()); ++s)
        tasks.push_back({h, m, s});

  std::vector<std::vector<MetricsRow>> results(tasks.size());

  auto run_task = [&](const Task& task, std::vector<MetricsRow>& rows) {
    SamplingConfig sampling = cfg.sampling;
    ChannelParams channel = cfg.channel;
    const double sweep_value = cfg.sweep_values[task.s];
    detail::apply_sweep(cfg.sweep_name, sweep_value, sampling, channel);
    sampling.seed = derive_seed(cfg.master_seed,
                                {2, (std::uint64_t)task.h, (std::uint64_t)task.m, (std::uint64_t)task.s});

    auto prior = [&](Vec2 p) { return prior_los_probability(p, cfg.prior, cfg.scene); };

    std::vector<Measurement> measurements;
    bool sampling_failed = false;
    try {
      const std::vector<Vec2> locations = sample_locations(sampling, cfg.scene);
      RngEngine noise = make_engine(derive_seed(
          cfg.master_seed, {3, (std::uint64_t)task.h, (std::uint64_t)task.m, (std::uint64_t)task.s}));
      measurements.reserve(locations.size());
      for (int n = 0; n < static_cast<int>(locations.size()); ++n) {
        Measurement m = sample_measurement(locations[n], truths[task.h], channel, cfg.scene, noise);
        m.index = n;
        measurements.push_back(m);
      }
    } catch (const std::exception&) {
      sampling_failed = true;
    }

    for (Method method : cfg.methods) {
      MetricsRow row;
      row.map_seed = task.h;
      row.mc_seed = task.m;
      row.method = method_name(method);
      row.sweep_name = cfg.sweep_name;
      row.sweep_value = sweep_value;
      row.n_meas = static_cast<int>(measurements.size());
      if (sampling_failed) {
        row.mae = std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
        continue;
      }
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const ProbabilityGrid grid = build_map_for_method(method, prior, measurements, cfg, channel);
        const auto t1 = std::chrono::steady_clock::now();
        if (cfg.record_timing)
          row.ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        row.mae = mae(truths[task.h], grid);
      } catch (const std::exception&) {
        row.mae = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(row);
    }
  };

  const int workers = std::min<int>(cfg.workers, static_cast<int>(tasks.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(tasks[i], results[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
          run_task(tasks[i], results[i]);
      });
    for (std::thread& t : pool) t.join();
  }

  MetricsReport report;
  for (auto& rows : results)
    for (MetricsRow& r : rows) report.rows.push_back(std::move(r));
  return report;
}

/// Spearman rank correlation with average ranks on ties.
inline double spearman_rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("spearman: need two equal-length series of size >= 2");
  auto ranks = [](const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return v[i] < v[j]; });
    std::vector<double> r(n);
    int i = 0;
    while (i < n) {
      int j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * (i + j) + 1.0;
      for (int k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> ra = ranks(a), rb = ranks(b);
  const int n = static_cast<int>(a.size());
  double ma = 0.0, mb = 0.0;
  for (int i = 0; i < n; ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double num = 0.0, va = 0.0, vb = 0.0;
  for (int i = 0; i < n; ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va <= 0.0 || vb <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / std::sqrt(va * vb);
}

}  // namespace lsmap
