// Command-line driver for link-state map construction and benchmarking.
//
// Exit codes: 0 success, 1 usage error, 2 I/O or config error, 3 numeric or
// generation failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lsmap/lsmap.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 0;  // 0 = take from config
};

lsmap::ExperimentConfig load_or_default(const CommonOpts& opts) {
  lsmap::ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = lsmap::load_config(opts.config_path);
  if (opts.seed_given) cfg.master_seed = opts.seed;
  if (opts.workers > 0) cfg.workers = opts.workers;
  return cfg;
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw lsmap::io_error("cannot create output directory: " + dir);
}

int cmd_gen_env(const CommonOpts& opts) {
  const lsmap::ExperimentConfig cfg = load_or_default(opts);
  ensure_out_dir(opts.out_dir);
  const lsmap::UrbanMap map =
      lsmap::generate_urban_map(cfg.scene, cfg.urban, lsmap::derive_seed(cfg.master_seed, {1, 0}));
  const lsmap::TruthGrid truth = lsmap::ground_truth_lsm(map, cfg.scene);
  lsmap::write_buildings(opts.out_dir + "/buildings.txt", map);
  lsmap::write_truth_csv(opts.out_dir + "/truth.csv", truth);
  lsmap::write_pgm(opts.out_dir + "/truth.pgm", truth);
  std::size_t los = 0;
  for (auto v : truth.values) los += v;
  std::printf("gen-env: %zu buildings, %d x %d truth raster, LoS fraction %.6f\n",
              map.buildings.size(), truth.width, truth.height,
              static_cast<double>(los) / truth.values.size());
  return 0;
}

int cmd_sample(const CommonOpts& opts, const std::string& env_path) {
  const lsmap::ExperimentConfig cfg = load_or_default(opts);
  ensure_out_dir(opts.out_dir);
  const lsmap::UrbanMap map = lsmap::read_buildings(env_path);
  const lsmap::TruthGrid truth = lsmap::ground_truth_lsm(map, cfg.scene);

  lsmap::SamplingConfig sampling = cfg.sampling;
  sampling.seed = lsmap::derive_seed(cfg.master_seed, {2, 0});
  const std::vector<lsmap::Vec2> locations = lsmap::sample_locations(sampling, cfg.scene);
  lsmap::RngEngine noise = lsmap::make_engine(lsmap::derive_seed(cfg.master_seed, {3, 0}));
  std::vector<lsmap::Measurement> measurements;
  measurements.reserve(locations.size());
  for (int n = 0; n < static_cast<int>(locations.size()); ++n) {
    lsmap::Measurement m = lsmap::sample_measurement(locations[n], truth, cfg.channel, cfg.scene, noise);
    m.index = n;
    measurements.push_back(m);
  }
  lsmap::write_measurements_csv(opts.out_dir + "/measurements.csv", measurements);
  std::printf("sample: %zu measurements\n", measurements.size());
  return 0;
}

int cmd_build(const CommonOpts& opts, const std::string& env_path, const std::string& meas_path,
              const std::string& method_name) {
  const auto method = lsmap::parse_method(method_name);
  if (!method) {
    std::fprintf(stderr, "unknown method '%s' (expected prior|knn|dist-only|proposed)\n",
                 method_name.c_str());
    return 1;
  }
  const lsmap::ExperimentConfig cfg = load_or_default(opts);
  ensure_out_dir(opts.out_dir);
  if (!env_path.empty()) lsmap::read_buildings(env_path);  // validated but not consumed
  const std::vector<lsmap::Measurement> measurements = lsmap::read_measurements_csv(meas_path);
  const auto prior = [&](lsmap::Vec2 p) {
    return lsmap::prior_los_probability(p, cfg.prior, cfg.scene);
  };
  const lsmap::ProbabilityGrid grid =
      lsmap::build_map_for_method(*method, prior, measurements, cfg, cfg.channel);
  const std::string stem = opts.out_dir + "/map_" + lsmap::method_name(*method);
  lsmap::write_probability_csv(stem + ".csv", grid);
  lsmap::write_pgm(stem + ".pgm", grid);
  std::printf("build: %s from %zu measurements -> %s.csv\n", lsmap::method_name(*method),
              measurements.size(), stem.c_str());
  return 0;
}

int cmd_eval(const std::string& truth_path, const std::string& map_path) {
  const lsmap::TruthGrid truth = lsmap::read_truth_csv(truth_path);
  const lsmap::ProbabilityGrid map = lsmap::read_probability_csv(map_path);
  std::printf("%.6f\n", lsmap::mae(truth, map));
  return 0;
}

int cmd_experiment(const CommonOpts& opts, bool timing) {
  lsmap::ExperimentConfig cfg = load_or_default(opts);
  if (timing) cfg.record_timing = true;
  ensure_out_dir(opts.out_dir);
  const lsmap::MetricsReport report = lsmap::run_experiment(cfg);
  lsmap::write_text_file(opts.out_dir + "/metrics.csv", report.to_csv());
  lsmap::write_text_file(opts.out_dir + "/summary.json", report.summary_json());
  std::printf("experiment: %zu rows -> %s/metrics.csv\n", report.rows.size(), opts.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probabilistic LoS link-state mapping for cellular-connected UAVs"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string env_path, meas_path, truth_path, map_path, method = "proposed";
  bool timing = false;

  auto add_common = [&](CLI::App* sub, bool with_out = true) {
    sub->add_option("--config", opts.config_path, "configuration file");
    sub->add_option("--seed", opts.seed, "master seed (overrides config)")
        ->each([&](const std::string&) { opts.seed_given = true; });
    if (with_out) sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--workers", opts.workers, "worker thread cap");
  };

  CLI::App* gen = app.add_subcommand("gen-env", "generate an urban map and its ground-truth LSM");
  add_common(gen);

  CLI::App* sample = app.add_subcommand("sample", "sample channel measurements over a trajectory");
  add_common(sample);
  sample->add_option("--env", env_path, "building list file")->required();

  CLI::App* build = app.add_subcommand("build", "construct a probability map from measurements");
  add_common(build);
  build->add_option("--env", env_path, "building list file (optional, validated only)");
  build->add_option("--measurements", meas_path, "measurement CSV")->required();
  build->add_option("--method", method, "prior|knn|dist-only|proposed");

  CLI::App* evalc = app.add_subcommand("eval", "print the MAE between a truth and a map raster");
  evalc->add_option("--truth", truth_path, "truth CSV")->required();
  evalc->add_option("--map", map_path, "probability CSV")->required();

  CLI::App* experiment = app.add_subcommand("experiment", "run the full Monte-Carlo benchmark");
  add_common(experiment);
  experiment->add_flag("--timing", timing, "record per-row wall time (breaks byte reproducibility)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_env(opts);
    if (sample->parsed()) return cmd_sample(opts, env_path);
    if (build->parsed()) return cmd_build(opts, env_path, meas_path, method);
    if (evalc->parsed()) return cmd_eval(truth_path, map_path);
    if (experiment->parsed()) return cmd_experiment(opts, timing);
  } catch (const lsmap::io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const lsmap::config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 1;
}
