#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsmap/eval.hpp"
#include "lsmap/io.hpp"

namespace lsmap {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

/// Flat `[section]` / `key = value` file with `#` comments. Keys are stored
/// as `section.key`.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_string(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw config_error(origin + ":" + std::to_string(lineno) + ": unterminated section");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw config_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
      cfg.entries_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
  }

  double get_double(const std::string& key, double fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_.insert(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw config_error("config: key '" + key + "' is not a number: '" + it->second + "'");
    }
  }

  long long get_int(const std::string& key, long long fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_.insert(key);
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw config_error("config: key '" + key + "' is not an integer: '" + it->second + "'");
    }
  }

  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_.insert(key);
    try {
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw config_error("config: key '" + key + "' is not an unsigned integer: '" + it->second +
                         "'");
    }
  }

  bool get_bool(const std::string& key, bool fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_.insert(key);
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw config_error("config: key '" + key + "' is not a boolean: '" + it->second + "'");
  }

  std::string get_string(const std::string& key, const std::string& fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_.insert(key);
    return it->second;
  }

  std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_.insert(key);
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument("");
      } catch (...) {
        throw config_error("config: key '" + key + "' has a non-numeric entry: '" + item + "'");
      }
    }
    if (out.empty()) throw config_error("config: key '" + key + "' is an empty list");
    return out;
  }

  void reject_unknown_keys() const {
    for (const auto& [key, value] : entries_)
      if (!consumed_.count(key)) throw config_error("config: unknown key '" + key + "'");
  }

 private:
  std::map<std::string, std::string> entries_;
  std::set<std::string> consumed_;
};

}  // namespace detail

/// Parse an experiment configuration; every key is optional and defaults to
/// the stock 28 GHz urban scenario.
inline ExperimentConfig parse_config_string(const std::string& text, const std::string& origin) {
  detail::KeyValueConfig kv = detail::KeyValueConfig::parse_string(text, origin);
  ExperimentConfig cfg;

  cfg.scene.width = kv.get_double("scene.width", cfg.scene.width);
  cfg.scene.length = kv.get_double("scene.length", cfg.scene.length);
  cfg.scene.uav_height = kv.get_double("scene.uav_height", cfg.scene.uav_height);
  cfg.scene.bs_position.x = kv.get_double("scene.bs_x", cfg.scene.width / 2.0);
  cfg.scene.bs_position.y = kv.get_double("scene.bs_y", cfg.scene.length / 2.0);
  cfg.scene.bs_antenna_height = kv.get_double("scene.bs_antenna_height", cfg.scene.bs_antenna_height);
  cfg.scene.grid_step = kv.get_double("scene.grid_step", cfg.scene.grid_step);

  cfg.urban.density_per_km2 = kv.get_double("urban.density_per_km2", cfg.urban.density_per_km2);
  cfg.urban.side_min = kv.get_double("urban.side_min", cfg.urban.side_min);
  cfg.urban.side_max = kv.get_double("urban.side_max", cfg.urban.side_max);
  cfg.urban.height_scale = kv.get_double("urban.height_scale", cfg.urban.height_scale);
  cfg.urban.max_retries = static_cast<int>(kv.get_int("urban.max_retries", cfg.urban.max_retries));

  cfg.prior.a = kv.get_double("prior.a", cfg.prior.a);
  cfg.prior.b = kv.get_double("prior.b", cfg.prior.b);
  cfg.prior.c = kv.get_double("prior.c", cfg.prior.c);
  cfg.prior.d = kv.get_double("prior.d", cfg.prior.d);
  cfg.prior.e = kv.get_double("prior.e", cfg.prior.e);

  cfg.channel.alpha_los = kv.get_double("channel.alpha_los", cfg.channel.alpha_los);
  cfg.channel.beta_los = kv.get_double("channel.beta_los", cfg.channel.beta_los);
  cfg.channel.sigma2_los = kv.get_double("channel.sigma2_los", cfg.channel.sigma2_los);
  cfg.channel.alpha_nlos = kv.get_double("channel.alpha_nlos", cfg.channel.alpha_nlos);
  cfg.channel.beta_nlos = kv.get_double("channel.beta_nlos", cfg.channel.beta_nlos);
  cfg.channel.sigma2_nlos = kv.get_double("channel.sigma2_nlos", cfg.channel.sigma2_nlos);
  cfg.channel.sigma2_noise = kv.get_double("channel.sigma2_noise", cfg.channel.sigma2_noise);
  cfg.channel.carrier_ghz = kv.get_double("channel.carrier_ghz", cfg.channel.carrier_ghz);

  cfg.correlation.beta = kv.get_double("correlation.beta", cfg.correlation.beta);
  cfg.correlation.phi_th = kv.get_double("correlation.phi_th", cfg.correlation.phi_th);

  cfg.grid_directions = static_cast<int>(kv.get_int("grid.directions", cfg.grid_directions));
  cfg.grid_radial_step = kv.get_double("grid.radial_step", cfg.grid_radial_step);

  cfg.baseline.k = static_cast<int>(kv.get_int("baseline.k", cfg.baseline.k));
  cfg.baseline.resample_step = kv.get_double("baseline.resample_step", cfg.baseline.resample_step);
  cfg.baseline.weight_epsilon = kv.get_double("baseline.weight_epsilon", cfg.baseline.weight_epsilon);

  const std::string strategy = kv.get_string("sampling.strategy", "circular");
  if (strategy == "circular")
    cfg.sampling.strategy = SamplingConfig::Strategy::circular;
  else if (strategy == "per_direction_random")
    cfg.sampling.strategy = SamplingConfig::Strategy::per_direction_random;
  else
    throw config_error("config: key 'sampling.strategy' must be 'circular' or "
                       "'per_direction_random', got '" + strategy + "'");
  cfg.sampling.ring_step = kv.get_double("sampling.ring_step", cfg.sampling.ring_step);
  cfg.sampling.delta_phi = kv.get_double("sampling.delta_phi", cfg.sampling.delta_phi);
  cfg.sampling.n_per_direction =
      static_cast<int>(kv.get_int("sampling.n_per_direction", cfg.sampling.n_per_direction));

  cfg.n_maps = static_cast<int>(kv.get_int("experiment.n_maps", cfg.n_maps));
  cfg.n_monte_carlo = static_cast<int>(kv.get_int("experiment.n_monte_carlo", cfg.n_monte_carlo));
  const std::string methods = kv.get_string("experiment.methods", "prior,knn,dist_only,proposed");
  cfg.methods.clear();
  {
    std::istringstream ss(methods);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (item.empty()) continue;
      const auto m = parse_method(item);
      if (!m)
        throw config_error("config: key 'experiment.methods' has unknown method '" + item + "'");
      cfg.methods.push_back(*m);
    }
    if (cfg.methods.empty()) throw config_error("config: key 'experiment.methods' is empty");
  }
  cfg.sweep_name = kv.get_string("experiment.sweep", cfg.sweep_name);
  cfg.sweep_values = kv.get_double_list("experiment.sweep_values", cfg.sweep_values);
  cfg.master_seed = kv.get_uint64("experiment.seed", cfg.master_seed);
  cfg.workers = static_cast<int>(kv.get_int("experiment.workers", cfg.workers));
  cfg.record_timing = kv.get_bool("experiment.timing", cfg.record_timing);

  kv.reject_unknown_keys();
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  return parse_config_string(read_text_file(path), path);
}

}  // namespace lsmap
