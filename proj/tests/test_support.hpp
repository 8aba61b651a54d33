#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "lsmap/env.hpp"
#include "lsmap/rng.hpp"

namespace testsupport {

/// Point-sampling blockage oracle, independent of the slab test: probes
/// interior membership at uniformly spaced parameters plus the midpoints
/// between per-face plane crossings, so even razor-thin crossings are hit.
inline bool blocked_by_sampling(const lsmap::Vec3& p0, const lsmap::Vec3& p1,
                                const lsmap::UrbanMap& map, int uniform_samples = 512) {
  const double o[3] = {p0.x, p0.y, p0.z};
  const double d[3] = {p1.x - p0.x, p1.y - p0.y, p1.z - p0.z};
  std::vector<double> ts;
  ts.reserve(uniform_samples + map.buildings.size() * 14);
  for (int i = 1; i < uniform_samples; ++i)
    ts.push_back(static_cast<double>(i) / uniform_samples);
  std::vector<double> cross;
  for (const lsmap::Box& b : map.buildings) {
    cross.clear();
    const double lo[3] = {b.x_min, b.y_min, 0.0};
    const double hi[3] = {b.x_max, b.y_max, b.height};
    for (int a = 0; a < 3; ++a) {
      if (d[a] == 0.0) continue;
      cross.push_back((lo[a] - o[a]) / d[a]);
      cross.push_back((hi[a] - o[a]) / d[a]);
    }
    cross.push_back(0.0);
    cross.push_back(1.0);
    std::sort(cross.begin(), cross.end());
    for (std::size_t i = 0; i + 1 < cross.size(); ++i) {
      const double mid = 0.5 * (cross[i] + cross[i + 1]);
      if (mid > 0.0 && mid < 1.0) ts.push_back(mid);
    }
  }
  for (double t : ts) {
    const lsmap::Vec3 p{o[0] + t * d[0], o[1] + t * d[1], o[2] + t * d[2]};
    for (const lsmap::Box& b : map.buildings)
      if (b.interior_contains(p)) return true;
  }
  return false;
}

/// Fresh scratch directory under the system temp root.
inline std::string make_temp_dir(const std::string& tag) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("lsmap_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir.string();
}

/// Run a shell command, returning its exit status and capturing stdout+stderr.
inline int run_command(const std::string& cmd, std::string* output = nullptr) {
  const std::string capture = make_temp_dir("cmd") + "/out.txt";
  const int rc = std::system((cmd + " > " + capture + " 2>&1").c_str());
  if (output) {
    output->clear();
    if (FILE* f = std::fopen(capture.c_str(), "rb")) {
      char buf[4096];
      std::size_t n;
      while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) output->append(buf, n);
      std::fclose(f);
    }
  }
  if (rc == -1) return -1;
  return WEXITSTATUS(rc);
}

}  // namespace testsupport
