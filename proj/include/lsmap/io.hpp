#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lsmap/channel.hpp"
#include "lsmap/env.hpp"
#include "lsmap/grid.hpp"

namespace lsmap {

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  return in;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Raster CSV: first line `width,height,step` (cell counts and cell size),
// then `height` rows of `width` comma-separated values, row 0 at y=0.
// ---------------------------------------------------------------------------

inline void write_truth_csv(const std::string& path, const TruthGrid& grid) {
  auto out = detail::open_output(path);
  out << grid.width << ',' << grid.height << ',' << detail::format_double(grid.step) << '\n';
  for (int iy = 0; iy < grid.height; ++iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      if (ix) out << ',';
      out << static_cast<int>(grid.at(ix, iy));
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

inline void write_probability_csv(const std::string& path, const ProbabilityGrid& grid) {
  auto out = detail::open_output(path);
  out << grid.width << ',' << grid.height << ',' << detail::format_double(grid.step) << '\n';
  for (int iy = 0; iy < grid.height; ++iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      if (ix) out << ',';
      out << detail::format_double(grid.at(ix, iy));
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

inline ProbabilityGrid read_probability_csv(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw io_error("empty raster file: " + path);
  ProbabilityGrid grid;
  if (std::sscanf(line.c_str(), "%d,%d,%lf", &grid.width, &grid.height, &grid.step) != 3 ||
      grid.width <= 0 || grid.height <= 0 || grid.step <= 0.0)
    throw io_error("bad raster header in " + path);
  grid.values.reserve(static_cast<std::size_t>(grid.width) * grid.height);
  for (int iy = 0; iy < grid.height; ++iy) {
    if (!std::getline(in, line)) throw io_error("truncated raster in " + path);
    const char* p = line.c_str();
    for (int ix = 0; ix < grid.width; ++ix) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw io_error("bad raster value in " + path);
      grid.values.push_back(v);
      p = end;
      if (*p == ',') ++p;
    }
  }
  return grid;
}

inline TruthGrid read_truth_csv(const std::string& path) {
  const ProbabilityGrid raw = read_probability_csv(path);
  TruthGrid grid;
  grid.width = raw.width;
  grid.height = raw.height;
  grid.step = raw.step;
  grid.values.reserve(raw.values.size());
  for (double v : raw.values) {
    if (v != 0.0 && v != 1.0) throw io_error("non-binary truth value in " + path);
    grid.values.push_back(static_cast<std::uint8_t>(v));
  }
  return grid;
}

// ---------------------------------------------------------------------------
// 8-bit binary PGM; 0 = NLoS (black), 255 = LoS (white).
// ---------------------------------------------------------------------------

inline void write_pgm(const std::string& path, const TruthGrid& grid) {
  auto out = detail::open_output(path);
  out << "P5\n" << grid.width << ' ' << grid.height << "\n255\n";
  for (std::uint8_t v : grid.values) out.put(v ? static_cast<char>(255) : 0);
  if (!out) throw io_error("write failed: " + path);
}

inline void write_pgm(const std::string& path, const ProbabilityGrid& grid) {
  auto out = detail::open_output(path);
  out << "P5\n" << grid.width << ' ' << grid.height << "\n255\n";
  for (double v : grid.values) {
    const long byte = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
    out.put(static_cast<char>(byte));
  }
  if (!out) throw io_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Building list: one box per line, `x_min x_max y_min y_max height`.
// ---------------------------------------------------------------------------

inline void write_buildings(const std::string& path, const UrbanMap& map) {
  auto out = detail::open_output(path);
  for (const Box& b : map.buildings)
    out << detail::format_double(b.x_min) << ' ' << detail::format_double(b.x_max) << ' '
        << detail::format_double(b.y_min) << ' ' << detail::format_double(b.y_max) << ' '
        << detail::format_double(b.height) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline UrbanMap read_buildings(const std::string& path) {
  auto in = detail::open_input(path);
  UrbanMap map;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Box b;
    if (std::sscanf(line.c_str(), "%lf %lf %lf %lf %lf", &b.x_min, &b.x_max, &b.y_min, &b.y_max,
                    &b.height) != 5)
      throw io_error("bad building at " + path + ":" + std::to_string(lineno));
    map.buildings.push_back(b);
  }
  return map;
}

// ---------------------------------------------------------------------------
// Measurement CSV: header `n,x,y,z_dB`.
// ---------------------------------------------------------------------------

inline void write_measurements_csv(const std::string& path,
                                   const std::vector<Measurement>& measurements) {
  auto out = detail::open_output(path);
  out << "n,x,y,z_dB\n";
  for (const Measurement& m : measurements)
    out << m.index << ',' << detail::format_double(m.location.x) << ','
        << detail::format_double(m.location.y) << ',' << detail::format_double(m.z) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline std::vector<Measurement> read_measurements_csv(const std::string& path) {
  auto in = detail::open_input(path);
  std::vector<Measurement> out;
  std::string line;
  if (!std::getline(in, line)) throw io_error("empty measurement file: " + path);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Measurement m;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &m.index, &m.location.x, &m.location.y,
                    &m.z) != 4)
      throw io_error("bad measurement at " + path + ":" + std::to_string(lineno));
    out.push_back(m);
  }
  return out;
}

/// Debug dump of the polar state: one `direction radial_index log_odds` line
/// per cell.
inline void write_field_text(const std::string& path, const LogOddsField& field) {
  auto out = detail::open_output(path);
  for (int j = 0; j < field.directions(); ++j)
    for (int k = 0; k < field.radial_count(j); ++k)
      out << j << ' ' << k << ' ' << detail::format_double(field.log_odds(j, k)) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline void write_text_file(const std::string& path, const std::string& content) {
  auto out = detail::open_output(path);
  out << content;
  if (!out) throw io_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  auto in = detail::open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lsmap
