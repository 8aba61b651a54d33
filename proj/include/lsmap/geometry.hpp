#pragma once

#include <algorithm>
#include <cmath>

namespace lsmap {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }

inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

inline double squared_distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Axis-aligned building box over [x_min,x_max]x[y_min,y_max], extruded from
/// the ground plane z=0 up to z=height.
struct Box {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double height = 0.0;

  bool footprint_contains(Vec2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  bool interior_contains(const Vec3& p) const {
    return p.x > x_min && p.x < x_max && p.y > y_min && p.y < y_max && p.z > 0.0 &&
           p.z < height;
  }
  bool footprint_overlaps(const Box& o) const {
    return x_min < o.x_max && o.x_min < x_max && y_min < o.y_max && o.y_min < y_max;
  }
};

/// True iff the open segment (p0,p1) passes through the interior of the box.
/// Slab clipping per axis; grazing a face or edge does not count as blocked.
inline bool segment_intersects_box(const Vec3& p0, const Vec3& p1, const Box& b) {
  double t_lo = 0.0;
  double t_hi = 1.0;
  const double o[3] = {p0.x, p0.y, p0.z};
  const double d[3] = {p1.x - p0.x, p1.y - p0.y, p1.z - p0.z};
  const double lo[3] = {b.x_min, b.y_min, 0.0};
  const double hi[3] = {b.x_max, b.y_max, b.height};
  for (int a = 0; a < 3; ++a) {
    if (d[a] == 0.0) {
      if (o[a] <= lo[a] || o[a] >= hi[a]) return false;
    } else {
      double t1 = (lo[a] - o[a]) / d[a];
      double t2 = (hi[a] - o[a]) / d[a];
      if (t1 > t2) std::swap(t1, t2);
      t_lo = std::max(t_lo, t1);
      t_hi = std::min(t_hi, t2);
      if (t_lo >= t_hi) return false;
    }
  }
  return true;
}

}  // namespace lsmap
