#pragma once

#include <cmath>
#include <numbers>

namespace egonav {

struct Vec2 {
  double x = 0.0;  // east, meters
  double y = 0.0;  // north, meters
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

// compass convention: 0 = north (+y), 90 = east (+x), clockwise positive
inline Vec2 heading_dir(double heading_deg) {
  const double r = deg_to_rad(heading_deg);
  return {std::sin(r), std::cos(r)};
}

inline double bearing_deg(Vec2 from, Vec2 to) {
  const double d = rad_to_deg(std::atan2(to.x - from.x, to.y - from.y));
  return d < 0.0 ? d + 360.0 : d;
}

inline double wrap_heading(double deg) {
  double h = std::fmod(deg, 360.0);
  if (h < 0.0) h += 360.0;
  return h == 360.0 ? 0.0 : h;
}

// distance from p to segment [a, b]
inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  double u = dot(p - a, ab) / len2;
  u = u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u);
  return norm(p - (a + u * ab));
}

}  // namespace egonav
