#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mapforge/errors.hpp"

namespace mapforge {

struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Point() = default;
  Point(double x, double y, double z = 0.0) : x(x), y(y), z(z) {}

  Point operator+(const Point& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Point operator-(const Point& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Point operator*(double s) const { return {x * s, y * s, z * s}; }
  Point& operator+=(const Point& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Point& operator-=(const Point& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
};

inline double dot(const Point& a, const Point& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }
inline double euclidean(const Point& a, const Point& b) { return norm(a - b); }
inline double manhattan(const Point& a, const Point& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
}

enum class ElementClass : int {
  ped_crossing = 0,
  divider = 1,
  boundary = 2,
  centerline = 3,
};

inline constexpr int kNumClasses = 4;
inline constexpr ElementClass kAllClasses[kNumClasses] = {
    ElementClass::ped_crossing, ElementClass::divider, ElementClass::boundary,
    ElementClass::centerline};

std::string to_string(ElementClass c);
ElementClass element_class_from_string(const std::string& s);

// Structural flags implied by the class: crossings are closed polygons,
// centerlines are directed polylines, dividers/boundaries open undirected.
inline bool class_is_closed(ElementClass c) {
  return c == ElementClass::ped_crossing;
}
inline bool class_is_directed(ElementClass c) {
  return c == ElementClass::centerline;
}

// One map element: a classed, discretized point set. Closed elements store
// their ring without repeating the start point; the wrap edge is implicit.
struct MapElement {
  ElementClass cls = ElementClass::divider;
  std::vector<Point> points;
  bool closed = false;
  bool directed = false;
};

MapElement make_element(ElementClass cls, std::vector<Point> points);

// An index map gamma: output[j] = input[gamma[j]].
using Permutation = std::vector<int>;

// The group of point orderings equivalent for an element's geometry.
// The identity is always first.
struct PermutationGroup {
  std::vector<Permutation> permutations;

  std::size_t size() const { return permutations.size(); }
  const Permutation& operator[](std::size_t k) const {
    return permutations[k];
  }
};

// Group sizes: 2 (open undirected), 2n (closed; degenerates to 2 at n == 2
// where shifts and reversals coincide), 1 (directed).
PermutationGroup permutation_group(bool closed, bool directed, int n);

inline PermutationGroup permutation_group(const MapElement& e) {
  return permutation_group(e.closed, e.directed,
                           static_cast<int>(e.points.size()));
}

std::vector<Point> apply_permutation(const std::vector<Point>& points,
                                     const Permutation& gamma);

// Resample a chain (ring when closed) to exactly n points equidistant in arc
// length. The first output point coincides with the first input point; open
// chains also keep the last input point.
std::vector<Point> resample(const std::vector<Point>& raw_points, bool closed,
                            int n);

struct PerceptionRange {
  double x_min = -15.0;
  double x_max = 15.0;
  double y_min = -30.0;
  double y_max = 30.0;
  // z bounds are optional; z_min == z_max means "no z bounds" and leaves z
  // untouched by normalize/denormalize (the 2D case).
  double z_min = 0.0;
  double z_max = 0.0;

  bool has_z() const { return z_max > z_min; }
  bool valid() const {
    return x_min < x_max && y_min < y_max && z_min <= z_max;
  }
  bool contains(const Point& p, double eps = 1e-9) const {
    bool in = p.x >= x_min - eps && p.x <= x_max + eps && p.y >= y_min - eps &&
              p.y <= y_max + eps;
    if (has_z()) in = in && p.z >= z_min - eps && p.z <= z_max + eps;
    return in;
  }
};

// Affine map of each bounded axis to [0,1]. Out-of-range points map outside
// [0,1]; that is permitted.
Point normalize(const Point& p, const PerceptionRange& range);
Point denormalize(const Point& p, const PerceptionRange& range);
std::vector<Point> normalize(const std::vector<Point>& pts,
                             const PerceptionRange& range);
std::vector<Point> denormalize(const std::vector<Point>& pts,
                               const PerceptionRange& range);

struct Scene {
  std::vector<MapElement> elements;
  PerceptionRange range;
  int dim = 2;
};

}  // namespace mapforge
