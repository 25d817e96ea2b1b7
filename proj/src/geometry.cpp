#include "mapforge/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mapforge {

std::string to_string(ElementClass c) {
  switch (c) {
    case ElementClass::ped_crossing:
      return "ped_crossing";
    case ElementClass::divider:
      return "divider";
    case ElementClass::boundary:
      return "boundary";
    case ElementClass::centerline:
      return "centerline";
  }
  return "unknown";
}

ElementClass element_class_from_string(const std::string& s) {
  if (s == "ped_crossing") return ElementClass::ped_crossing;
  if (s == "divider") return ElementClass::divider;
  if (s == "boundary") return ElementClass::boundary;
  if (s == "centerline") return ElementClass::centerline;
  throw ParseError("unknown element class: " + s);
}

MapElement make_element(ElementClass cls, std::vector<Point> points) {
  MapElement e;
  e.cls = cls;
  e.points = std::move(points);
  e.closed = class_is_closed(cls);
  e.directed = class_is_directed(cls);
  return e;
}

PermutationGroup permutation_group(bool closed, bool directed, int n) {
  PermutationGroup group;
  Permutation identity(n);
  for (int j = 0; j < n; ++j) identity[j] = j;

  if (directed) {
    group.permutations.push_back(std::move(identity));
    return group;
  }

  Permutation reversal(n);
  for (int j = 0; j < n; ++j) reversal[j] = n - 1 - j;

  if (!closed) {
    group.permutations.push_back(std::move(identity));
    group.permutations.push_back(std::move(reversal));
    return group;
  }

  // Closed: all n cyclic shifts and their reversals, identity first.
  // gamma_{2k}(j) = (j+k) % n, gamma_{2k+1}(j) = (n-1) - ((j+k) % n).
  for (int k = 0; k < n; ++k) {
    Permutation shift(n), shift_rev(n);
    for (int j = 0; j < n; ++j) {
      int s = (j + k) % n;
      shift[j] = s;
      shift_rev[j] = n - 1 - s;
    }
    group.permutations.push_back(std::move(shift));
    group.permutations.push_back(std::move(shift_rev));
  }
  // The n == 2 ring degenerates: shift-by-1 equals the reversal. Drop
  // duplicates, keeping first occurrences so the identity stays at index 0.
  if (n == 2) {
    std::vector<Permutation> unique;
    for (auto& g : group.permutations) {
      if (std::find(unique.begin(), unique.end(), g) == unique.end())
        unique.push_back(g);
    }
    group.permutations = std::move(unique);
  }
  return group;
}

std::vector<Point> apply_permutation(const std::vector<Point>& points,
                                     const Permutation& gamma) {
  if (points.size() != gamma.size())
    throw ShapeMismatch("apply_permutation: point count " +
                        std::to_string(points.size()) +
                        " != permutation size " + std::to_string(gamma.size()));
  std::vector<Point> out(points.size());
  for (std::size_t j = 0; j < gamma.size(); ++j) out[j] = points[gamma[j]];
  return out;
}

std::vector<Point> resample(const std::vector<Point>& raw_points, bool closed,
                            int n) {
  if (raw_points.size() < 2)
    throw DegenerateGeometry("resample: need at least 2 input points");
  if (n < 2) throw DegenerateGeometry("resample: need n >= 2");

  // Cumulative arc length along the chain; closed chains get the wrap edge.
  std::vector<Point> chain = raw_points;
  if (closed) chain.push_back(raw_points.front());
  const std::size_t m = chain.size();
  std::vector<double> cum(m, 0.0);
  for (std::size_t i = 1; i < m; ++i)
    cum[i] = cum[i - 1] + euclidean(chain[i - 1], chain[i]);
  const double total = cum.back();
  if (!(total > 0.0))
    throw DegenerateGeometry("resample: zero total arc length");

  std::vector<Point> out(n);
  const int segments = closed ? n : n - 1;
  std::size_t seg = 0;
  for (int i = 0; i < n; ++i) {
    const double target = total * static_cast<double>(i) / segments;
    while (seg + 2 < m && cum[seg + 1] <= target) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    if (len <= 0.0) {
      out[i] = chain[seg];
      continue;
    }
    const double t = (target - cum[seg]) / len;
    out[i] = chain[seg] + (chain[seg + 1] - chain[seg]) * t;
  }
  out.front() = raw_points.front();
  if (!closed) out.back() = raw_points.back();
  return out;
}

Point normalize(const Point& p, const PerceptionRange& r) {
  Point out;
  out.x = (p.x - r.x_min) / (r.x_max - r.x_min);
  out.y = (p.y - r.y_min) / (r.y_max - r.y_min);
  out.z = r.has_z() ? (p.z - r.z_min) / (r.z_max - r.z_min) : p.z;
  return out;
}

Point denormalize(const Point& p, const PerceptionRange& r) {
  Point out;
  out.x = r.x_min + p.x * (r.x_max - r.x_min);
  out.y = r.y_min + p.y * (r.y_max - r.y_min);
  out.z = r.has_z() ? r.z_min + p.z * (r.z_max - r.z_min) : p.z;
  return out;
}

std::vector<Point> normalize(const std::vector<Point>& pts,
                             const PerceptionRange& r) {
  std::vector<Point> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = normalize(pts[i], r);
  return out;
}

std::vector<Point> denormalize(const std::vector<Point>& pts,
                               const PerceptionRange& r) {
  std::vector<Point> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = denormalize(pts[i], r);
  return out;
}

}  // namespace mapforge
