#include "mapforge/raster.hpp"

#include <algorithm>
#include <cmath>

namespace mapforge {

namespace {

// Distance from p to segment [a, b] in the plane spanned by the first two
// coordinates (callers pass 2D data).
double point_segment_dist_2d(double px, double py, double ax, double ay,
                             double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((px - ax) * dx + (py - ay) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double qx = ax + t * dx, qy = ay + t * dy;
  return std::hypot(px - qx, py - qy);
}

// Even-odd point-in-polygon on (x, y).
bool point_in_polygon(double px, double py, const std::vector<Point>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const bool crosses = (poly[i].y > py) != (poly[j].y > py);
    if (!crosses) continue;
    const double x_at = poly[j].x + (poly[i].x - poly[j].x) *
                                        (py - poly[j].y) /
                                        (poly[i].y - poly[j].y);
    if (px < x_at) inside = !inside;
  }
  return inside;
}

}  // namespace

std::string mask_to_pgm(const Mask& mask) {
  std::string out = "P5\n" + std::to_string(mask.width) + " " +
                    std::to_string(mask.height) + "\n255\n";
  out.reserve(out.size() + mask.data.size());
  for (auto v : mask.data) out.push_back(v ? static_cast<char>(255) : 0);
  return out;
}

int BEVGridSpec::grid_width() const {
  return static_cast<int>(
      std::ceil((range.x_max - range.x_min) / cell_size - 1e-9));
}

int BEVGridSpec::grid_height() const {
  return static_cast<int>(
      std::ceil((range.y_max - range.y_min) / cell_size - 1e-9));
}

Mask rasterize_bev(const Scene& scene, const BEVGridSpec& spec,
                   double line_width, const BEVRasterOptions& opts) {
  const int w = spec.grid_width();
  const int h = spec.grid_height();
  Mask mask(w, h);
  const double half = line_width / 2.0;
  const double cell = spec.cell_size;

  // Row 0 = y_max side (image convention); cell centers.
  auto col_x = [&](int c) { return spec.range.x_min + (c + 0.5) * cell; };
  auto row_y = [&](int r) { return spec.range.y_max - (r + 0.5) * cell; };
  auto x_to_col = [&](double x) {
    return static_cast<int>(std::floor((x - spec.range.x_min) / cell));
  };
  auto y_to_row = [&](double y) {
    return static_cast<int>(std::floor((spec.range.y_max - y) / cell));
  };

  for (const auto& el : scene.elements) {
    const auto& pts = el.points;
    if (pts.size() < 2) continue;
    const std::size_t edges = el.closed ? pts.size() : pts.size() - 1;
    for (std::size_t e = 0; e < edges; ++e) {
      const Point& a = pts[e];
      const Point& b = pts[(e + 1) % pts.size()];
      // Only cells inside the edge's padded bounding box can turn on.
      const int c0 = std::max(0, x_to_col(std::min(a.x, b.x) - half) - 1);
      const int c1 = std::min(w - 1, x_to_col(std::max(a.x, b.x) + half) + 1);
      const int r0 = std::max(0, y_to_row(std::max(a.y, b.y) + half) - 1);
      const int r1 = std::min(h - 1, y_to_row(std::min(a.y, b.y) - half) + 1);
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
          if (mask.at(r, c)) continue;
          if (point_segment_dist_2d(col_x(c), row_y(r), a.x, a.y, b.x, b.y) <=
              half)
            mask.at(r, c) = 1;
        }
      }
    }
    if (opts.fill_polygons && el.closed && pts.size() >= 3) {
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
          if (!mask.at(r, c) && point_in_polygon(col_x(c), row_y(r), pts))
            mask.at(r, c) = 1;
    }
  }
  return mask;
}

bool Camera::valid(double eps) const {
  if (image_width <= 0 || image_height <= 0) return false;
  if (!(intrinsics[0][0] > 0.0) || !(intrinsics[1][1] > 0.0)) return false;
  // R R^T == I within eps.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += rotation[i][k] * rotation[j][k];
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > eps) return false;
    }
  }
  return true;
}

Point Camera::to_camera(const Point& ego) const {
  const auto& R = rotation;
  return {R[0][0] * ego.x + R[0][1] * ego.y + R[0][2] * ego.z + translation.x,
          R[1][0] * ego.x + R[1][1] * ego.y + R[1][2] * ego.z + translation.y,
          R[2][0] * ego.x + R[2][1] * ego.y + R[2][2] * ego.z + translation.z};
}

std::array<double, 2> Camera::project(const Point& cam) const {
  const auto& K = intrinsics;
  const double u = K[0][0] * cam.x + K[0][1] * cam.y + K[0][2] * cam.z;
  const double v = K[1][0] * cam.x + K[1][1] * cam.y + K[1][2] * cam.z;
  const double w = K[2][0] * cam.x + K[2][1] * cam.y + K[2][2] * cam.z;
  return {u / w, v / w};
}

namespace {

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

}  // namespace

Camera make_camera(double fx, double fy, double cx, double cy, int width,
                   int height, const Point& position, double yaw, double pitch,
                   double roll) {
  Camera cam;
  cam.intrinsics = {{{fx, 0.0, cx}, {0.0, fy, cy}, {0.0, 0.0, 1.0}}};
  cam.image_width = width;
  cam.image_height = height;

  // Base orientation: camera z = ego +y (forward), camera x = ego +x
  // (right), camera y = ego -z (down).
  const Mat3 base = {{{1, 0, 0}, {0, 0, -1}, {0, 1, 0}}};
  const double cy_ = std::cos(yaw), sy = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cr = std::cos(roll), sr = std::sin(roll);
  // Mount orientation in ego frame: yaw about ego z, then pitch about the
  // camera x axis, then roll about the camera z axis.
  const Mat3 rz_yaw = {{{cy_, sy, 0}, {-sy, cy_, 0}, {0, 0, 1}}};
  const Mat3 rx_pitch = {{{1, 0, 0}, {0, cp, -sp}, {0, sp, cp}}};
  const Mat3 rz_roll = {{{cr, -sr, 0}, {sr, cr, 0}, {0, 0, 1}}};
  cam.rotation = mat_mul(rz_roll, mat_mul(rx_pitch, mat_mul(base, rz_yaw)));

  const Point rc = {cam.rotation[0][0] * position.x +
                        cam.rotation[0][1] * position.y +
                        cam.rotation[0][2] * position.z,
                    cam.rotation[1][0] * position.x +
                        cam.rotation[1][1] * position.y +
                        cam.rotation[1][2] * position.z,
                    cam.rotation[2][0] * position.x +
                        cam.rotation[2][1] * position.y +
                        cam.rotation[2][2] * position.z};
  cam.translation = {-rc.x, -rc.y, -rc.z};
  return cam;
}

Mask project_to_pv(const Scene& scene, const Camera& camera,
                   double line_width_px, const PVRasterOptions& opts) {
  Mask mask(camera.image_width, camera.image_height);
  const double half = line_width_px / 2.0;
  const double eps = opts.near_plane;

  for (const auto& el : scene.elements) {
    const auto& pts = el.points;
    if (pts.size() < 2) continue;
    const std::size_t edges = el.closed ? pts.size() : pts.size() - 1;
    for (std::size_t e = 0; e < edges; ++e) {
      Point a = camera.to_camera(pts[e]);
      Point b = camera.to_camera(pts[(e + 1) % pts.size()]);
      if (a.z <= eps && b.z <= eps) continue;
      // Clip against the near plane z_cam = eps.
      if (a.z <= eps) {
        const double t = (eps - a.z) / (b.z - a.z);
        a = a + (b - a) * t;
      } else if (b.z <= eps) {
        const double t = (eps - b.z) / (a.z - b.z);
        b = b + (a - b) * t;
      }
      const auto ua = camera.project(a);
      const auto ub = camera.project(b);
      const int c0 = std::max(
          0, static_cast<int>(std::floor(std::min(ua[0], ub[0]) - half)) - 1);
      const int c1 = std::min(
          mask.width - 1,
          static_cast<int>(std::ceil(std::max(ua[0], ub[0]) + half)) + 1);
      const int r0 = std::max(
          0, static_cast<int>(std::floor(std::min(ua[1], ub[1]) - half)) - 1);
      const int r1 = std::min(
          mask.height - 1,
          static_cast<int>(std::ceil(std::max(ua[1], ub[1]) + half)) + 1);
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
          if (mask.at(r, c)) continue;
          if (point_segment_dist_2d(c + 0.5, r + 0.5, ua[0], ua[1], ub[0],
                                    ub[1]) <= half)
            mask.at(r, c) = 1;
        }
      }
    }
  }
  return mask;
}

}  // namespace mapforge
