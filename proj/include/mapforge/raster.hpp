#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mapforge/geometry.hpp"

namespace mapforge {

// Binary occupancy grid. Row 0 is the top of the image: the y_max side for
// BEV masks, the v=0 row for camera masks.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // row-major, values 0/1

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), data(w * h, 0) {}

  std::uint8_t& at(int row, int col) { return data[row * width + col]; }
  std::uint8_t at(int row, int col) const { return data[row * width + col]; }
  std::size_t count_on() const {
    std::size_t c = 0;
    for (auto v : data) c += v;
    return c;
  }
};

// Binary P5 PGM (0 / 255).
std::string mask_to_pgm(const Mask& mask);

struct BEVGridSpec {
  PerceptionRange range;
  double cell_size = 0.3;  // meters

  int grid_width() const;   // cells along x
  int grid_height() const;  // cells along y
};

struct BEVRasterOptions {
  // Pedestrian crossings render as boundary outline unless filled.
  bool fill_polygons = false;
};

// Cells whose center lies within line_width/2 of any element's polyline (or
// polygon boundary) are set.
Mask rasterize_bev(const Scene& scene, const BEVGridSpec& spec,
                   double line_width, const BEVRasterOptions& opts = {});

using Mat3 = std::array<std::array<double, 3>, 3>;

// Pinhole camera. Extrinsics map ego coordinates to camera coordinates
// (p_cam = R p + t), camera looks along +z_cam, u right, v down.
struct Camera {
  Mat3 intrinsics{};
  Mat3 rotation{};
  Point translation{};
  int image_width = 0;
  int image_height = 0;

  bool valid(double eps = 1e-9) const;
  Point to_camera(const Point& ego) const;
  // (u, v) pixel coordinates of a camera-frame point with z > 0.
  std::array<double, 2> project(const Point& cam) const;
};

// Front-looking camera at `position` (ego frame, z up), yaw in radians about
// ego z (0 = facing +y).
Camera make_camera(double fx, double fy, double cx, double cy, int width,
                   int height, const Point& position, double yaw = 0.0,
                   double pitch = 0.0, double roll = 0.0);

struct PVRasterOptions {
  double near_plane = 0.1;  // meters; edges clipped, never mirrored
};

// Edges clipped against the near plane, projected by the pinhole model, and
// rasterized with the given pixel width. A fully behind-camera scene yields
// an empty mask.
Mask project_to_pv(const Scene& scene, const Camera& camera,
                   double line_width_px, const PVRasterOptions& opts = {});

}  // namespace mapforge
