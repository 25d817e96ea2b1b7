#include <cmath>

#include "doctest.h"
#include "mapforge/raster.hpp"
#include "mapforge/rng.hpp"

using namespace mapforge;

namespace {

PerceptionRange small_range() {
  PerceptionRange r;
  r.x_min = -1.35;
  r.x_max = 1.35;
  r.y_min = -3.0;
  r.y_max = 3.0;
  return r;
}

// All-cells distance oracle (no bounding boxes).
Mask brute_force_bev(const Scene& scene, const BEVGridSpec& spec,
                     double line_width) {
  Mask mask(spec.grid_width(), spec.grid_height());
  const double half = line_width / 2.0;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      const double x = spec.range.x_min + (c + 0.5) * spec.cell_size;
      const double y = spec.range.y_max - (r + 0.5) * spec.cell_size;
      for (const auto& el : scene.elements) {
        const std::size_t edges =
            el.closed ? el.points.size() : el.points.size() - 1;
        for (std::size_t e = 0; e < edges && !mask.at(r, c); ++e) {
          const Point& a = el.points[e];
          const Point& b = el.points[(e + 1) % el.points.size()];
          const Point d = b - a;
          const double len2 = d.x * d.x + d.y * d.y;
          double t = len2 > 0 ? ((x - a.x) * d.x + (y - a.y) * d.y) / len2 : 0;
          t = std::clamp(t, 0.0, 1.0);
          const double qx = a.x + t * d.x, qy = a.y + t * d.y;
          if (std::hypot(x - qx, y - qy) <= half) mask.at(r, c) = 1;
        }
      }
    }
  }
  return mask;
}

}  // namespace

TEST_CASE("BEVGridSpec dimensions round up cleanly") {
  BEVGridSpec spec;  // default range [-15,15]x[-30,30], 0.3 m cells
  CHECK(spec.grid_width() == 100);
  CHECK(spec.grid_height() == 200);
}

TEST_CASE("rasterize_bev: empty scene gives an all-zero mask") {
  Scene scene;
  scene.range = small_range();
  BEVGridSpec spec{scene.range, 0.3};
  const auto mask = rasterize_bev(scene, spec, 0.3);
  CHECK(mask.count_on() == 0);
}

TEST_CASE("rasterize_bev: centered axis-aligned divider is a 1-cell stripe") {
  Scene scene;
  scene.range = small_range();  // 9 x 20 cells; column 4 centers on x = 0
  std::vector<Point> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({0.0, -3.0 + 6.0 * i / 9.0});
  scene.elements.push_back(make_element(ElementClass::divider, pts));
  BEVGridSpec spec{scene.range, 0.3};
  const auto mask = rasterize_bev(scene, spec, 0.3);
  REQUIRE(mask.width == 9);
  REQUIRE(mask.height == 20);
  for (int r = 0; r < mask.height; ++r)
    for (int c = 0; c < mask.width; ++c)
      CHECK(mask.at(r, c) == (c == 4 ? 1 : 0));
}

TEST_CASE("rasterize_bev: diagonal segment equals the per-cell oracle") {
  Scene scene;
  scene.range = small_range();
  scene.elements.push_back(
      make_element(ElementClass::divider,
                   {{-1.2, -2.7}, {0.3, 0.4}, {1.1, 2.6}}));
  scene.elements.push_back(make_element(
      ElementClass::ped_crossing, {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}));
  BEVGridSpec spec{scene.range, 0.3};
  for (double width : {0.3, 0.6, 1.0}) {
    const auto fast = rasterize_bev(scene, spec, width);
    const auto slow = brute_force_bev(scene, spec, width);
    CHECK(fast.data == slow.data);
  }
}

TEST_CASE("rasterize_bev invariant under group permutations") {
  Rng rng(307);
  Scene scene;
  scene.range = small_range();
  std::vector<Point> poly;
  for (int i = 0; i < 6; ++i) {
    const double a = 2 * 3.14159265358979 * i / 6;
    poly.push_back({0.9 * std::cos(a), 0.9 * std::sin(a)});
  }
  scene.elements.push_back(make_element(ElementClass::ped_crossing, poly));
  scene.elements.push_back(
      make_element(ElementClass::divider,
                   {{-1.0, -2.5}, {-0.2, 0.0}, {0.8, 2.2}}));
  BEVGridSpec spec{scene.range, 0.3};
  const auto base = rasterize_bev(scene, spec, 0.3);
  for (std::size_t which = 0; which < scene.elements.size(); ++which) {
    const auto group = permutation_group(scene.elements[which]);
    for (const auto& gamma : group.permutations) {
      Scene permuted = scene;
      permuted.elements[which].points =
          apply_permutation(scene.elements[which].points, gamma);
      CHECK(rasterize_bev(permuted, spec, 0.3).data == base.data);
    }
  }
}

TEST_CASE("rasterize_bev: polygon fill covers the outline case") {
  Scene scene;
  scene.range = small_range();
  scene.elements.push_back(make_element(
      ElementClass::ped_crossing, {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}));
  BEVGridSpec spec{scene.range, 0.3};
  const auto outline = rasterize_bev(scene, spec, 0.3);
  BEVRasterOptions fill;
  fill.fill_polygons = true;
  const auto filled = rasterize_bev(scene, spec, 0.3, fill);
  CHECK(filled.count_on() > outline.count_on());
  for (std::size_t i = 0; i < outline.data.size(); ++i)
    if (outline.data[i]) CHECK(filled.data[i]);
}

TEST_CASE("empty scene stays empty when cell size doubles") {
  Scene scene;
  scene.range = small_range();
  for (double cell : {0.15, 0.3, 0.6}) {
    BEVGridSpec spec{scene.range, cell};
    CHECK(rasterize_bev(scene, spec, 0.3).count_on() == 0);
  }
}

TEST_CASE("camera: optical-axis point projects to the principal point") {
  const Camera cam =
      make_camera(1000, 1000, 320, 240, 640, 480, {0, 0, 1.6});
  for (double depth : {1.0, 5.0, 42.0}) {
    // Ego point straight ahead of the camera at its own height.
    const Point ego{0.0, depth, 1.6};
    const Point cam_pt = cam.to_camera(ego);
    CHECK(cam_pt.z == doctest::Approx(depth));
    const auto uv = cam.project(cam_pt);
    CHECK(uv[0] == doctest::Approx(320.0));
    CHECK(uv[1] == doctest::Approx(240.0));
  }
}

TEST_CASE("camera validation") {
  Camera cam = make_camera(1000, 1000, 320, 240, 640, 480, {0, 0, 1.6});
  CHECK(cam.valid());
  cam.rotation[0][0] = 2.0;
  CHECK(!cam.valid());
}

TEST_CASE("project_to_pv: scene behind the camera gives an empty mask") {
  Scene scene;
  scene.range = PerceptionRange{};
  std::vector<Point> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({0.0, -20.0 + i, 0.0});
  scene.elements.push_back(make_element(ElementClass::divider, pts));
  const Camera cam =
      make_camera(1000, 1000, 320, 240, 640, 480, {0, 0, 1.6});
  const auto mask = project_to_pv(scene, cam, 3.0);
  CHECK(mask.count_on() == 0);
}

TEST_CASE("project_to_pv: straight line matches per-vertex projection") {
  Scene scene;
  scene.range = PerceptionRange{};
  std::vector<Point> pts;
  for (int i = 0; i < 11; ++i) pts.push_back({1.5, 6.0 + i, 0.0});
  scene.elements.push_back(make_element(ElementClass::divider, pts));
  const double fx = 800, fy = 800, cx = 320, cy = 240;
  const Camera cam = make_camera(fx, fy, cx, cy, 640, 480, {0, 0, 1.6});
  const auto mask = project_to_pv(scene, cam, 3.0);
  CHECK(mask.count_on() > 0);
  for (const auto& p : pts) {
    // Independent pinhole arithmetic: x_cam = x, y_cam = 1.6 - z, z_cam = y.
    const double u = fx * p.x / p.y + cx;
    const double v = fy * (1.6 - p.z) / p.y + cy;
    const int c = static_cast<int>(std::floor(u));
    const int r = static_cast<int>(std::floor(v));
    REQUIRE(c >= 0);
    REQUIRE(c < mask.width);
    REQUIRE(r >= 0);
    REQUIRE(r < mask.height);
    CHECK(mask.at(r, c) == 1);
  }
}

TEST_CASE("project_to_pv commutes with rigid ego motion") {
  Scene scene;
  scene.range = PerceptionRange{};
  scene.elements.push_back(make_element(
      ElementClass::divider, {{-3.0, 8.0, 0.0}, {1.0, 15.0, 0.0},
                              {4.0, 22.0, 0.0}}));
  scene.elements.push_back(make_element(
      ElementClass::ped_crossing,
      {{-2, 10, 0}, {2, 10, 0}, {2, 14, 0}, {-2, 14, 0}}));
  const Camera cam = make_camera(900, 900, 320, 240, 640, 480, {0.4, -0.2, 1.7},
                                 0.05, -0.02, 0.01);

  // Rigid motion p' = A p + b (rotation about z plus translation).
  const double phi = 0.6;
  const double ca = std::cos(phi), sa = std::sin(phi);
  auto apply_motion = [&](const Point& p) {
    return Point{ca * p.x - sa * p.y + 2.0, sa * p.x + ca * p.y - 1.5,
                 p.z + 0.3};
  };
  Scene moved = scene;
  for (auto& el : moved.elements)
    for (auto& p : el.points) p = apply_motion(p);

  // Compensated extrinsics: R' = R A^T, t' = t - R A^T b.
  Camera cam2 = cam;
  const Mat3 a_t = {{{ca, sa, 0}, {-sa, ca, 0}, {0, 0, 1}}};
  Mat3 r2{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r2[i][j] += cam.rotation[i][k] * a_t[k][j];
  cam2.rotation = r2;
  const Point b{2.0, -1.5, 0.3};
  const Point r2b{r2[0][0] * b.x + r2[0][1] * b.y + r2[0][2] * b.z,
                  r2[1][0] * b.x + r2[1][1] * b.y + r2[1][2] * b.z,
                  r2[2][0] * b.x + r2[2][1] * b.y + r2[2][2] * b.z};
  cam2.translation = cam.translation - r2b;
  REQUIRE(cam2.valid(1e-6));

  const auto base = project_to_pv(scene, cam, 3.0);
  const auto moved_mask = project_to_pv(moved, cam2, 3.0);
  CHECK(base.count_on() > 0);
  CHECK(base.data == moved_mask.data);
}

TEST_CASE("mask_to_pgm emits a valid binary P5 header") {
  Mask mask(4, 2);
  mask.at(0, 1) = 1;
  const std::string pgm = mask_to_pgm(mask);
  CHECK(pgm.substr(0, 3) == "P5\n");
  CHECK(pgm.find("4 2\n255\n") != std::string::npos);
  const std::size_t header = pgm.find("255\n") + 4;
  CHECK(pgm.size() - header == 8);
  CHECK(static_cast<unsigned char>(pgm[header + 1]) == 255);
  CHECK(pgm[header] == 0);
}
