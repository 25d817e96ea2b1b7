#include "mapforge/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "mapforge/rng.hpp"

namespace mapforge {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kPlacementAttempts = 200;

bool all_inside(const std::vector<Point>& pts, const PerceptionRange& range) {
  for (const auto& p : pts)
    if (!range.contains(p)) return false;
  return true;
}

// Smoothed random walk: fixed-length segments with per-step turn bounded by
// max_turn. Returns an empty vector when no in-range placement was found.
std::vector<Point> random_walk_chain(Rng& rng, const PerceptionRange& range,
                                     double len_min, double len_max,
                                     double max_turn) {
  constexpr int kSegments = 8;
  for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
    const double total_len = rng.uniform(len_min, len_max);
    const double step = total_len / kSegments;
    const double margin = 0.5;
    Point p{rng.uniform(range.x_min + margin, range.x_max - margin),
            rng.uniform(range.y_min + margin, range.y_max - margin), 0.0};
    double heading = rng.uniform(0.0, 2.0 * kPi);
    std::vector<Point> pts{p};
    for (int s = 0; s < kSegments; ++s) {
      heading += rng.uniform(-max_turn, max_turn);
      p = p + Point{step * std::cos(heading), step * std::sin(heading), 0.0};
      pts.push_back(p);
    }
    if (all_inside(pts, range)) return pts;
  }
  return {};
}

std::vector<Point> quadrilateral(Rng& rng, const PerceptionRange& range,
                                 double size_min, double size_max) {
  for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
    const double w = rng.uniform(size_min, size_max);
    const double h = rng.uniform(size_min, size_max);
    const double angle = rng.uniform(0.0, kPi);
    const Point center{rng.uniform(range.x_min + w, range.x_max - w),
                       rng.uniform(range.y_min + h, range.y_max - h), 0.0};
    const double ca = std::cos(angle), sa = std::sin(angle);
    auto corner = [&](double dx, double dy) {
      return center + Point{dx * ca - dy * sa, dx * sa + dy * ca, 0.0};
    };
    // Counter-clockwise before rotation.
    std::vector<Point> pts{corner(-w / 2, -h / 2), corner(w / 2, -h / 2),
                           corner(w / 2, h / 2), corner(-w / 2, h / 2)};
    if (all_inside(pts, range)) return pts;
  }
  return {};
}

// Centerlines are directed lateral offsets of a divider-style walk.
std::vector<Point> offset_chain(Rng& rng, const PerceptionRange& range,
                                double len_min, double len_max,
                                double max_turn) {
  for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
    auto base = random_walk_chain(rng, range, len_min, len_max, max_turn);
    if (base.empty()) return {};
    const double offset = rng.uniform(1.0, 2.0);
    std::vector<Point> pts(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      const Point& a = base[i > 0 ? i - 1 : 0];
      const Point& b = base[i + 1 < base.size() ? i + 1 : base.size() - 1];
      const Point d = b - a;
      const double n = std::hypot(d.x, d.y);
      if (n == 0.0) {
        pts[i] = base[i];
        continue;
      }
      pts[i] = base[i] + Point{-d.y / n * offset, d.x / n * offset, 0.0};
    }
    if (all_inside(pts, range)) return pts;
  }
  return {};
}

void assign_z(std::vector<Point>& pts, Rng& rng, const SceneRecipe& recipe) {
  if (recipe.dim != 3 || !recipe.range.has_z()) return;
  // Gentle constant height per element, away from the z bounds.
  const double span = recipe.range.z_max - recipe.range.z_min;
  const double z =
      rng.uniform(recipe.range.z_min + 0.1 * span, recipe.range.z_max - 0.1 * span);
  for (auto& p : pts) p.z = z;
}

}  // namespace

Scene gen_scene(const SceneRecipe& recipe) {
  if (recipe.dividers < 0 || recipe.crossings < 0 || recipe.boundaries < 0 ||
      recipe.centerlines < 0)
    throw GenerationFailed("gen_scene: negative element count");
  const int total = recipe.dividers + recipe.crossings + recipe.boundaries +
                    recipe.centerlines;
  if (total > kMaxSceneElements)
    throw GenerationFailed("gen_scene: more than " +
                           std::to_string(kMaxSceneElements) + " elements");
  if (!recipe.range.valid()) throw GenerationFailed("gen_scene: bad range");
  if (recipe.dim == 3 && !recipe.range.has_z())
    throw GenerationFailed("gen_scene: 3D recipe needs z bounds");

  Scene scene;
  scene.range = recipe.range;
  scene.dim = recipe.dim;
  Rng rng(mix_seed(recipe.seed, 0));

  auto add = [&](ElementClass cls, std::vector<Point> raw) {
    if (raw.empty())
      throw GenerationFailed("gen_scene: could not place " + to_string(cls) +
                             " inside the range");
    assign_z(raw, rng, recipe);
    auto el = make_element(cls, {});
    el.points = resample(raw, el.closed, recipe.n_points);
    scene.elements.push_back(std::move(el));
  };

  for (int i = 0; i < recipe.crossings; ++i)
    add(ElementClass::ped_crossing,
        quadrilateral(rng, recipe.range, recipe.crossing_size_min,
                      recipe.crossing_size_max));
  for (int i = 0; i < recipe.dividers; ++i)
    add(ElementClass::divider,
        random_walk_chain(rng, recipe.range, recipe.divider_len_min,
                          recipe.divider_len_max, recipe.max_turn));
  for (int i = 0; i < recipe.boundaries; ++i)
    add(ElementClass::boundary,
        random_walk_chain(rng, recipe.range, recipe.divider_len_min,
                          recipe.divider_len_max, recipe.max_turn));
  for (int i = 0; i < recipe.centerlines; ++i)
    add(ElementClass::centerline,
        offset_chain(rng, recipe.range, recipe.divider_len_min,
                     recipe.divider_len_max, recipe.max_turn));
  return scene;
}

std::vector<ScoredElement> perturb(const Scene& scene, const PerturbSpec& spec,
                                   std::uint64_t seed, int scene_id) {
  Rng rng(mix_seed(seed, 1));
  std::vector<ScoredElement> out;

  for (const auto& gt : scene.elements) {
    if (rng.bernoulli(spec.drop_prob)) continue;
    ScoredElement se;
    se.scene_id = scene_id;
    se.element = gt;
    for (auto& p : se.element.points) {
      p.x += spec.sigma * rng.normal();
      p.y += spec.sigma * rng.normal();
      if (scene.dim == 3) p.z += spec.sigma * rng.normal();
    }
    const double d = chamfer_distance(se.element.points, gt.points);
    se.score = std::clamp(
        1.0 - d / spec.score_tau + spec.score_noise * rng.normal(), 0.0, 1.0);
    out.push_back(std::move(se));
  }

  // Spurious injections: expected count = rate * |gts|.
  const double expected = spec.spurious_rate * scene.elements.size();
  int n_spurious = static_cast<int>(std::floor(expected));
  if (rng.bernoulli(expected - n_spurious)) ++n_spurious;
  SceneRecipe spur_recipe;
  spur_recipe.range = scene.range;
  spur_recipe.dim = scene.dim;
  const int n_points = scene.elements.empty()
                           ? 20
                           : static_cast<int>(scene.elements[0].points.size());
  for (int i = 0; i < n_spurious; ++i) {
    const int cls_idx = rng.uniform_int(0, kNumClasses - 1);
    const ElementClass cls = kAllClasses[cls_idx];
    std::vector<Point> raw =
        cls == ElementClass::ped_crossing
            ? quadrilateral(rng, scene.range, spur_recipe.crossing_size_min,
                            spur_recipe.crossing_size_max)
            : random_walk_chain(rng, scene.range, spur_recipe.divider_len_min,
                                spur_recipe.divider_len_max,
                                spur_recipe.max_turn);
    if (raw.empty()) continue;
    ScoredElement se;
    se.scene_id = scene_id;
    se.element = make_element(cls, {});
    se.element.points = resample(raw, se.element.closed, n_points);
    se.score = rng.uniform(0.0, 0.5);
    out.push_back(std::move(se));
  }
  return out;
}

}  // namespace mapforge
