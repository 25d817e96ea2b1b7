#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "mapforge/fit.hpp"

using namespace mapforge;

namespace {

SceneRecipe small_recipe(std::uint64_t seed) {
  SceneRecipe recipe;
  recipe.seed = seed;
  recipe.dividers = 2;
  recipe.crossings = 1;
  recipe.boundaries = 1;
  recipe.centerlines = 0;
  recipe.n_points = 8;
  return recipe;
}

FitConfig small_config(std::uint64_t seed) {
  FitConfig config;
  config.seed = seed;
  config.slots = 8;
  config.iterations = 40;
  config.snapshot_every = 10;
  return config;
}

}  // namespace

TEST_CASE("fit: params initialized at the GT are a fixed point") {
  const Scene scene = gen_scene(small_recipe(1));
  FitConfig config = small_config(1);
  const FitParams at_gt = params_from_scene(scene, config);

  // Gradient on points is exactly zero at the GT.
  std::vector<Prediction> preds(at_gt.slots);
  for (int i = 0; i < at_gt.slots; ++i) {
    preds[i].logits = at_gt.logits[i];
    preds[i].points = at_gt.points[i];
  }
  std::vector<MapElement> gts = scene.elements;
  for (auto& e : gts) e.points = normalize(e.points, scene.range);
  // p2p subgradients vanish exactly; the dir term carries sqrt rounding of
  // order 1e-17 in cos_sim at the fixed point.
  const auto rep = one2one_loss(preds, gts, hierarchical_match(preds, gts));
  for (const auto& slot_grads : rep.grad_points)
    for (const auto& g : slot_grads) {
      CHECK(std::abs(g.x) <= 1e-12);
      CHECK(std::abs(g.y) <= 1e-12);
      CHECK(std::abs(g.z) <= 1e-12);
    }

  // And the mAP snapshot at iteration 0 is 1.0.
  config.iterations = 1;
  config.snapshot_every = 1;
  const auto trace = fit_scene(scene, config, at_gt);
  REQUIRE(!trace.snapshots.empty());
  CHECK(trace.snapshots.front().iteration == 0);
  CHECK(trace.snapshots.front().mean_ap == doctest::Approx(1.0));
  CHECK(trace.iterations.front().p2p == doctest::Approx(0.0));
}

TEST_CASE("fit: lr = 0 keeps every snapshot identical") {
  const Scene scene = gen_scene(small_recipe(2));
  FitConfig config = small_config(2);
  config.lr = 0.0;
  const auto trace = fit_scene(scene, config);
  REQUIRE(trace.snapshots.size() >= 2);
  for (const auto& snap : trace.snapshots)
    CHECK(snap.mean_ap == doctest::Approx(trace.snapshots[0].mean_ap));
}

TEST_CASE("fit: reversed polyline init separates the two modeling modes") {
  // Single undirected polyline GT; init = GT reversed.
  SceneRecipe recipe;
  recipe.seed = 5;
  recipe.dividers = 1;
  recipe.crossings = recipe.boundaries = recipe.centerlines = 0;
  recipe.n_points = 10;
  const Scene scene = gen_scene(recipe);

  FitConfig config = small_config(5);
  config.slots = 1;
  config.iterations = 1;
  config.snapshot_every = 0;
  FitParams init = params_from_scene(scene, config);
  std::reverse(init.points[0].begin(), init.points[0].end());

  config.mode = ModelingMode::permutation_equivalent;
  const auto perm_trace = fit_scene(scene, config, init);
  CHECK(perm_trace.iterations.front().p2p < 1e-6);

  config.mode = ModelingMode::fixed_order;
  const auto fixed_trace = fit_scene(scene, config, init);
  CHECK(fixed_trace.iterations.front().p2p > 0.01);
}

TEST_CASE("fit: identical configs give bit-identical traces") {
  const Scene scene = gen_scene(small_recipe(3));
  const FitConfig config = small_config(3);
  const auto a = fit_scene(scene, config);
  const auto b = fit_scene(scene, config);
  REQUIRE(a.iterations.size() == b.iterations.size());
  for (std::size_t i = 0; i < a.iterations.size(); ++i) {
    CHECK(a.iterations[i].total == b.iterations[i].total);
    CHECK(a.iterations[i].cls == b.iterations[i].cls);
    CHECK(a.iterations[i].p2p == b.iterations[i].p2p);
    CHECK(a.iterations[i].dir == b.iterations[i].dir);
  }
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t i = 0; i < a.snapshots.size(); ++i)
    CHECK(a.snapshots[i].mean_ap == b.snapshots[i].mean_ap);
}

TEST_CASE("fit: permuting a GT element's stored order leaves the trace alone") {
  const Scene scene = gen_scene(small_recipe(7));
  const FitConfig config = small_config(7);
  const auto base = fit_scene(scene, config);

  Scene permuted = scene;
  // Rotate the polygon's stored ring by 3 and reverse a divider.
  for (auto& el : permuted.elements) {
    const auto group = permutation_group(el);
    if (group.size() > 2)
      el.points = apply_permutation(el.points, group[6]);
    else if (group.size() == 2)
      el.points = apply_permutation(el.points, group[1]);
  }
  const auto moved = fit_scene(permuted, config);
  REQUIRE(base.iterations.size() == moved.iterations.size());
  for (std::size_t i = 0; i < base.iterations.size(); ++i)
    CHECK(std::abs(base.iterations[i].total - moved.iterations[i].total) <=
          1e-12);
  for (std::size_t i = 0; i < base.snapshots.size(); ++i)
    CHECK(std::abs(base.snapshots[i].mean_ap - moved.snapshots[i].mean_ap) <=
          1e-12);
}

TEST_CASE("fit: loss non-increasing in at least 90% of approach-phase steps") {
  // Default lr on default-recipe scenes. Constant-step L1 descent reaches
  // its targets after ~17-20 iterations at lr 0.01 and oscillates from then
  // on, so the sanity band applies to the approach horizon.
  int non_increasing = 0, steps = 0;
  for (std::uint64_t seed : {11, 12, 13}) {
    SceneRecipe recipe;
    recipe.seed = seed;
    const Scene scene = gen_scene(recipe);
    FitConfig config;
    config.seed = seed;
    config.slots = 12;
    config.iterations = 15;
    config.snapshot_every = 0;
    const auto trace = fit_scene(scene, config);
    for (std::size_t i = 1; i < trace.iterations.size(); ++i) {
      ++steps;
      if (trace.iterations[i].total <= trace.iterations[i - 1].total + 1e-12)
        ++non_increasing;
    }
  }
  CHECK(static_cast<double>(non_increasing) / steps >= 0.9);
}

TEST_CASE("fit: non-finite initial coordinates raise DivergenceDetected") {
  const Scene scene = gen_scene(small_recipe(9));
  FitConfig config = small_config(9);
  FitParams bad = init_params(scene, config);
  bad.points[0][0].x = std::nan("");
  CHECK_THROWS_AS(fit_scene(scene, config, bad), DivergenceDetected);
}

TEST_CASE("fit: one2many branch leaves the main trajectory untouched") {
  const Scene scene = gen_scene(small_recipe(21));
  FitConfig base = small_config(21);
  base.iterations = 20;
  FitConfig aux = base;
  aux.one2many = true;
  aux.k = 3;
  aux.t = 24;
  const auto a = fit_scene(scene, base);
  const auto b = fit_scene(scene, aux);
  CHECK(b.aux_positives_consistent);
  REQUIRE(a.iterations.size() == b.iterations.size());
  for (std::size_t i = 0; i < a.iterations.size(); ++i) {
    CHECK(a.iterations[i].one2one_total == b.iterations[i].one2one_total);
    CHECK(b.iterations[i].one2many_total != 0.0);
  }
  for (std::size_t i = 0; i < a.snapshots.size(); ++i)
    CHECK(a.snapshots[i].mean_ap == b.snapshots[i].mean_ap);
}

TEST_CASE("fit: capacity and argument validation") {
  const Scene scene = gen_scene(small_recipe(23));
  FitConfig config = small_config(23);
  config.slots = 2;  // fewer than the 4 GT elements
  CHECK_THROWS_AS(fit_scene(scene, config), CapacityExceeded);
}

TEST_CASE("trace exports: CSV rows and JSON structure") {
  const Scene scene = gen_scene(small_recipe(31));
  FitConfig config = small_config(31);
  config.iterations = 12;
  config.snapshot_every = 5;
  const auto trace = fit_scene(scene, config);

  const std::string csv = trace_to_csv(trace);
  CHECK(csv.rfind("iteration,cls,p2p,dir,one2one,one2many,total,map\n", 0) ==
        0);
  const std::size_t rows = std::count(csv.begin(), csv.end(), '\n');
  // Header + 12 iteration rows + the final snapshot row (iteration 12).
  CHECK(rows == 14);

  // Snapshot iterations strictly increase.
  for (std::size_t i = 1; i < trace.snapshots.size(); ++i)
    CHECK(trace.snapshots[i].iteration > trace.snapshots[i - 1].iteration);

  const auto j = nlohmann::json::parse(trace_to_json(trace));
  CHECK(j["iterations"].size() == 12);
  CHECK(j["snapshots"].size() == trace.snapshots.size());
  CHECK(j["final"]["map"].get<double>() ==
        doctest::Approx(trace.final_ap.mean_ap));
}

TEST_CASE("fit: slots <= 0 resolves to the GT element count") {
  const Scene scene = gen_scene(small_recipe(33));
  FitConfig config = small_config(33);
  config.slots = 0;
  const auto params = init_params(scene, config);
  CHECK(params.slots == static_cast<int>(scene.elements.size()));
  config.iterations = 2;
  const auto trace = fit_scene(scene, config);
  CHECK(trace.iterations.size() == 2);
}

TEST_CASE("ablate_modeling control: identical arms tie") {
  SceneRecipe recipe = small_recipe(0);
  FitConfig config = small_config(0);
  config.iterations = 15;
  const auto report = ablate_modeling({recipe}, config, config, 3);
  CHECK(report.mean_map_a == doctest::Approx(report.mean_map_b));
  CHECK(report.win_rate == 0.0);  // no strict wins when arms coincide
}

TEST_CASE("ablate_modeling averages the recipe batch per seed") {
  SceneRecipe a = small_recipe(0);
  SceneRecipe b = small_recipe(0);
  b.crossings = 2;
  b.dividers = 1;
  FitConfig config = small_config(0);
  config.iterations = 10;
  config.slots = 0;
  const auto report = ablate_modeling({a, b}, config, config, 2);
  CHECK(report.seeds == 2);
  CHECK(report.mean_map_a == doctest::Approx(report.mean_map_b));
}

TEST_CASE("ablate_one2many: K=0 column equals the baseline by construction") {
  SceneRecipe recipe = small_recipe(0);
  recipe.crossings = 1;
  recipe.dividers = 1;
  recipe.boundaries = 0;
  FitConfig config = small_config(0);
  config.slots = 4;
  config.iterations = 20;
  config.snapshot_every = 5;
  const auto report =
      ablate_one2many({recipe}, config, {0, 2}, {0, 10}, 2);
  REQUIRE(report.mean_iterations_to_threshold.size() == 2);
  CHECK(report.aux_positive_counts_ok);
  // Decoupled auxiliary bank: the K>0 main trajectory matches K=0 exactly.
  CHECK(report.mean_iterations_to_threshold[1] ==
        doctest::Approx(report.mean_iterations_to_threshold[0]));
}
