#pragma once

#include <cstdint>

#include "mapforge/geometry.hpp"
#include "mapforge/metric.hpp"

namespace mapforge {

struct SceneRecipe {
  std::uint64_t seed = 0;
  int dividers = 4;
  int crossings = 2;
  int boundaries = 2;
  int centerlines = 0;
  PerceptionRange range{};
  int n_points = 20;  // N_v after resampling
  int dim = 2;
  // Geometry parameters.
  double divider_len_min = 8.0;   // meters; also boundaries and centerlines
  double divider_len_max = 25.0;
  double crossing_size_min = 3.0;  // meters, quadrilateral side range
  double crossing_size_max = 8.0;
  double max_turn = 0.35;  // radians per segment, curvature bound
};

constexpr int kMaxSceneElements = 50;

// Deterministic for a fixed seed. Elements of the requested classes inside
// the range, resampled to n_points. Throws GenerationFailed when an element
// cannot be placed.
Scene gen_scene(const SceneRecipe& recipe);

struct PerturbSpec {
  double sigma = 0.0;          // per-coordinate noise, meters
  double drop_prob = 0.0;      // probability of dropping a GT element
  double spurious_rate = 0.0;  // expected spurious elements per GT element
  // Score model: clamp(1 - chamfer_to_source / score_tau + noise, 0, 1) for
  // perturbed true elements, uniform [0, 0.5] for spurious ones.
  double score_tau = 1.5;
  double score_noise = 0.05;
};

// Noisy "predictions" from a GT scene: per-point noise, element dropping,
// spurious injections. Surviving true elements score higher on average than
// spurious ones under the default score model.
std::vector<ScoredElement> perturb(const Scene& scene, const PerturbSpec& spec,
                                   std::uint64_t seed, int scene_id = 0);

}  // namespace mapforge
