#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mapforge/losses.hpp"
#include "mapforge/metric.hpp"
#include "mapforge/synthetic.hpp"

namespace mapforge {

enum class ModelingMode {
  fixed_order,             // every permutation group replaced by {identity}
  permutation_equivalent,  // full equivalence groups
};

std::string to_string(ModelingMode mode);
ModelingMode modeling_mode_from_string(const std::string& s);

struct FitConfig {
  ModelingMode mode = ModelingMode::permutation_equivalent;
  bool one2many = false;
  int k = 6;
  int t = 300;
  double lr = 0.01;  // constant step, normalized units
  int iterations = 300;
  std::uint64_t seed = 0;
  int slots = 50;  // N one-to-one prediction slots; <= 0 means |gts|
  LossWeights weights{};
  LossOptions loss_opts{};
  int snapshot_every = 25;
  std::vector<double> eval_thresholds = default_chamfer_thresholds();
};

// Directly optimized decoder-output stand-ins: per-slot class logits and
// normalized point coordinates, plus the optional auxiliary one-to-many bank.
struct FitParams {
  int slots = 0;
  int n_points = 0;
  int dim = 2;
  std::vector<std::array<double, kNumClasses>> logits;
  std::vector<std::vector<Point>> points;  // normalized coordinates
  std::vector<std::array<double, kNumClasses>> aux_logits;
  std::vector<std::vector<Point>> aux_points;
};

// Seeded initialization: points uniform in the unit box, logits at zero.
FitParams init_params(const Scene& scene, const FitConfig& config);

// Params sitting exactly on the GT: slot i < |gts| carries the normalized GT
// points with saturated logits; remaining slots are parked at the box center
// with strongly negative logits.
FitParams params_from_scene(const Scene& scene, const FitConfig& config);

// Inference-style export: per-slot class = argmax logit, score = max class
// probability, points clamped to the unit box and denormalized.
std::vector<ScoredElement> export_predictions(const FitParams& params,
                                              const Scene& scene,
                                              int scene_id = 0);

struct FitTrace {
  struct IterRecord {
    int iteration = 0;
    double cls = 0.0, p2p = 0.0, dir = 0.0;
    double one2one_total = 0.0;
    double one2many_total = 0.0;
    double total = 0.0;
  };
  struct Snapshot {
    int iteration = 0;
    double mean_ap = 0.0;
  };
  std::vector<IterRecord> iterations;
  std::vector<Snapshot> snapshots;
  APResult final_ap;
  // True iff the auxiliary branch matched exactly k*|gts| positives at every
  // iteration (trivially true when one2many is off).
  bool aux_positives_consistent = true;
};

// CSV with header: iteration,cls,p2p,dir,one2one,one2many,total,map
// (map column filled on snapshot rows only).
std::string trace_to_csv(const FitTrace& trace);

// JSON document with per-iteration terms, snapshots, and the final AP.
std::string trace_to_json(const FitTrace& trace);

// Gradient-descent fitting of the slot parameters to a GT scene through the
// hierarchical matcher and loss stack. Matching is recomputed every
// iteration; deterministic for a fixed seed. Snapshots reflect the params
// entering the recorded iteration; a final snapshot is taken after the last
// update. Throws DivergenceDetected on a non-finite loss.
FitTrace fit_scene(const Scene& scene, const FitConfig& config);
FitTrace fit_scene(const Scene& scene, const FitConfig& config,
                   const FitParams& initial, FitParams* final_params = nullptr);

struct ModelingAblationReport {
  int seeds = 0;
  double mean_map_a = 0.0;  // config_a arm (permutation_equivalent in the
                            // standard pairing)
  double mean_map_b = 0.0;
  double win_rate = 0.0;  // fraction of seeds where arm a scored strictly higher
  std::map<ElementClass, double> mean_ap_a;
  std::map<ElementClass, double> mean_ap_b;
};

// Paired runs of two fit configurations. Each seed fits every recipe in the
// batch (scene and initialization identical across the two arms) and scores
// the mean final mAP over the batch; the win rate counts per-seed strict
// wins of arm a.
ModelingAblationReport ablate_modeling(const std::vector<SceneRecipe>& recipes,
                                       const FitConfig& config_a,
                                       const FitConfig& config_b, int seeds);

struct One2ManyAblationReport {
  std::vector<int> k_values;
  std::vector<int> t_values;
  // Mean over seeds and recipes of the first snapshot iteration reaching
  // 0.9x the final K=0 mAP of the same run (iterations+1 when never
  // reached).
  std::vector<double> mean_iterations_to_threshold;
  bool aux_positive_counts_ok = true;
  int seeds = 0;
};

// K=0 entries disable the auxiliary branch; others run with (k, t) pairs.
// Only the N one-to-one slots are scored.
One2ManyAblationReport ablate_one2many(const std::vector<SceneRecipe>& recipes,
                                       const FitConfig& config,
                                       const std::vector<int>& k_values,
                                       const std::vector<int>& t_values,
                                       int seeds);

}  // namespace mapforge
