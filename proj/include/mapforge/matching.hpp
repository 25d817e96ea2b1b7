#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mapforge/geometry.hpp"

namespace mapforge {

// One decoder slot: per-class scores plus a point set of length N_v.
struct Prediction {
  std::array<double, kNumClasses> logits{};
  std::vector<Point> points;
};

// Sigmoid focal loss parameters (alpha-balanced, exponent gamma).
struct FocalParams {
  double alpha = 0.25;
  double gamma = 2.0;
};

// A padded target list: real elements first, nullopt = no-object slots.
using TargetSlots = std::vector<std::optional<MapElement>>;

// Pads gts with no-object slots up to n. Throws CapacityExceeded if gts do
// not fit.
TargetSlots pad_targets(const std::vector<MapElement>& gts, std::size_t n);

// Each GT repeated k times (list-block order), then padded to t slots.
TargetSlots one_to_many_targets(const std::vector<MapElement>& gts, int k,
                                std::size_t t);

// Class matching cost: FL(p,1) - FL(p,0) restricted to the target class;
// 0 for a no-object slot. Strictly decreasing in the target-class logit.
double focal_cost(const std::array<double, kNumClasses>& logits,
                  std::optional<ElementClass> target,
                  const FocalParams& fp = {});

struct PointMatchResult {
  int gamma_index = 0;  // index into the permutation group
  double cost = 0.0;    // sum over points of Manhattan distance
};

// argmin over the group of sum_j Mht(pred_j, gt_{gamma(j)}). Cost ties are
// broken by the lexicographically smallest matched-GT coordinate sequence,
// which keeps the choice independent of the element's stored point order
// (and thereby the downstream dir loss invariant under re-permutation).
PointMatchResult point_level_match(const std::vector<Point>& pred_points,
                                   const std::vector<Point>& gt_points,
                                   const PermutationGroup& group);

// Matching behavior toggles. fixed_order replaces every permutation group by
// {identity} (the ablation baseline).
struct MatchOptions {
  bool permutation_equivalent = true;
  FocalParams focal{};
};

// Group-minimal mean Manhattan distance (point-level cost / N_v).
double position_cost(const std::vector<Point>& pred_points,
                     const MapElement& gt, const MatchOptions& opts = {});

struct CostMatrix {
  std::size_t n = 0;
  std::vector<double> values;  // row-major n x n, rows = predictions

  double& at(std::size_t pred, std::size_t slot) {
    return values[pred * n + slot];
  }
  double at(std::size_t pred, std::size_t slot) const {
    return values[pred * n + slot];
  }
};

// Entry (i,k) = focal_cost(pred_i, class_k) + position_cost(pred_i, gt_k);
// no-object columns carry only the class term.
CostMatrix instance_cost_matrix(const std::vector<Prediction>& preds,
                                const TargetSlots& slots,
                                const MatchOptions& opts = {});

// Minimum-cost bijection of a square matrix (potentials method, O(n^3)).
// Returns row_for_col: column k is assigned row row_for_col[k].
// Throws InvalidCost on non-finite entries.
std::vector<int> hungarian(const CostMatrix& cost);

struct HierarchicalAssignment {
  // Instance-level bijection between prediction rows and target slots.
  std::vector<int> pred_for_slot;
  std::vector<int> slot_for_pred;
  // Per-slot instance matching cost (focal + position; class term only for
  // no-object slots).
  std::vector<double> instance_cost;
  // For positive slots: the chosen point permutation and its cost. Empty
  // optionals on no-object slots.
  std::vector<std::optional<PointMatchResult>> point_match;
  std::vector<std::optional<Permutation>> point_perm;

  double total_cost() const {
    double s = 0.0;
    for (double c : instance_cost) s += c;
    return s;
  }
  std::size_t positives() const {
    std::size_t c = 0;
    for (const auto& m : point_match)
      if (m) ++c;
    return c;
  }
};

// Instance-level Hungarian assignment over focal+position costs, then
// point-level permutation search for each positive pair.
HierarchicalAssignment hierarchical_match(const std::vector<Prediction>& preds,
                                          const TargetSlots& slots,
                                          const MatchOptions& opts = {});
HierarchicalAssignment hierarchical_match(const std::vector<Prediction>& preds,
                                          const std::vector<MapElement>& gts,
                                          const MatchOptions& opts = {});

}  // namespace mapforge
