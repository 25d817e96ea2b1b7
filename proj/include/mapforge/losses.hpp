#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mapforge/matching.hpp"

namespace mapforge {

struct LossWeights {
  // One-to-one terms (classification, point-to-point, edge direction).
  double lambda_cls = 2.0;
  double lambda_p2p = 5.0;
  double lambda_dir = 0.005;
  // Branch weights.
  double beta_one2one = 1.0;
  double beta_one2many = 1.0;
  double beta_dense = 1.0;
  // Dense (mask) term weights.
  double alpha_bev = 1.0;
  double alpha_pv = 2.0;
};

struct LossOptions {
  // The modulo edge indexing fabricates a wrap edge for open polylines;
  // excluded by default, kept for polygons.
  bool dir_wrap_for_open = false;
  FocalParams focal{};
};

// Scalar loss terms plus gradients of the weighted total with respect to the
// predicted point coordinates and class logits.
struct LossReport {
  double total = 0.0;
  std::map<std::string, double> terms;  // unweighted term values
  // Indexed by prediction (not slot): grad_points[i][j] is d(total)/d(coords
  // of point j of prediction i).
  std::vector<std::vector<Point>> grad_points;
  std::vector<std::array<double, kNumClasses>> grad_logits;
  std::size_t positive_slots = 0;
  std::size_t skipped_edges = 0;
};

struct FocalLossResult {
  double value = 0.0;
  std::array<double, kNumClasses> grad{};
};

// Sigmoid focal loss summed over classes, one-vs-all encoding with the
// target class hot (no-object = all-zero targets). Exact gradient.
FocalLossResult focal_loss(const std::array<double, kNumClasses>& logits,
                           std::optional<ElementClass> target,
                           const FocalParams& fp = {});

struct PointLossResult {
  double value = 0.0;
  std::vector<Point> grad;  // with respect to the predicted points
};

// Manhattan distance summed over assigned point pairs pred_j <-> gt_{gamma(j)}.
// Subgradient is the per-axis sign, 0 at exact equality.
PointLossResult p2p_loss(const std::vector<Point>& pred_points,
                         const std::vector<Point>& gt_points,
                         const Permutation& gamma);

struct DirLossResult {
  double value = 0.0;
  std::vector<Point> grad;
  std::size_t skipped_edges = 0;  // zero-length edges excluded from the sum
};

// Negative cosine similarity summed over paired edges
// e_j = v_j - v_{(j+1) mod N_v}. Closed elements sum N_v edges; open
// elements exclude the wrap edge unless include_wrap_for_open.
DirLossResult dir_loss(const std::vector<Point>& pred_points,
                       const std::vector<Point>& gt_points,
                       const Permutation& gamma, bool closed,
                       bool include_wrap_for_open = false);

// Weighted one-to-one set loss over all slots: classification everywhere,
// p2p and dir on positive slots only. The assignment must come from hierarchical_match
// on the same inputs.
LossReport one2one_loss(const std::vector<Prediction>& preds,
                        const std::vector<MapElement>& gts,
                        const HierarchicalAssignment& assignment,
                        const LossWeights& weights = {},
                        const LossOptions& opts = {});

// Slot-level core shared by the one-to-one and one-to-many branches.
LossReport set_prediction_loss(const std::vector<Prediction>& preds,
                               const TargetSlots& slots,
                               const HierarchicalAssignment& assignment,
                               const LossWeights& weights = {},
                               const LossOptions& opts = {});

// Builds one_to_many_targets(gts, k, |preds|), matches, and evaluates the
// same weighted set-loss form. The assignment is exposed for positive-count
// checks.
LossReport one2many_loss(const std::vector<Prediction>& preds,
                         const std::vector<MapElement>& gts, int k,
                         const LossWeights& weights = {},
                         const LossOptions& opts = {},
                         const MatchOptions& match_opts = {},
                         HierarchicalAssignment* out_assignment = nullptr);

struct MaskLossResult {
  double value = 0.0;
  std::vector<double> grad;
};

// Mean binary cross-entropy between mask logits and a {0,1} target grid.
MaskLossResult mask_ce_loss(const std::vector<double>& logits,
                            const std::vector<std::uint8_t>& target);

// Overall weighted sum: beta_o*one2one + beta_m*one2many +
// beta_d*(alpha_bev*bev + alpha_pv*pv). Value-level aggregation only; the
// component gradients live in the component reports.
LossReport total_loss(const std::optional<LossReport>& one2one,
                      const std::optional<LossReport>& one2many,
                      std::optional<double> bev_mask_loss,
                      std::optional<double> pv_mask_loss,
                      const LossWeights& weights = {});

}  // namespace mapforge
