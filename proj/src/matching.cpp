#include "mapforge/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mapforge {

namespace {

// log(sigmoid(x)) = -softplus(-x), computed without overflow.
double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

TargetSlots pad_targets(const std::vector<MapElement>& gts, std::size_t n) {
  if (gts.size() > n)
    throw CapacityExceeded("pad_targets: " + std::to_string(gts.size()) +
                           " targets exceed " + std::to_string(n) + " slots");
  TargetSlots slots;
  slots.reserve(n);
  for (const auto& g : gts) slots.emplace_back(g);
  while (slots.size() < n) slots.emplace_back(std::nullopt);
  return slots;
}

TargetSlots one_to_many_targets(const std::vector<MapElement>& gts, int k,
                                std::size_t t) {
  if (k < 1) throw CapacityExceeded("one_to_many_targets: k must be >= 1");
  if (gts.size() * static_cast<std::size_t>(k) > t)
    throw CapacityExceeded("one_to_many_targets: " +
                           std::to_string(gts.size() * k) +
                           " repeated targets exceed " + std::to_string(t) +
                           " slots");
  TargetSlots slots;
  slots.reserve(t);
  for (int rep = 0; rep < k; ++rep)
    for (const auto& g : gts) slots.emplace_back(g);
  while (slots.size() < t) slots.emplace_back(std::nullopt);
  return slots;
}

double focal_cost(const std::array<double, kNumClasses>& logits,
                  std::optional<ElementClass> target, const FocalParams& fp) {
  if (!target) return 0.0;
  const double x = logits[static_cast<int>(*target)];
  const double p = sigmoid(x);
  const double pos = fp.alpha * std::pow(1.0 - p, fp.gamma) * softplus(-x);
  const double neg = (1.0 - fp.alpha) * std::pow(p, fp.gamma) * softplus(x);
  return pos - neg;
}

namespace {

// Exact Manhattan cost ties between permutations are common (per-axis sums
// coincide whenever the per-axis intervals are nested or disjoint), so ties
// must be broken by the physical pairing rather than the stored group index:
// the loss downstream (the dir term) depends on which GT points are matched,
// and a stored-order-dependent tie-break would leak the arbitrary storage
// order into the loss. Candidates within a small tolerance of the minimum
// compare by their matched-GT coordinate sequence.
int compare_match_sequence(const std::vector<Point>& gt, const Permutation& a,
                           const Permutation& b) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    const Point& pa = gt[a[j]];
    const Point& pb = gt[b[j]];
    if (pa.x != pb.x) return pa.x < pb.x ? -1 : 1;
    if (pa.y != pb.y) return pa.y < pb.y ? -1 : 1;
    if (pa.z != pb.z) return pa.z < pb.z ? -1 : 1;
  }
  return 0;
}

}  // namespace

PointMatchResult point_level_match(const std::vector<Point>& pred_points,
                                   const std::vector<Point>& gt_points,
                                   const PermutationGroup& group) {
  if (pred_points.size() != gt_points.size())
    throw ShapeMismatch("point_level_match: point counts differ");
  std::vector<double> costs(group.size());
  double min_cost = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < group.size(); ++k) {
    const Permutation& gamma = group[k];
    double cost = 0.0;
    for (std::size_t j = 0; j < pred_points.size(); ++j)
      cost += manhattan(pred_points[j], gt_points[gamma[j]]);
    costs[k] = cost;
    min_cost = std::min(min_cost, cost);
  }
  const double tie_band = 1e-9 * std::max(1.0, std::abs(min_cost));
  int best = -1;
  for (std::size_t k = 0; k < group.size(); ++k) {
    if (costs[k] > min_cost + tie_band) continue;
    if (best < 0 ||
        compare_match_sequence(gt_points, group[k], group[best]) < 0)
      best = static_cast<int>(k);
  }
  PointMatchResult result;
  result.gamma_index = best;
  result.cost = min_cost;
  return result;
}

namespace {

PermutationGroup group_for(const MapElement& gt, const MatchOptions& opts) {
  if (opts.permutation_equivalent) return permutation_group(gt);
  return permutation_group(false, true, static_cast<int>(gt.points.size()));
}

}  // namespace

double position_cost(const std::vector<Point>& pred_points,
                     const MapElement& gt, const MatchOptions& opts) {
  const auto group = group_for(gt, opts);
  const auto match = point_level_match(pred_points, gt.points, group);
  return match.cost / static_cast<double>(gt.points.size());
}

CostMatrix instance_cost_matrix(const std::vector<Prediction>& preds,
                                const TargetSlots& slots,
                                const MatchOptions& opts) {
  if (preds.size() != slots.size())
    throw ShapeMismatch("instance_cost_matrix: preds and slots differ");
  CostMatrix cost;
  cost.n = preds.size();
  cost.values.assign(cost.n * cost.n, 0.0);
  for (std::size_t i = 0; i < cost.n; ++i) {
    for (std::size_t k = 0; k < cost.n; ++k) {
      const auto& slot = slots[k];
      double c = focal_cost(preds[i].logits,
                            slot ? std::optional(slot->cls) : std::nullopt,
                            opts.focal);
      if (slot) c += position_cost(preds[i].points, *slot, opts);
      cost.at(i, k) = c;
    }
  }
  return cost;
}

std::vector<int> hungarian(const CostMatrix& cost) {
  const int n = static_cast<int>(cost.n);
  for (double v : cost.values)
    if (!std::isfinite(v)) throw InvalidCost("hungarian: non-finite entry");

  // Potentials method on a 1-indexed matrix; a[i][j] = cost(row i-1, col j-1).
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_for_col(n, -1);
  for (int j = 1; j <= n; ++j) row_for_col[j - 1] = p[j] - 1;
  return row_for_col;
}

HierarchicalAssignment hierarchical_match(const std::vector<Prediction>& preds,
                                          const TargetSlots& slots,
                                          const MatchOptions& opts) {
  const auto cost = instance_cost_matrix(preds, slots, opts);
  const auto row_for_col = hungarian(cost);

  HierarchicalAssignment out;
  const std::size_t n = preds.size();
  out.pred_for_slot = row_for_col;
  out.slot_for_pred.assign(n, -1);
  out.instance_cost.assign(n, 0.0);
  out.point_match.assign(n, std::nullopt);
  out.point_perm.assign(n, std::nullopt);
  for (std::size_t k = 0; k < n; ++k) {
    const int i = out.pred_for_slot[k];
    out.slot_for_pred[i] = static_cast<int>(k);
    out.instance_cost[k] = cost.at(i, k);
    if (slots[k]) {
      const auto group = group_for(*slots[k], opts);
      auto match = point_level_match(preds[i].points, slots[k]->points, group);
      out.point_perm[k] = group[match.gamma_index];
      out.point_match[k] = std::move(match);
    }
  }
  return out;
}

HierarchicalAssignment hierarchical_match(const std::vector<Prediction>& preds,
                                          const std::vector<MapElement>& gts,
                                          const MatchOptions& opts) {
  return hierarchical_match(preds, pad_targets(gts, preds.size()), opts);
}

}  // namespace mapforge
