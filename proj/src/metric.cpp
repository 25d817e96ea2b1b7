#include "mapforge/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mapforge/parallel.hpp"

namespace mapforge {

double chamfer_distance(const std::vector<Point>& a,
                        const std::vector<Point>& b) {
  if (a.empty() || b.empty())
    throw EmptyGeometry("chamfer_distance: empty point set");
  auto directed = [](const std::vector<Point>& from,
                     const std::vector<Point>& to) {
    double sum = 0.0;
    for (const Point& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Point& q : to) best = std::min(best, euclidean(p, q));
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return 0.5 * (directed(a, b) + directed(b, a));
}

namespace {

struct ClassCandidates {
  // Prediction order: score descending, then scene id, then input order.
  std::vector<int> order;                  // indices into preds_of_class
  std::vector<std::vector<double>> dists;  // per prediction: chamfer to each
                                           // same-scene GT of the class
  std::vector<std::vector<int>> gt_ids;    // matching GT identifiers
  std::size_t num_gt = 0;
};

// Gathers per-class predictions and their Chamfer distances to same-scene GT
// of the class. Distances are computed in parallel over scenes and merged in
// scene-id order.
ClassCandidates gather(const std::vector<ScoredElement>& preds,
                       const std::vector<Scene>& gt_scenes, ElementClass cls) {
  ClassCandidates out;

  struct PredRef {
    int pred_index;
    double score;
    int scene_id;
  };
  std::vector<PredRef> refs;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i].element.cls == cls)
      refs.push_back({static_cast<int>(i), preds[i].score,
                      preds[i].scene_id});
  std::stable_sort(refs.begin(), refs.end(),
                   [](const PredRef& a, const PredRef& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.scene_id != b.scene_id)
                       return a.scene_id < b.scene_id;
                     return a.pred_index < b.pred_index;
                   });

  // Per-scene GT element indices of this class; GT identifier = (scene,
  // per-scene ordinal) flattened in scene order.
  std::vector<std::vector<int>> gt_of_scene(gt_scenes.size());
  std::vector<int> gt_base(gt_scenes.size(), 0);
  int next_id = 0;
  for (std::size_t s = 0; s < gt_scenes.size(); ++s) {
    gt_base[s] = next_id;
    for (std::size_t e = 0; e < gt_scenes[s].elements.size(); ++e)
      if (gt_scenes[s].elements[e].cls == cls) {
        gt_of_scene[s].push_back(static_cast<int>(e));
        ++next_id;
      }
  }
  out.num_gt = static_cast<std::size_t>(next_id);

  out.dists.resize(refs.size());
  out.gt_ids.resize(refs.size());
  out.order.resize(refs.size());
  std::iota(out.order.begin(), out.order.end(), 0);

  parallel_for(refs.size(), [&](std::size_t r) {
    const auto& ref = refs[r];
    if (ref.scene_id < 0 ||
        static_cast<std::size_t>(ref.scene_id) >= gt_scenes.size())
      return;
    const auto& scene = gt_scenes[ref.scene_id];
    const auto& pred_pts = preds[ref.pred_index].element.points;
    for (std::size_t g = 0; g < gt_of_scene[ref.scene_id].size(); ++g) {
      const int e = gt_of_scene[ref.scene_id][g];
      out.dists[r].push_back(
          chamfer_distance(pred_pts, scene.elements[e].points));
      out.gt_ids[r].push_back(gt_base[ref.scene_id] + static_cast<int>(g));
    }
  });
  return out;
}

// Area under the all-point precision-recall curve (monotone precision
// envelope, rectangle integration).
double pr_area(const std::vector<char>& tp_flags, std::size_t num_gt) {
  if (num_gt == 0) return 0.0;
  std::vector<double> precision, recall;
  std::size_t tp = 0, fp = 0;
  for (char f : tp_flags) {
    if (f)
      ++tp;
    else
      ++fp;
    precision.push_back(static_cast<double>(tp) /
                        static_cast<double>(tp + fp));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(num_gt));
  }
  for (int i = static_cast<int>(precision.size()) - 2; i >= 0; --i)
    precision[i] = std::max(precision[i], precision[i + 1]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < precision.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

std::optional<double> ap_from_candidates(const ClassCandidates& cand,
                                         double tau) {
  if (cand.num_gt == 0) return std::nullopt;
  std::vector<char> matched(cand.num_gt, 0);
  std::vector<char> tp_flags;
  tp_flags.reserve(cand.order.size());
  for (int r : cand.order) {
    int best_gt = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < cand.dists[r].size(); ++g) {
      const int id = cand.gt_ids[r][g];
      const double d = cand.dists[r][g];
      if (!matched[id] && d <= tau && d < best_dist) {
        best_dist = d;
        best_gt = id;
      }
    }
    if (best_gt >= 0) {
      matched[best_gt] = 1;
      tp_flags.push_back(1);
    } else {
      tp_flags.push_back(0);
    }
  }
  return pr_area(tp_flags, cand.num_gt);
}

}  // namespace

std::optional<double> ap_at_threshold(const std::vector<ScoredElement>& preds,
                                      const std::vector<Scene>& gt_scenes,
                                      ElementClass cls, double tau) {
  return ap_from_candidates(gather(preds, gt_scenes, cls), tau);
}

APResult evaluate(const std::vector<ScoredElement>& preds,
                  const std::vector<Scene>& gt_scenes,
                  const std::vector<double>& thresholds) {
  APResult result;
  result.thresholds = thresholds;
  double sum = 0.0;
  int evaluated = 0;
  for (ElementClass cls : kAllClasses) {
    const auto cand = gather(preds, gt_scenes, cls);
    if (cand.num_gt == 0) continue;
    ClassAP entry;
    for (double tau : thresholds)
      entry.ap_tau.push_back(ap_from_candidates(cand, tau).value());
    entry.ap = std::accumulate(entry.ap_tau.begin(), entry.ap_tau.end(), 0.0) /
               static_cast<double>(entry.ap_tau.size());
    sum += entry.ap;
    ++evaluated;
    result.per_class[cls] = std::move(entry);
  }
  result.mean_ap = evaluated > 0 ? sum / evaluated : 0.0;
  return result;
}

}  // namespace mapforge
