#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mapforge/geometry.hpp"

namespace mapforge {

struct ScoredElement {
  MapElement element;
  double score = 0.0;
  int scene_id = 0;
};

// Symmetric Chamfer distance: mean nearest-neighbor distance in both
// directions, halved. Metric coordinates.
double chamfer_distance(const std::vector<Point>& a,
                        const std::vector<Point>& b);

struct ClassAP {
  std::vector<double> ap_tau;  // one entry per threshold
  double ap = 0.0;             // mean over thresholds
};

struct APResult {
  std::vector<double> thresholds;
  // Classes without any GT are absent (AP undefined) and excluded from mAP.
  std::map<ElementClass, ClassAP> per_class;
  double mean_ap = 0.0;
};

inline const std::vector<double>& default_chamfer_thresholds() {
  static const std::vector<double> t = {0.5, 1.0, 1.5};
  return t;
}

// Detection AP for one class at one Chamfer threshold: predictions sorted by
// descending score across scenes; a prediction is a true positive if a
// not-yet-matched same-scene GT of the class lies within tau (greedily the
// closest one). Area under the all-point precision-recall curve.
// nullopt when the class has no GT anywhere.
std::optional<double> ap_at_threshold(const std::vector<ScoredElement>& preds,
                                      const std::vector<Scene>& gt_scenes,
                                      ElementClass cls, double tau);

// Per-class AP at each threshold, AP averaged over thresholds, and the mean
// over evaluated classes.
APResult evaluate(const std::vector<ScoredElement>& preds,
                  const std::vector<Scene>& gt_scenes,
                  const std::vector<double>& thresholds =
                      default_chamfer_thresholds());

}  // namespace mapforge
