#pragma once

#include <string>
#include <vector>

#include "mapforge/metric.hpp"

namespace mapforge {

// SVG 1.1 overlay of a GT scene (solid strokes) and predictions (dashed,
// hue by class, opacity by score). Deterministic bytes for fixed inputs.
std::string render_svg(const Scene& gt,
                       const std::vector<ScoredElement>& preds);

}  // namespace mapforge
