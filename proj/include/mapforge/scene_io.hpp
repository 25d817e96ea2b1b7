#pragma once

#include <string>
#include <vector>

#include "mapforge/geometry.hpp"
#include "mapforge/metric.hpp"

namespace mapforge {

inline constexpr const char* kSchemaVersion = "mapforge/1";

// SceneFile: {version, dim, range:{x_min,...}, elements:[{class, closed,
// directed, points:[[x,y(,z)],...]}]}. Coordinates in meters.
std::string scene_to_json(const Scene& scene);

// Validates the schema (throws ParseError). Out-of-range points are clamped
// into the perception range; a duplicated closing point on a closed element
// is dropped.
Scene scene_from_json(const std::string& text);

// PredictionFile: {version, dim, scenes:[{scene_id, elements:[{class, score,
// points}]}]}. Scores must lie in [0,1].
std::string predictions_to_json(const std::vector<ScoredElement>& preds,
                                int dim);
std::vector<ScoredElement> predictions_from_json(const std::string& text);

std::string ap_result_to_json(const APResult& result);

// Whole-file helpers; writes are atomic (temp file + rename). Throw IoError.
std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);

Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);
std::vector<ScoredElement> load_predictions(const std::string& path);
void save_predictions(const std::vector<ScoredElement>& preds, int dim,
                      const std::string& path);

}  // namespace mapforge
