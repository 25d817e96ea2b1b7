#include "mapforge/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "json.hpp"

namespace mapforge {

using nlohmann::json;

namespace {

json range_to_json(const PerceptionRange& r, int dim) {
  json j{{"x_min", r.x_min},
         {"x_max", r.x_max},
         {"y_min", r.y_min},
         {"y_max", r.y_max}};
  if (dim == 3) {
    j["z_min"] = r.z_min;
    j["z_max"] = r.z_max;
  }
  return j;
}

json points_to_json(const std::vector<Point>& pts, int dim) {
  json arr = json::array();
  for (const auto& p : pts) {
    json row = json::array({p.x, p.y});
    if (dim == 3) row.push_back(p.z);
    arr.push_back(std::move(row));
  }
  return arr;
}

double get_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(std::string("missing or non-numeric field: ") + key);
  const double v = j[key].get<double>();
  if (!std::isfinite(v))
    throw ParseError(std::string("non-finite field: ") + key);
  return v;
}

PerceptionRange range_from_json(const json& j, int dim) {
  PerceptionRange r;
  r.x_min = get_number(j, "x_min");
  r.x_max = get_number(j, "x_max");
  r.y_min = get_number(j, "y_min");
  r.y_max = get_number(j, "y_max");
  if (dim == 3) {
    r.z_min = get_number(j, "z_min");
    r.z_max = get_number(j, "z_max");
  }
  if (!r.valid() || (dim == 3 && !r.has_z()))
    throw ParseError("invalid perception range");
  return r;
}

std::vector<Point> points_from_json(const json& arr, int dim) {
  if (!arr.is_array() || arr.size() < 2)
    throw ParseError("element needs a point array with at least 2 points");
  std::vector<Point> pts;
  pts.reserve(arr.size());
  for (const auto& row : arr) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(dim))
      throw ParseError("point arity does not match dim");
    Point p;
    p.x = row[0].get<double>();
    p.y = row[1].get<double>();
    if (dim == 3) p.z = row[2].get<double>();
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw ParseError("non-finite point coordinate");
    pts.push_back(p);
  }
  return pts;
}

void check_version(const json& j) {
  if (!j.contains("version") || !j["version"].is_string() ||
      j["version"].get<std::string>() != kSchemaVersion)
    throw ParseError(std::string("expected version ") + kSchemaVersion);
}

int get_dim(const json& j) {
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    throw ParseError("missing dim");
  const int dim = j["dim"].get<int>();
  if (dim != 2 && dim != 3) throw ParseError("dim must be 2 or 3");
  return dim;
}

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ParseError("malformed JSON");
  return j;
}

Point clamp_to_range(const Point& p, const PerceptionRange& r) {
  Point q;
  q.x = std::clamp(p.x, r.x_min, r.x_max);
  q.y = std::clamp(p.y, r.y_min, r.y_max);
  q.z = r.has_z() ? std::clamp(p.z, r.z_min, r.z_max) : p.z;
  return q;
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
  json j;
  j["version"] = kSchemaVersion;
  j["dim"] = scene.dim;
  j["range"] = range_to_json(scene.range, scene.dim);
  json elements = json::array();
  for (const auto& e : scene.elements) {
    elements.push_back(json{{"class", to_string(e.cls)},
                            {"closed", e.closed},
                            {"directed", e.directed},
                            {"points", points_to_json(e.points, scene.dim)}});
  }
  j["elements"] = std::move(elements);
  return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
  const json j = parse(text);
  check_version(j);
  Scene scene;
  scene.dim = get_dim(j);
  if (!j.contains("range")) throw ParseError("missing range");
  scene.range = range_from_json(j["range"], scene.dim);
  if (!j.contains("elements") || !j["elements"].is_array())
    throw ParseError("missing elements array");
  for (const auto& je : j["elements"]) {
    if (!je.contains("class") || !je["class"].is_string())
      throw ParseError("element missing class");
    MapElement e;
    e.cls = element_class_from_string(je["class"].get<std::string>());
    e.closed = je.value("closed", class_is_closed(e.cls));
    e.directed = je.value("directed", class_is_directed(e.cls));
    if (e.closed != class_is_closed(e.cls) ||
        e.directed != class_is_directed(e.cls))
      throw ParseError("closed/directed flags contradict class " +
                       to_string(e.cls));
    if (!je.contains("points"))
      throw ParseError("element missing points");
    e.points = points_from_json(je["points"], scene.dim);
    if (e.closed && e.points.size() > 2 &&
        euclidean(e.points.front(), e.points.back()) < 1e-12)
      e.points.pop_back();
    for (auto& p : e.points) p = clamp_to_range(p, scene.range);
    scene.elements.push_back(std::move(e));
  }
  return scene;
}

std::string predictions_to_json(const std::vector<ScoredElement>& preds,
                                int dim) {
  std::map<int, json> scenes;
  for (const auto& se : preds) {
    json& scene = scenes[se.scene_id];
    if (scene.is_null()) {
      scene = json{{"scene_id", se.scene_id}, {"elements", json::array()}};
    }
    scene["elements"].push_back(
        json{{"class", to_string(se.element.cls)},
             {"score", se.score},
             {"points", points_to_json(se.element.points, dim)}});
  }
  json j;
  j["version"] = kSchemaVersion;
  j["dim"] = dim;
  j["scenes"] = json::array();
  for (auto& [id, scene] : scenes) j["scenes"].push_back(std::move(scene));
  return j.dump(2) + "\n";
}

std::vector<ScoredElement> predictions_from_json(const std::string& text) {
  const json j = parse(text);
  check_version(j);
  const int dim = get_dim(j);
  if (!j.contains("scenes") || !j["scenes"].is_array())
    throw ParseError("missing scenes array");
  std::vector<ScoredElement> out;
  for (const auto& js : j["scenes"]) {
    if (!js.contains("scene_id") || !js["scene_id"].is_number_integer())
      throw ParseError("scene missing scene_id");
    const int scene_id = js["scene_id"].get<int>();
    if (!js.contains("elements") || !js["elements"].is_array())
      throw ParseError("scene missing elements");
    for (const auto& je : js["elements"]) {
      ScoredElement se;
      se.scene_id = scene_id;
      se.element.cls =
          element_class_from_string(je.at("class").get<std::string>());
      se.element.closed = class_is_closed(se.element.cls);
      se.element.directed = class_is_directed(se.element.cls);
      se.score = get_number(je, "score");
      if (se.score < 0.0 || se.score > 1.0)
        throw ParseError("score outside [0,1]");
      se.element.points = points_from_json(je.at("points"), dim);
      out.push_back(std::move(se));
    }
  }
  return out;
}

std::string ap_result_to_json(const APResult& result) {
  json j;
  j["version"] = kSchemaVersion;
  j["thresholds"] = result.thresholds;
  json per_class = json::object();
  for (const auto& [cls, entry] : result.per_class) {
    per_class[to_string(cls)] =
        json{{"ap_tau", entry.ap_tau}, {"ap", entry.ap}};
  }
  j["per_class"] = std::move(per_class);
  j["map"] = result.mean_ap;
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on " + path);
  return content;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failure on " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename " + tmp + " to " + path);
  }
}

Scene load_scene(const std::string& path) {
  return scene_from_json(read_file(path));
}

void save_scene(const Scene& scene, const std::string& path) {
  write_file_atomic(path, scene_to_json(scene));
}

std::vector<ScoredElement> load_predictions(const std::string& path) {
  return predictions_from_json(read_file(path));
}

void save_predictions(const std::vector<ScoredElement>& preds, int dim,
                      const std::string& path) {
  write_file_atomic(path, predictions_to_json(preds, dim));
}

}  // namespace mapforge
