#include "mapforge/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "mapforge/parallel.hpp"
#include "mapforge/rng.hpp"

namespace mapforge {

std::string to_string(ModelingMode mode) {
  return mode == ModelingMode::fixed_order ? "fixed_order" : "perm_equiv";
}

ModelingMode modeling_mode_from_string(const std::string& s) {
  if (s == "fixed_order") return ModelingMode::fixed_order;
  if (s == "perm_equiv" || s == "permutation_equivalent")
    return ModelingMode::permutation_equivalent;
  throw ParseError("unknown modeling mode: " + s);
}

namespace {

int scene_n_points(const Scene& scene) {
  if (scene.elements.empty())
    throw GenerationFailed("fit: scene has no elements");
  return static_cast<int>(scene.elements[0].points.size());
}

int resolved_slots(const Scene& scene, const FitConfig& config) {
  return config.slots > 0 ? config.slots
                          : static_cast<int>(scene.elements.size());
}

std::vector<MapElement> normalized_gts(const Scene& scene) {
  std::vector<MapElement> out = scene.elements;
  for (auto& e : out) e.points = normalize(e.points, scene.range);
  return out;
}

void init_slot_points(std::vector<std::vector<Point>>& points, int slots,
                      int n_points, int dim, Rng& rng) {
  points.assign(slots, {});
  for (auto& slot : points) {
    slot.resize(n_points);
    for (auto& p : slot) {
      p.x = rng.uniform();
      p.y = rng.uniform();
      p.z = dim == 3 ? rng.uniform() : 0.0;
    }
  }
}

std::vector<Prediction> to_predictions(
    const std::vector<std::array<double, kNumClasses>>& logits,
    const std::vector<std::vector<Point>>& points) {
  std::vector<Prediction> preds(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    preds[i].logits = logits[i];
    preds[i].points = points[i];
  }
  return preds;
}

void apply_step(std::vector<std::array<double, kNumClasses>>& logits,
                std::vector<std::vector<Point>>& points,
                const LossReport& rep, double step) {
  for (std::size_t i = 0; i < logits.size(); ++i) {
    for (int c = 0; c < kNumClasses; ++c)
      logits[i][c] -= step * rep.grad_logits[i][c];
    for (std::size_t j = 0; j < points[i].size(); ++j)
      points[i][j] -= rep.grad_points[i][j] * step;
  }
}

}  // namespace

FitParams init_params(const Scene& scene, const FitConfig& config) {
  FitParams params;
  params.slots = resolved_slots(scene, config);
  params.n_points = scene_n_points(scene);
  params.dim = scene.dim;
  params.logits.assign(params.slots, {});
  Rng rng(mix_seed(config.seed, 0x66697421ULL));
  init_slot_points(params.points, params.slots, params.n_points, params.dim,
                   rng);
  if (config.one2many) {
    params.aux_logits.assign(config.t, {});
    init_slot_points(params.aux_points, config.t, params.n_points, params.dim,
                     rng);
  }
  return params;
}

FitParams params_from_scene(const Scene& scene, const FitConfig& config) {
  FitParams params;
  params.slots = resolved_slots(scene, config);
  params.n_points = scene_n_points(scene);
  params.dim = scene.dim;
  if (static_cast<int>(scene.elements.size()) > params.slots)
    throw CapacityExceeded("params_from_scene: more GT elements than slots");
  params.logits.assign(params.slots, {-12.0, -12.0, -12.0, -12.0});
  params.points.assign(params.slots,
                       std::vector<Point>(params.n_points, {0.5, 0.5, 0.0}));
  const auto gts = normalized_gts(scene);
  for (std::size_t i = 0; i < gts.size(); ++i) {
    params.points[i] = gts[i].points;
    params.logits[i][static_cast<int>(gts[i].cls)] = 12.0;
  }
  return params;
}

std::vector<ScoredElement> export_predictions(const FitParams& params,
                                              const Scene& scene,
                                              int scene_id) {
  std::vector<ScoredElement> out;
  out.reserve(params.slots);
  for (int i = 0; i < params.slots; ++i) {
    int best = 0;
    for (int c = 1; c < kNumClasses; ++c)
      if (params.logits[i][c] > params.logits[i][best]) best = c;
    ScoredElement se;
    se.scene_id = scene_id;
    se.score = 1.0 / (1.0 + std::exp(-params.logits[i][best]));
    se.element = make_element(kAllClasses[best], {});
    se.element.points.reserve(params.n_points);
    for (const auto& p : params.points[i]) {
      Point q{std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0),
              scene.dim == 3 ? std::clamp(p.z, 0.0, 1.0) : p.z};
      se.element.points.push_back(denormalize(q, scene.range));
    }
    out.push_back(std::move(se));
  }
  return out;
}

std::string trace_to_csv(const FitTrace& trace) {
  std::string csv = "iteration,cls,p2p,dir,one2one,one2many,total,map\n";
  std::size_t snap = 0;
  char buf[256];
  for (const auto& it : trace.iterations) {
    std::string map_col;
    while (snap < trace.snapshots.size() &&
           trace.snapshots[snap].iteration < it.iteration)
      ++snap;
    if (snap < trace.snapshots.size() &&
        trace.snapshots[snap].iteration == it.iteration) {
      std::snprintf(buf, sizeof(buf), "%.9g", trace.snapshots[snap].mean_ap);
      map_col = buf;
    }
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,",
                  it.iteration, it.cls, it.p2p, it.dir, it.one2one_total,
                  it.one2many_total, it.total);
    csv += buf;
    csv += map_col;
    csv += '\n';
  }
  // Snapshots past the last recorded iteration (the final one).
  for (const auto& s : trace.snapshots) {
    if (!trace.iterations.empty() &&
        s.iteration <= trace.iterations.back().iteration)
      continue;
    std::snprintf(buf, sizeof(buf), "%d,,,,,,,%.9g\n", s.iteration, s.mean_ap);
    csv += buf;
  }
  return csv;
}

std::string trace_to_json(const FitTrace& trace) {
  nlohmann::json j;
  j["iterations"] = nlohmann::json::array();
  for (const auto& it : trace.iterations) {
    j["iterations"].push_back({{"iteration", it.iteration},
                               {"cls", it.cls},
                               {"p2p", it.p2p},
                               {"dir", it.dir},
                               {"one2one", it.one2one_total},
                               {"one2many", it.one2many_total},
                               {"total", it.total}});
  }
  j["snapshots"] = nlohmann::json::array();
  for (const auto& s : trace.snapshots)
    j["snapshots"].push_back({{"iteration", s.iteration}, {"map", s.mean_ap}});
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [cls, entry] : trace.final_ap.per_class)
    per_class[to_string(cls)] = {{"ap_tau", entry.ap_tau}, {"ap", entry.ap}};
  j["final"] = {{"thresholds", trace.final_ap.thresholds},
                {"per_class", std::move(per_class)},
                {"map", trace.final_ap.mean_ap}};
  return j.dump(2) + "\n";
}

FitTrace fit_scene(const Scene& scene, const FitConfig& config) {
  const FitParams initial = init_params(scene, config);
  return fit_scene(scene, config, initial, nullptr);
}

FitTrace fit_scene(const Scene& scene, const FitConfig& config,
                   const FitParams& initial, FitParams* final_params) {
  if (config.lr < 0.0 || config.iterations < 0)
    throw GenerationFailed("fit: invalid config");
  FitParams params = initial;
  const auto gts = normalized_gts(scene);
  if (static_cast<int>(gts.size()) > params.slots)
    throw CapacityExceeded("fit: more GT elements than slots");
  const std::size_t expected_aux_positives =
      config.one2many ? gts.size() * static_cast<std::size_t>(config.k) : 0;

  MatchOptions match_opts;
  match_opts.permutation_equivalent =
      config.mode == ModelingMode::permutation_equivalent;
  match_opts.focal = config.loss_opts.focal;

  FitTrace trace;
  auto snapshot = [&](int iteration) {
    const auto preds = export_predictions(params, scene);
    const auto ap = evaluate(preds, {scene}, config.eval_thresholds);
    trace.snapshots.push_back({iteration, ap.mean_ap});
    return ap;
  };

  for (int it = 0; it < config.iterations; ++it) {
    if (config.snapshot_every > 0 && it % config.snapshot_every == 0)
      snapshot(it);

    FitTrace::IterRecord rec;
    rec.iteration = it;
    LossReport o2o, o2m;
    try {
      const auto preds = to_predictions(params.logits, params.points);
      const auto assignment = hierarchical_match(preds, gts, match_opts);
      o2o = one2one_loss(preds, gts, assignment, config.weights,
                         config.loss_opts);
      if (config.one2many) {
        const auto aux_preds =
            to_predictions(params.aux_logits, params.aux_points);
        HierarchicalAssignment aux_assignment;
        o2m = one2many_loss(aux_preds, gts, config.k, config.weights,
                            config.loss_opts, match_opts, &aux_assignment);
        if (aux_assignment.positives() != expected_aux_positives)
          trace.aux_positives_consistent = false;
      }
    } catch (const InvalidCost&) {
      // Non-finite coordinates poison the cost matrix.
      throw DivergenceDetected("fit: non-finite matching cost at iteration " +
                                   std::to_string(it),
                               static_cast<std::size_t>(it));
    }

    double total = config.weights.beta_one2one * o2o.total;
    rec.cls = o2o.terms.at("cls");
    rec.p2p = o2o.terms.at("p2p");
    rec.dir = o2o.terms.at("dir");
    rec.one2one_total = o2o.total;
    if (config.one2many) {
      rec.one2many_total = o2m.total;
      total += config.weights.beta_one2many * o2m.total;
    }
    rec.total = total;
    if (!std::isfinite(total))
      throw DivergenceDetected("fit: non-finite loss at iteration " +
                                   std::to_string(it),
                               static_cast<std::size_t>(it));
    trace.iterations.push_back(rec);

    apply_step(params.logits, params.points, o2o,
               config.lr * config.weights.beta_one2one);
    if (config.one2many)
      apply_step(params.aux_logits, params.aux_points, o2m,
                 config.lr * config.weights.beta_one2many);
  }

  trace.final_ap = snapshot(config.iterations);
  if (final_params) *final_params = std::move(params);
  return trace;
}

namespace {

struct PairedRun {
  double map_a = 0.0, map_b = 0.0;
  std::map<ElementClass, std::pair<double, int>> ap_a, ap_b;
};

void accumulate_class_aps(const APResult& ap,
                          std::map<ElementClass, std::pair<double, int>>& acc) {
  for (const auto& [cls, entry] : ap.per_class) {
    acc[cls].first += entry.ap;
    acc[cls].second += 1;
  }
}

}  // namespace

ModelingAblationReport ablate_modeling(const std::vector<SceneRecipe>& recipes,
                                       const FitConfig& config_a,
                                       const FitConfig& config_b, int seeds) {
  if (recipes.empty())
    throw GenerationFailed("ablate_modeling: no recipes given");
  std::vector<PairedRun> runs(seeds);
  parallel_for(seeds, [&](std::size_t s) {
    double sum_a = 0.0, sum_b = 0.0;
    for (std::size_t b = 0; b < recipes.size(); ++b) {
      SceneRecipe recipe = recipes[b];
      recipe.seed = mix_seed(recipes[b].seed, 1000 + s * 97 + b);
      const Scene scene = gen_scene(recipe);
      FitConfig ca = config_a, cb = config_b;
      ca.seed = cb.seed = mix_seed(recipes[b].seed, 2000 + s * 97 + b);
      const auto trace_a = fit_scene(scene, ca);
      const auto trace_b = fit_scene(scene, cb);
      sum_a += trace_a.final_ap.mean_ap;
      sum_b += trace_b.final_ap.mean_ap;
      accumulate_class_aps(trace_a.final_ap, runs[s].ap_a);
      accumulate_class_aps(trace_b.final_ap, runs[s].ap_b);
    }
    runs[s].map_a = sum_a / recipes.size();
    runs[s].map_b = sum_b / recipes.size();
  });

  ModelingAblationReport report;
  report.seeds = seeds;
  std::map<ElementClass, std::pair<double, int>> acc_a, acc_b;
  int wins = 0;
  for (const auto& run : runs) {
    report.mean_map_a += run.map_a;
    report.mean_map_b += run.map_b;
    if (run.map_a > run.map_b) ++wins;
    for (const auto& [cls, acc] : run.ap_a) {
      acc_a[cls].first += acc.first;
      acc_a[cls].second += acc.second;
    }
    for (const auto& [cls, acc] : run.ap_b) {
      acc_b[cls].first += acc.first;
      acc_b[cls].second += acc.second;
    }
  }
  report.mean_map_a /= std::max(1, seeds);
  report.mean_map_b /= std::max(1, seeds);
  report.win_rate = seeds > 0 ? static_cast<double>(wins) / seeds : 0.0;
  for (const auto& [cls, acc] : acc_a)
    report.mean_ap_a[cls] = acc.first / acc.second;
  for (const auto& [cls, acc] : acc_b)
    report.mean_ap_b[cls] = acc.first / acc.second;
  return report;
}

One2ManyAblationReport ablate_one2many(const std::vector<SceneRecipe>& recipes,
                                       const FitConfig& config,
                                       const std::vector<int>& k_values,
                                       const std::vector<int>& t_values,
                                       int seeds) {
  if (k_values.size() != t_values.size())
    throw ShapeMismatch("ablate_one2many: k and t lists differ in length");
  if (recipes.empty())
    throw GenerationFailed("ablate_one2many: no recipes given");
  One2ManyAblationReport report;
  report.k_values = k_values;
  report.t_values = t_values;
  report.seeds = seeds;
  report.mean_iterations_to_threshold.assign(k_values.size(), 0.0);

  // iters-to-threshold per (seed, k), averaged over the recipe batch; the
  // threshold comes from each run's own K=0 final mAP.
  std::vector<std::vector<double>> iters(
      seeds, std::vector<double>(k_values.size(), 0.0));
  std::vector<char> aux_ok(seeds, 1);

  auto iters_to = [](const FitTrace& trace, double threshold, int iterations) {
    for (const auto& s : trace.snapshots)
      if (s.mean_ap >= threshold) return static_cast<double>(s.iteration);
    return static_cast<double>(iterations + 1);
  };

  parallel_for(seeds, [&](std::size_t s) {
    for (std::size_t b = 0; b < recipes.size(); ++b) {
      SceneRecipe recipe = recipes[b];
      recipe.seed = mix_seed(recipes[b].seed, 3000 + s * 97 + b);
      const Scene scene = gen_scene(recipe);
      const std::uint64_t fit_seed =
          mix_seed(recipes[b].seed, 4000 + s * 97 + b);

      FitConfig base_cfg = config;
      base_cfg.one2many = false;
      base_cfg.seed = fit_seed;
      const auto base_trace = fit_scene(scene, base_cfg);
      const double threshold = 0.9 * base_trace.final_ap.mean_ap;

      for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
        if (k_values[ki] == 0) {
          iters[s][ki] += iters_to(base_trace, threshold, config.iterations);
          continue;
        }
        FitConfig cfg = config;
        cfg.one2many = true;
        cfg.k = k_values[ki];
        cfg.t = t_values[ki];
        cfg.seed = fit_seed;
        const auto trace = fit_scene(scene, cfg);
        if (!trace.aux_positives_consistent) aux_ok[s] = 0;
        iters[s][ki] += iters_to(trace, threshold, config.iterations);
      }
    }
    for (auto& v : iters[s]) v /= recipes.size();
  });

  for (int s = 0; s < seeds; ++s) {
    if (!aux_ok[s]) report.aux_positive_counts_ok = false;
    for (std::size_t ki = 0; ki < k_values.size(); ++ki)
      report.mean_iterations_to_threshold[ki] += iters[s][ki];
  }
  for (auto& v : report.mean_iterations_to_threshold)
    v /= std::max(1, seeds);
  return report;
}

}  // namespace mapforge
