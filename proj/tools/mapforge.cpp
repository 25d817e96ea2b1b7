#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mapforge/attnbench.hpp"
#include "mapforge/fit.hpp"
#include "mapforge/parallel.hpp"
#include "mapforge/raster.hpp"
#include "mapforge/rng.hpp"
#include "mapforge/scene_io.hpp"
#include "mapforge/svg.hpp"
#include "mapforge/synthetic.hpp"

namespace fs = std::filesystem;
using namespace mapforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitDivergence = 4;

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stod(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw ParseError("empty list: " + s);
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_double_list(s)) out.push_back(static_cast<int>(v));
  return out;
}

// Expands files and directories (directories contribute their *.json files
// in sorted order).
std::vector<std::string> expand_scene_paths(
    const std::vector<std::string>& inputs) {
  std::vector<std::string> paths;
  for (const auto& input : inputs) {
    if (fs::is_directory(input)) {
      std::vector<std::string> dir_files;
      for (const auto& entry : fs::directory_iterator(input))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
          dir_files.push_back(entry.path().string());
      std::sort(dir_files.begin(), dir_files.end());
      paths.insert(paths.end(), dir_files.begin(), dir_files.end());
    } else {
      paths.push_back(input);
    }
  }
  if (paths.empty()) throw IoError("no scene files found");
  return paths;
}

struct GenArgs {
  std::uint64_t seed = 0;
  int scenes = 1;
  std::string out;
  SceneRecipe recipe;
  double z_min = -5.0, z_max = 5.0;
};

int run_gen(GenArgs& args) {
  if (args.recipe.dim == 3) {
    args.recipe.range.z_min = args.z_min;
    args.recipe.range.z_max = args.z_max;
  }
  const bool single_file =
      args.scenes == 1 && args.out.size() > 5 &&
      args.out.substr(args.out.size() - 5) == ".json";
  if (!single_file) {
    std::error_code ec;
    fs::create_directories(args.out, ec);
    if (ec) throw IoError("cannot create directory " + args.out);
  }
  std::vector<Scene> scenes(args.scenes);
  parallel_for(args.scenes, [&](std::size_t i) {
    SceneRecipe recipe = args.recipe;
    recipe.seed = mix_seed(args.seed, i);
    scenes[i] = gen_scene(recipe);
  });
  for (int i = 0; i < args.scenes; ++i) {
    std::string path = args.out;
    if (!single_file) {
      char name[32];
      std::snprintf(name, sizeof(name), "scene_%04d.json", i);
      path = (fs::path(args.out) / name).string();
    }
    save_scene(scenes[i], path);
  }
  std::printf("wrote %d scene(s) to %s\n", args.scenes, args.out.c_str());
  return kExitOk;
}

struct EvalArgs {
  std::string pred;
  std::vector<std::string> gt;
  std::string thresholds = "0.5,1.0,1.5";
  std::string out;
};

int run_eval(const EvalArgs& args) {
  const auto paths = expand_scene_paths(args.gt);
  std::vector<Scene> scenes(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i)
    scenes[i] = load_scene(paths[i]);
  const auto preds = load_predictions(args.pred);
  for (const auto& se : preds) {
    if (se.scene_id < 0 ||
        static_cast<std::size_t>(se.scene_id) >= scenes.size()) {
      std::fprintf(stderr, "scene_id %d has no matching GT scene\n",
                   se.scene_id);
      return kExitMismatch;
    }
  }
  const auto thresholds = parse_double_list(args.thresholds);
  const auto result = evaluate(preds, scenes, thresholds);

  std::printf("%-14s", "class");
  for (double t : thresholds) std::printf("  AP@%-6.2f", t);
  std::printf("  AP\n");
  for (const auto& [cls, entry] : result.per_class) {
    std::printf("%-14s", to_string(cls).c_str());
    for (double ap : entry.ap_tau) std::printf("  %-9.4f", ap);
    std::printf("  %.4f\n", entry.ap);
  }
  std::printf("mAP: %.4f\n", result.mean_ap);

  const std::string json = ap_result_to_json(result);
  std::fputs(json.c_str(), stdout);
  if (!args.out.empty()) write_file_atomic(args.out, json);
  return kExitOk;
}

struct FitArgs {
  std::string gt;
  std::string mode = "perm_equiv";
  FitConfig config;
  bool one2many = false;
  std::string trace_out;
  std::string trace_json_out;
  std::string pred_out;
};

int run_fit(FitArgs& args) {
  const Scene scene = load_scene(args.gt);
  args.config.mode = modeling_mode_from_string(args.mode);
  args.config.one2many = args.one2many;
  FitParams final_params;
  const auto initial = init_params(scene, args.config);
  const auto trace = fit_scene(scene, args.config, initial, &final_params);
  if (!args.trace_out.empty())
    write_file_atomic(args.trace_out, trace_to_csv(trace));
  if (!args.trace_json_out.empty())
    write_file_atomic(args.trace_json_out, trace_to_json(trace));
  if (!args.pred_out.empty()) {
    const auto preds = export_predictions(final_params, scene);
    save_predictions(preds, scene.dim, args.pred_out);
  }
  std::printf("final mAP: %.4f over %d iterations\n", trace.final_ap.mean_ap,
              args.config.iterations);
  return kExitOk;
}

struct RasterArgs {
  std::string gt;
  bool bev = false;
  bool pv = false;
  double cell_size = 0.3;
  double line_width = 0.3;
  bool fill_polygons = false;
  double fx = 1266.417, fy = 1266.417, cx = 800.0, cy = 450.0;
  int img_width = 1600, img_height = 900;
  double cam_x = 0.0, cam_y = 0.0, cam_z = 1.6;
  double cam_yaw = 0.0, cam_pitch = 0.0, cam_roll = 0.0;
  double line_width_px = 3.0;
  double near_plane = 0.1;
  std::string out;
};

int run_raster(const RasterArgs& args) {
  if (args.bev == args.pv)
    throw ParseError("choose exactly one of --bev / --pv");
  const Scene scene = load_scene(args.gt);
  Mask mask;
  if (args.bev) {
    BEVGridSpec spec;
    spec.range = scene.range;
    spec.cell_size = args.cell_size;
    BEVRasterOptions opts;
    opts.fill_polygons = args.fill_polygons;
    mask = rasterize_bev(scene, spec, args.line_width, opts);
  } else {
    const Camera camera = make_camera(
        args.fx, args.fy, args.cx, args.cy, args.img_width, args.img_height,
        {args.cam_x, args.cam_y, args.cam_z}, args.cam_yaw, args.cam_pitch,
        args.cam_roll);
    if (!camera.valid()) throw ParseError("invalid camera parameters");
    PVRasterOptions opts;
    opts.near_plane = args.near_plane;
    mask = project_to_pv(scene, camera, args.line_width_px, opts);
  }
  write_file_atomic(args.out, mask_to_pgm(mask));
  std::printf("wrote %dx%d mask (%zu on cells) to %s\n", mask.width,
              mask.height, mask.count_on(), args.out.c_str());
  return kExitOk;
}

struct BenchArgs {
  std::string n_list = "50,75,100,125,150";
  int n_v = 20;
  int d = 64;
  int reps = 3;
  std::uint64_t seed = 0;
  std::string out;
};

int run_bench(const BenchArgs& args) {
  if (args.reps < 3) throw ParseError("--reps must be >= 3");
  const auto rows = bench_attention(parse_int_list(args.n_list), args.n_v,
                                    args.d, args.reps, args.seed);
  const std::string csv = bench_to_csv(rows);
  if (args.out.empty())
    std::fputs(csv.c_str(), stdout);
  else
    write_file_atomic(args.out, csv);
  return kExitOk;
}

struct PlotArgs {
  std::string gt;
  std::string pred;
  int scene_id = 0;
  std::string out;
};

int run_plot(const PlotArgs& args) {
  const Scene scene = load_scene(args.gt);
  std::vector<ScoredElement> preds;
  if (!args.pred.empty()) {
    for (auto& se : load_predictions(args.pred))
      if (se.scene_id == args.scene_id) preds.push_back(std::move(se));
  }
  write_file_atomic(args.out, render_svg(scene, preds));
  std::printf("wrote %s\n", args.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mapforge: vectorized map modeling, matching and evaluation"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* cmd_gen = app.add_subcommand("gen", "generate synthetic GT scenes");
  cmd_gen->add_option("--seed", gen.seed, "base seed");
  cmd_gen->add_option("--scenes", gen.scenes, "number of scenes")
      ->check(CLI::PositiveNumber);
  cmd_gen->add_option("--out", gen.out, "output .json file or directory")
      ->required();
  cmd_gen->add_option("--dividers", gen.recipe.dividers);
  cmd_gen->add_option("--crossings", gen.recipe.crossings);
  cmd_gen->add_option("--boundaries", gen.recipe.boundaries);
  cmd_gen->add_option("--centerlines", gen.recipe.centerlines);
  cmd_gen->add_option("--nv", gen.recipe.n_points, "points per element");
  cmd_gen->add_option("--dim", gen.recipe.dim)->check(CLI::Range(2, 3));
  cmd_gen->add_option("--x-min", gen.recipe.range.x_min);
  cmd_gen->add_option("--x-max", gen.recipe.range.x_max);
  cmd_gen->add_option("--y-min", gen.recipe.range.y_min);
  cmd_gen->add_option("--y-max", gen.recipe.range.y_max);
  cmd_gen->add_option("--z-min", gen.z_min);
  cmd_gen->add_option("--z-max", gen.z_max);

  EvalArgs eval_args;
  auto* cmd_eval =
      app.add_subcommand("eval", "Chamfer-AP evaluation of predictions");
  cmd_eval->add_option("--pred", eval_args.pred, "prediction file")
      ->required();
  cmd_eval
      ->add_option("--gt", eval_args.gt, "GT scene files or directories")
      ->required();
  cmd_eval->add_option("--thresholds", eval_args.thresholds,
                       "comma-separated Chamfer thresholds (m)");
  cmd_eval->add_option("--out", eval_args.out, "write AP JSON here");

  FitArgs fit_args;
  auto* cmd_fit =
      app.add_subcommand("fit", "gradient-descent fit of slots to a scene");
  cmd_fit->add_option("--gt", fit_args.gt, "GT scene file")->required();
  cmd_fit->add_option("--mode", fit_args.mode,
                      "fixed_order | perm_equiv");
  cmd_fit->add_option("--iters", fit_args.config.iterations)
      ->check(CLI::NonNegativeNumber);
  cmd_fit->add_option("--lr", fit_args.config.lr);
  cmd_fit->add_option("--seed", fit_args.config.seed);
  cmd_fit->add_option("--slots", fit_args.config.slots)
      ->check(CLI::PositiveNumber);
  cmd_fit->add_flag("--one2many", fit_args.one2many,
                    "enable the auxiliary one-to-many branch");
  cmd_fit->add_option("--one2many-k", fit_args.config.k, "GT repetitions");
  cmd_fit->add_option("--one2many-t", fit_args.config.t, "auxiliary slots");
  cmd_fit->add_option("--snapshot-every", fit_args.config.snapshot_every);
  cmd_fit->add_option("--lambda-cls", fit_args.config.weights.lambda_cls);
  cmd_fit->add_option("--lambda-p2p", fit_args.config.weights.lambda_p2p);
  cmd_fit->add_option("--lambda-dir", fit_args.config.weights.lambda_dir);
  cmd_fit->add_option("--focal-alpha",
                      fit_args.config.loss_opts.focal.alpha);
  cmd_fit->add_option("--focal-gamma",
                      fit_args.config.loss_opts.focal.gamma);
  cmd_fit->add_option("--trace-out", fit_args.trace_out, "trace CSV path");
  cmd_fit->add_option("--trace-json-out", fit_args.trace_json_out,
                      "trace JSON path");
  cmd_fit->add_option("--pred-out", fit_args.pred_out,
                      "prediction file path");

  RasterArgs raster_args;
  auto* cmd_raster =
      app.add_subcommand("raster", "render GT masks (BEV or PV)");
  cmd_raster->add_option("--gt", raster_args.gt, "GT scene file")->required();
  cmd_raster->add_flag("--bev", raster_args.bev, "BEV occupancy mask");
  cmd_raster->add_flag("--pv", raster_args.pv, "perspective-view mask");
  cmd_raster->add_option("--cell-size", raster_args.cell_size, "meters");
  cmd_raster->add_option("--line-width", raster_args.line_width, "meters");
  cmd_raster->add_flag("--fill-polygons", raster_args.fill_polygons);
  cmd_raster->add_option("--fx", raster_args.fx);
  cmd_raster->add_option("--fy", raster_args.fy);
  cmd_raster->add_option("--cx", raster_args.cx);
  cmd_raster->add_option("--cy", raster_args.cy);
  cmd_raster->add_option("--img-width", raster_args.img_width);
  cmd_raster->add_option("--img-height", raster_args.img_height);
  cmd_raster->add_option("--cam-x", raster_args.cam_x);
  cmd_raster->add_option("--cam-y", raster_args.cam_y);
  cmd_raster->add_option("--cam-z", raster_args.cam_z);
  cmd_raster->add_option("--cam-yaw", raster_args.cam_yaw, "radians");
  cmd_raster->add_option("--cam-pitch", raster_args.cam_pitch, "radians");
  cmd_raster->add_option("--cam-roll", raster_args.cam_roll, "radians");
  cmd_raster->add_option("--line-width-px", raster_args.line_width_px);
  cmd_raster->add_option("--near", raster_args.near_plane, "meters");
  cmd_raster->add_option("--out", raster_args.out, "PGM path")->required();

  BenchArgs bench_args;
  auto* cmd_bench = app.add_subcommand(
      "bench-attn", "vanilla vs decoupled self-attention cost");
  cmd_bench->add_option("--n-list", bench_args.n_list,
                        "comma-separated instance counts");
  cmd_bench->add_option("--nv", bench_args.n_v, "point queries");
  cmd_bench->add_option("--d", bench_args.d, "embedding width");
  cmd_bench->add_option("--reps", bench_args.reps, "repetitions (>= 3)");
  cmd_bench->add_option("--seed", bench_args.seed);
  cmd_bench->add_option("--out", bench_args.out, "CSV path (default stdout)");

  PlotArgs plot_args;
  auto* cmd_plot = app.add_subcommand("plot", "SVG overlay of GT and preds");
  cmd_plot->add_option("--gt", plot_args.gt, "GT scene file")->required();
  cmd_plot->add_option("--pred", plot_args.pred, "prediction file");
  cmd_plot->add_option("--scene-id", plot_args.scene_id,
                       "prediction scene to overlay");
  cmd_plot->add_option("--out", plot_args.out, "SVG path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_gen->parsed()) return run_gen(gen);
    if (cmd_eval->parsed()) return run_eval(eval_args);
    if (cmd_fit->parsed()) return run_fit(fit_args);
    if (cmd_raster->parsed()) return run_raster(raster_args);
    if (cmd_bench->parsed()) return run_bench(bench_args);
    if (cmd_plot->parsed()) return run_plot(plot_args);
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const DivergenceDetected& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return kExitDivergence;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitMismatch;
  } catch (const CapacityExceeded& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitMismatch;
  } catch (const ShapeMismatch& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitMismatch;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
