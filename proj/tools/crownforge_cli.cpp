// Copyright 2026 The Crownforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crownforge/chart.hpp"
#include "crownforge/config.hpp"
#include "crownforge/dataset.hpp"
#include "crownforge/evaluation.hpp"
#include "crownforge/prompting.hpp"
#include "crownforge/raster.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace crownforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

void write_config_echo(const RunConfig& cfg, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream out(dir / "run_config.json");
  out << cfg.to_json() << "\n";
}

std::vector<double> thresholds_for(const RunConfig& cfg) {
  if (cfg.ap_mode == "ap50") return {0.50};
  return {0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
}

int run_tile(const RunConfig& cfg, const std::string& rgb_path,
             const std::string& dsm_path, const std::string& ann_path,
             const std::string& aoi_path, const std::string& out_dir,
             const std::string& source_name, int class_threshold,
             bool pixel_visibility) {
  RasterGrid rgb = read_raster(rgb_path);
  RasterGrid dsm = read_raster(dsm_path);
  if (dsm.width != rgb.width || dsm.height != rgb.height ||
      dsm.geotransform != rgb.geotransform) {
    std::cerr << "aligning DSM to the orthomosaic grid\n";
    dsm = align_dsm(dsm, rgb);
  }
  const auto annotations = read_annotations_geojson(ann_path);
  const auto aoi = read_aoi_geojson(aoi_path);
  const ClassMap class_map = build_class_map(annotations, class_threshold);

  TilingParams params;
  params.tile_size = cfg.tile_size;
  params.overlap = cfg.overlap;
  params.black_threshold = cfg.black_threshold;
  params.min_visible = cfg.min_visible;
  params.pixel_count_visibility = pixel_visibility;
  params.source_name = source_name;

  const TileManifest manifest =
      generate_tiles(rgb, dsm, aoi, annotations, class_map, params, out_dir);
  if (manifest.tiles.empty()) {
    std::cerr << "warning: no tiles emitted (AOI outside raster or no "
                 "surviving labels)\n";
  }
  write_manifest(manifest, out_dir);
  write_config_echo(cfg, out_dir);
  std::cout << "wrote " << manifest.tiles.size() << " tiles to " << out_dir
            << "\n";
  return kExitOk;
}

int run_split(const std::string& manifest_path, const std::string& regions_path,
              const std::string& out_dir) {
  TileManifest manifest = read_manifest(manifest_path);
  const auto regions = read_split_regions_geojson(regions_path);
  assign_splits(manifest, regions);
  write_manifest(manifest, out_dir);
  const SplitValidation report = validate_splits(manifest);
  std::cout << "tiles: train " << report.tile_counts[0] << ", val "
            << report.tile_counts[1] << ", test " << report.tile_counts[2]
            << ", unassigned " << report.unassigned_tiles << "\n";
  return kExitOk;
}

int run_prompts(const RunConfig& cfg, const std::string& mode,
                const std::string& dsm_path, const std::string& manifest_path,
                const std::string& out_path, bool normalize) {
  std::ofstream out(out_path);
  if (!out) throw FormatError("cannot write " + out_path);

  auto dsm_prompts_for = [&](const RasterGrid& dsm, const std::string& id) {
    const RasterGrid& src = normalize ? normalize_dsm(dsm) : dsm;
    PromptSet set = dsm_local_maxima(src, cfg.maxima_window);
    set.tile_id = id;
    return set;
  };

  std::size_t n_sets = 0;
  if (!manifest_path.empty()) {
    const TileManifest manifest = read_manifest(manifest_path);
    const fs::path dir = fs::path(manifest_path).parent_path();
    for (const TileRecord& tile : manifest.tiles) {
      PromptSet set;
      if (mode == "grid") {
        set = grid_prompts(tile.window.w, cfg.pps);
        set.tile_id = tile.tile_id;
      } else {
        const RasterGrid dsm = read_raster(dir / (tile.tile_id + "_dsm"));
        set = dsm_prompts_for(dsm, tile.tile_id);
      }
      out << prompt_set_to_jsonl(set) << "\n";
      ++n_sets;
    }
  } else if (mode == "grid") {
    PromptSet set = grid_prompts(cfg.tile_size, cfg.pps);
    set.tile_id = fs::path(dsm_path).stem().string();
    out << prompt_set_to_jsonl(set) << "\n";
    n_sets = 1;
  } else {
    const RasterGrid dsm = read_raster(dsm_path);
    std::string id = fs::path(dsm_path).filename().string();
    if (auto pos = id.find(".rasterhdr.json"); pos != std::string::npos) {
      id.resize(pos);
    } else if (auto rpos = id.find(".raster"); rpos != std::string::npos) {
      id.resize(rpos);
    }
    out << prompt_set_to_jsonl(dsm_prompts_for(dsm, id)) << "\n";
    n_sets = 1;
  }
  std::cout << "wrote " << n_sets << " prompt sets to " << out_path << "\n";
  return kExitOk;
}

int run_nms(const RunConfig& cfg, const std::string& pred_path,
            const std::string& out_path, bool class_aware, bool use_box_iou) {
  const PredictionSet preds = read_predictions_jsonl(pred_path);
  NmsOptions opts;
  opts.score_threshold = cfg.nms_score_threshold;
  opts.iou_threshold = cfg.nms_iou_threshold;
  opts.class_aware = class_aware;
  opts.box_iou = use_box_iou;

  PredictionSet kept;
  for (const auto& [tile_id, instances] : preds.tiles) {
    std::vector<ScoredInstance> scored;
    scored.reserve(instances.size());
    for (const auto& inst : instances) {
      scored.push_back(
          {inst.mask, inst.class_id, fuse_scores(inst.score, inst.score2)});
    }
    std::vector<PredictionInstance> survivors;
    for (const ScoredInstance& s : nms(scored, opts)) {
      survivors.push_back({s.mask, s.class_id, s.score, std::nullopt});
    }
    if (!survivors.empty()) kept.tiles[tile_id] = std::move(survivors);
  }
  write_predictions_jsonl(kept, out_path);
  return kExitOk;
}

int run_eval(const RunConfig& cfg, const std::string& gt_path,
             const std::string& pred_path, const std::string& out_dir,
             const std::string& split) {
  const TileManifest manifest = read_manifest(gt_path);
  std::optional<Split> split_filter;
  if (!split.empty()) split_filter = split_from_name(split);
  const GroundTruthSet gt = ground_truth_from_manifest(manifest, split_filter);
  const PredictionSet preds = read_predictions_jsonl(pred_path);

  EvalOptions opts;
  opts.iou_thresholds = thresholds_for(cfg);
  opts.max_detections_per_tile = cfg.max_detections;
  const EvalReport report = evaluate(gt, preds, opts);
  write_report(report, out_dir, cfg.to_json());
  write_config_echo(cfg, out_dir);
  std::cout << "mAP " << report.map << "  wmAP " << report.wmap
            << "  mAP_single " << report.map_single << "  mIoU "
            << report.miou << "\n";
  return kExitOk;
}

int run_chart(const std::vector<std::string>& report_paths,
              const std::string& spec_path, const std::string& out_path,
              bool percent) {
  ChartSpec spec;
  spec.percent = percent;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw FormatError("cannot open " + spec_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw FormatError("malformed chart spec: " + std::string(e.what()));
    }
    spec.classes = j.at("classes").get<std::vector<std::string>>();
    spec.counts = j.at("counts").get<std::vector<std::int64_t>>();
    for (const auto& sj : j.at("series")) {
      ChartSeries s;
      s.label = sj.at("label").get<std::string>();
      s.values = sj.at("values").get<std::vector<double>>();
      if (sj.contains("errors")) {
        s.errors = sj.at("errors").get<std::vector<double>>();
      }
      spec.series.push_back(std::move(s));
    }
  } else {
    for (const std::string& path : report_paths) {
      std::ifstream in(path);
      if (!in) throw FormatError("cannot open " + path);
      json j;
      in >> j;
      ChartSeries s;
      s.label = fs::path(path).parent_path().filename().string();
      if (s.label.empty()) s.label = fs::path(path).stem().string();
      if (spec.classes.empty()) {
        for (const auto& cj : j.at("classes")) {
          spec.classes.push_back(cj.at("name").get<std::string>());
          spec.counts.push_back(cj.at("n").get<std::int64_t>());
        }
      }
      for (const auto& cj : j.at("classes")) {
        s.values.push_back(cj.at("ap").is_null() ? 0.0
                                                 : cj.at("ap").get<double>());
      }
      spec.series.push_back(std::move(s));
    }
  }
  write_chart(spec, out_path);
  std::cout << "wrote " << out_path << "\n";
  return kExitOk;
}

int run_validate(const std::string& manifest_path) {
  const TileManifest manifest = read_manifest(manifest_path);
  const SplitValidation report = validate_splits(manifest);
  std::cout << "tiles: train " << report.tile_counts[0] << ", val "
            << report.tile_counts[1] << ", test " << report.tile_counts[2]
            << ", unassigned " << report.unassigned_tiles << "\n";
  for (std::size_t c = 0; c < report.label_counts.size(); ++c) {
    std::cout << manifest.class_map.classes[c] << ": "
              << report.label_counts[c][0] << " / " << report.label_counts[c][1]
              << " / " << report.label_counts[c][2] << "\n";
  }
  if (!report.ok) {
    for (const std::string& failure : report.failures) {
      std::cerr << "FAIL: " << failure << "\n";
    }
    return kExitValidation;
  }
  std::cout << "all classes represented in all splits\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crownforge: tiling, prompting, and evaluation for tree-crown "
               "instance segmentation datasets"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "RunConfig JSON file")
      ->check(CLI::ExistingFile);

  // tile
  auto* tile_cmd = app.add_subcommand("tile", "Tile an orthomosaic/DSM pair");
  std::string rgb_path, dsm_path, ann_path, aoi_path, out_dir;
  std::string source_name = "ortho";
  int class_threshold = 20;
  bool pixel_visibility = false;
  std::optional<int> tile_size_flag;
  std::optional<double> overlap_flag, black_flag, visible_flag;
  tile_cmd->add_option("--rgb", rgb_path, "RGB orthomosaic raster")->required();
  tile_cmd->add_option("--dsm", dsm_path, "DSM raster")->required();
  tile_cmd->add_option("--annotations", ann_path, "crown GeoJSON")->required();
  tile_cmd->add_option("--aoi", aoi_path, "AOI GeoJSON")->required();
  tile_cmd->add_option("--out", out_dir, "output directory")->required();
  tile_cmd->add_option("--source-name", source_name, "orthomosaic name");
  tile_cmd->add_option("--class-threshold", class_threshold,
                       "min tree count for a species class");
  tile_cmd->add_flag("--pixel-visibility", pixel_visibility,
                     "measure the visibility rule by pixel counts");
  tile_cmd->add_option("--tile-size", tile_size_flag);
  tile_cmd->add_option("--overlap", overlap_flag);
  tile_cmd->add_option("--black-threshold", black_flag);
  tile_cmd->add_option("--min-visible", visible_flag);

  // split
  auto* split_cmd = app.add_subcommand("split", "Assign spatial splits");
  std::string manifest_path, regions_path, split_out;
  split_cmd->add_option("--manifest", manifest_path, "manifest.jsonl")
      ->required();
  split_cmd->add_option("--regions", regions_path, "split regions GeoJSON")
      ->required();
  split_cmd->add_option("--out", split_out, "output directory")->required();

  // prompts
  auto* prompts_cmd = app.add_subcommand("prompts", "Generate point prompts");
  std::string prompt_mode, prompt_dsm, prompt_manifest, prompt_out = "prompts.jsonl";
  bool prompt_normalize = false;
  std::optional<int> pps_flag, window_flag;
  prompts_cmd->add_option("mode", prompt_mode, "grid or dsm")
      ->required()
      ->check(CLI::IsMember({"grid", "dsm"}));
  prompts_cmd->add_option("--dsm", prompt_dsm, "single DSM tile raster");
  prompts_cmd->add_option("--manifest", prompt_manifest,
                          "manifest.jsonl (per-tile prompts)");
  prompts_cmd->add_option("--out", prompt_out, "output JSONL");
  prompts_cmd->add_option("--pps", pps_flag, "grid points per side");
  prompts_cmd->add_option("--window", window_flag, "maximum filter window");
  prompts_cmd->add_flag("--normalize", prompt_normalize,
                        "max-normalize the DSM first");

  // nms
  auto* nms_cmd = app.add_subcommand("nms", "Non-maximum suppression");
  std::string nms_pred, nms_out;
  bool nms_class_aware = false, nms_box = false;
  std::optional<double> nms_score_flag, nms_iou_flag;
  nms_cmd->add_option("--pred", nms_pred, "predictions JSONL")->required();
  nms_cmd->add_option("--out", nms_out, "output JSONL")->required();
  nms_cmd->add_option("--score-threshold", nms_score_flag);
  nms_cmd->add_option("--iou-threshold", nms_iou_flag);
  nms_cmd->add_flag("--class-aware", nms_class_aware);
  nms_cmd->add_flag("--box-iou", nms_box, "suppress on bounding-box IoU");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions");
  std::string eval_gt, eval_pred, eval_out, eval_split;
  std::string ap_mode_flag;
  eval_cmd->add_option("--gt", eval_gt, "ground-truth manifest.jsonl")
      ->required();
  eval_cmd->add_option("--pred", eval_pred, "predictions JSONL")->required();
  eval_cmd->add_option("--out", eval_out, "report directory")->required();
  eval_cmd->add_option("--split", eval_split, "restrict to one split");
  eval_cmd->add_option("--ap-mode", ap_mode_flag, "coco or ap50");

  // chart
  auto* chart_cmd = app.add_subcommand("chart", "Per-class AP bar chart");
  std::vector<std::string> chart_reports;
  std::string chart_spec, chart_out;
  bool chart_percent = false;
  chart_cmd->add_option("--report", chart_reports,
                        "report.json file(s), one series each");
  chart_cmd->add_option("--spec", chart_spec, "explicit chart spec JSON");
  chart_cmd->add_option("--out", chart_out, "output SVG")->required();
  chart_cmd->add_flag("--percent", chart_percent, "y axis 0-100");

  // validate
  auto* validate_cmd =
      app.add_subcommand("validate", "Check split/class coverage");
  std::string validate_manifest;
  validate_cmd->add_option("--manifest", validate_manifest, "manifest.jsonl")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    RunConfig cfg =
        config_path.empty() ? RunConfig{} : load_config(config_path);
    // Flags override the config file.
    if (tile_size_flag) cfg.tile_size = *tile_size_flag;
    if (overlap_flag) cfg.overlap = *overlap_flag;
    if (black_flag) cfg.black_threshold = *black_flag;
    if (visible_flag) cfg.min_visible = *visible_flag;
    if (pps_flag) cfg.pps = *pps_flag;
    if (window_flag) cfg.maxima_window = *window_flag;
    if (nms_score_flag) cfg.nms_score_threshold = *nms_score_flag;
    if (nms_iou_flag) cfg.nms_iou_threshold = *nms_iou_flag;
    if (!ap_mode_flag.empty()) cfg.ap_mode = ap_mode_flag;
    cfg.validate();

    if (tile_cmd->parsed()) {
      return run_tile(cfg, rgb_path, dsm_path, ann_path, aoi_path, out_dir,
                      source_name, class_threshold, pixel_visibility);
    }
    if (split_cmd->parsed()) {
      return run_split(manifest_path, regions_path, split_out);
    }
    if (prompts_cmd->parsed()) {
      if (prompt_dsm.empty() && prompt_manifest.empty() &&
          prompt_mode == "dsm") {
        std::cerr << "error: prompts dsm needs --dsm or --manifest\n";
        return kExitUsage;
      }
      return run_prompts(cfg, prompt_mode, prompt_dsm, prompt_manifest,
                         prompt_out, prompt_normalize);
    }
    if (nms_cmd->parsed()) {
      return run_nms(cfg, nms_pred, nms_out, nms_class_aware, nms_box);
    }
    if (eval_cmd->parsed()) {
      return run_eval(cfg, eval_gt, eval_pred, eval_out, eval_split);
    }
    if (chart_cmd->parsed()) {
      if (chart_reports.empty() && chart_spec.empty()) {
        std::cerr << "error: chart needs --report or --spec\n";
        return kExitUsage;
      }
      return run_chart(chart_reports, chart_spec, chart_out, chart_percent);
    }
    if (validate_cmd->parsed()) {
      return run_validate(validate_manifest);
    }
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
