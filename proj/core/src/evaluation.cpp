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

#include "crownforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

namespace crownforge {

using nlohmann::json;

std::int64_t GroundTruthSet::total_instances() const {
  std::int64_t n = 0;
  for (const auto& [id, instances] : tiles) n += std::int64_t(instances.size());
  return n;
}

GroundTruthSet ground_truth_from_manifest(const TileManifest& manifest,
                                          std::optional<Split> split) {
  GroundTruthSet gt;
  gt.class_names = manifest.class_map.classes;
  gt.class_counts.assign(gt.class_names.size(), 0);
  for (const TileRecord& tile : manifest.tiles) {
    if (split && tile.split != *split) continue;
    std::vector<GroundTruthInstance> instances;
    for (const TileLabel& label : tile.labels) {
      GroundTruthInstance inst;
      inst.mask = rasterize_polygon(label.polygon, tile.window.w, tile.window.h);
      if (inst.mask.count() == 0) continue;  // sub-pixel sliver
      inst.class_id = label.class_id;
      if (label.class_id >= int(gt.class_counts.size())) {
        gt.class_counts.resize(label.class_id + 1, 0);
        while (int(gt.class_names.size()) < int(gt.class_counts.size())) {
          gt.class_names.push_back("class_" +
                                   std::to_string(gt.class_names.size()));
        }
      }
      ++gt.class_counts[label.class_id];
      instances.push_back(std::move(inst));
    }
    gt.tiles[tile.tile_id] = std::move(instances);
  }
  return gt;
}

double fuse_scores(double primary, std::optional<double> secondary) {
  if (primary < 0.0 || primary > 1.0) {
    throw ValidationError("fuse_scores: primary score " +
                          std::to_string(primary) + " outside [0,1]");
  }
  if (!secondary) return primary;
  if (*secondary < 0.0 || *secondary > 1.0) {
    throw ValidationError("fuse_scores: secondary score " +
                          std::to_string(*secondary) + " outside [0,1]");
  }
  return 0.5 * (primary + *secondary);
}

namespace {

BinaryMask mask_from_json(const json& mj) {
  const std::string type = mj.at("type").get<std::string>();
  const int width = mj.at("width").get<int>();
  const int height = mj.at("height").get<int>();
  if (type == "rle") {
    RunLengthCounts rle;
    rle.width = width;
    rle.height = height;
    rle.counts = mj.at("data").get<std::vector<std::uint64_t>>();
    return rle_decode(rle);
  }
  if (type == "polygon") {
    Polygon p;
    const json& rings = mj.at("data");
    if (rings.empty()) throw FormatError("polygon mask with no rings");
    for (std::size_t r = 0; r < rings.size(); ++r) {
      std::vector<Point> ring;
      for (const auto& c : rings.at(r)) {
        ring.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
      }
      if (r == 0) {
        p.exterior = std::move(ring);
      } else {
        p.holes.push_back(std::move(ring));
      }
    }
    return rasterize_polygon(p, width, height);
  }
  throw FormatError("unknown mask type '" + type + "'");
}

}  // namespace

PredictionSet read_predictions_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  PredictionSet preds;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
    PredictionInstance inst;
    inst.class_id = j.value("class_id", 0);
    inst.score = j.at("score").get<double>();
    if (j.contains("score2") && !j.at("score2").is_null()) {
      inst.score2 = j.at("score2").get<double>();
    }
    try {
      fuse_scores(inst.score, inst.score2);  // range validation
    } catch (const ValidationError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
    inst.mask = mask_from_json(j.at("mask"));
    if (inst.mask.count() == 0) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": prediction mask has no set pixels");
    }
    preds.tiles[j.at("tile_id").get<std::string>()].push_back(std::move(inst));
  }
  return preds;
}

void write_predictions_jsonl(const PredictionSet& preds,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  for (const auto& [tile_id, instances] : preds.tiles) {
    for (const PredictionInstance& inst : instances) {
      json j;
      j["tile_id"] = tile_id;
      j["class_id"] = inst.class_id;
      j["score"] = inst.score;
      if (inst.score2) j["score2"] = *inst.score2;
      const RunLengthCounts rle = rle_encode(inst.mask);
      j["mask"] = {{"type", "rle"},
                   {"width", rle.width},
                   {"height", rle.height},
                   {"data", rle.counts}};
      out << j.dump() << "\n";
    }
  }
}

namespace {

std::vector<int> score_order(std::span<const double> fused) {
  std::vector<int> order(fused.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return fused[a] > fused[b]; });
  return order;
}

/// Greedy matching over a precomputed IoU matrix iou[pred][gt].
MatchTable match_from_matrix(const std::vector<std::vector<double>>& iou,
                             std::span<const double> fused,
                             std::span<const int> pred_class,
                             std::span<const int> gt_class,
                             double iou_threshold, bool class_agnostic) {
  MatchTable table;
  table.pred_order = score_order(fused);
  table.pred_to_gt.assign(table.pred_order.size(), -1);
  table.gt_matched.assign(gt_class.size(), 0);
  for (std::size_t rank = 0; rank < table.pred_order.size(); ++rank) {
    const int p = table.pred_order[rank];
    int best_gt = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gt_class.size(); ++g) {
      if (table.gt_matched[g]) continue;
      if (!class_agnostic && gt_class[g] != pred_class[p]) continue;
      const double v = iou[p][g];
      if (v >= iou_threshold && v > best_iou) {
        best_iou = v;
        best_gt = int(g);
      }
    }
    if (best_gt >= 0) {
      table.pred_to_gt[rank] = best_gt;
      table.gt_matched[best_gt] = 1;
    }
  }
  return table;
}

}  // namespace

MatchTable match_instances(std::span<const GroundTruthInstance> gt,
                           std::span<const PredictionInstance> preds,
                           double iou_threshold, bool class_agnostic) {
  std::vector<std::vector<double>> iou(preds.size(),
                                       std::vector<double>(gt.size(), 0.0));
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < gt.size(); ++g) {
      iou[p][g] = mask_iou(preds[p].mask, gt[g].mask);
    }
  }
  std::vector<double> fused(preds.size());
  std::vector<int> pred_class(preds.size());
  for (std::size_t p = 0; p < preds.size(); ++p) {
    fused[p] = fuse_scores(preds[p].score, preds[p].score2);
    pred_class[p] = preds[p].class_id;
  }
  std::vector<int> gt_class(gt.size());
  for (std::size_t g = 0; g < gt.size(); ++g) gt_class[g] = gt[g].class_id;
  return match_from_matrix(iou, fused, pred_class, gt_class, iou_threshold,
                           class_agnostic);
}

double ap_from_detections(std::span<const Detection> detections,
                          std::int64_t n_gt) {
  if (n_gt <= 0) return std::numeric_limits<double>::quiet_NaN();
  if (detections.empty()) return 0.0;

  std::vector<double> precision(detections.size());
  std::vector<double> recall(detections.size());
  std::int64_t tp = 0;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (detections[i].tp) ++tp;
    precision[i] = double(tp) / double(i + 1);
    recall[i] = double(tp) / double(n_gt);
  }
  // Precision envelope: monotone non-increasing from the right.
  for (std::size_t i = precision.size() - 1; i-- > 0;) {
    precision[i] = std::max(precision[i], precision[i + 1]);
  }

  double sum = 0.0;
  std::size_t idx = 0;
  for (int r = 0; r <= 100; ++r) {
    const double target = r / 100.0;
    while (idx < recall.size() && recall[idx] < target) ++idx;
    if (idx < recall.size()) sum += precision[idx];
  }
  return sum / 101.0;
}

AggregateResult aggregate(std::span<const double> ap_per_class,
                          std::span<const std::int64_t> class_counts) {
  if (ap_per_class.size() != class_counts.size()) {
    throw ValidationError("aggregate: " + std::to_string(ap_per_class.size()) +
                          " APs vs " + std::to_string(class_counts.size()) +
                          " counts");
  }
  double sum = 0.0, wsum = 0.0;
  std::int64_t n_classes = 0, n_total = 0;
  for (std::size_t c = 0; c < ap_per_class.size(); ++c) {
    if (std::isnan(ap_per_class[c])) continue;  // class without GT
    sum += ap_per_class[c];
    wsum += ap_per_class[c] * double(class_counts[c]);
    ++n_classes;
    n_total += class_counts[c];
  }
  AggregateResult result;
  if (n_classes > 0) result.map = sum / double(n_classes);
  if (n_total > 0) result.wmap = wsum / double(n_total);
  return result;
}

unsigned effective_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CROWNFORGE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min<unsigned>(n, unsigned(cap));
  }
  return n;
}

namespace {

struct TileEval {
  std::string tile_id;
  std::vector<double> fused;              // per prediction, input order
  std::vector<int> pred_class;
  std::vector<int> gt_class;
  std::vector<std::vector<double>> iou;   // [pred][gt]
};

/// Per-tile fused scores, detection cap, and IoU matrices. Matrix
/// computation runs across tiles under the CROWNFORGE_THREADS cap.
std::vector<TileEval> prepare_tiles(const GroundTruthSet& gt,
                                    const PredictionSet& preds,
                                    const EvalOptions& opts) {
  for (const auto& [tile_id, instances] : preds.tiles) {
    if (!gt.tiles.count(tile_id)) {
      throw ValidationError("predictions reference unknown tile '" + tile_id +
                            "'");
    }
  }

  std::vector<TileEval> tiles;
  std::vector<const std::vector<GroundTruthInstance>*> gt_ptrs;
  std::vector<const PredictionInstance*> pred_ptrs;
  std::vector<std::vector<int>> kept_indices;
  static const std::vector<PredictionInstance> kNoPreds;
  for (const auto& [tile_id, gt_instances] : gt.tiles) {
    auto it = preds.tiles.find(tile_id);
    const auto& tile_preds = it != preds.tiles.end() ? it->second : kNoPreds;

    TileEval te;
    te.tile_id = tile_id;
    te.gt_class.reserve(gt_instances.size());
    for (const auto& g : gt_instances) te.gt_class.push_back(g.class_id);

    // Detection cap: keep the highest fused scores, preserve input order.
    std::vector<double> all_fused(tile_preds.size());
    for (std::size_t p = 0; p < tile_preds.size(); ++p) {
      all_fused[p] = fuse_scores(tile_preds[p].score, tile_preds[p].score2);
    }
    std::vector<int> kept = score_order(all_fused);
    if (int(kept.size()) > opts.max_detections_per_tile) {
      kept.resize(opts.max_detections_per_tile);
    }
    std::sort(kept.begin(), kept.end());
    for (const int p : kept) {
      te.fused.push_back(all_fused[p]);
      te.pred_class.push_back(tile_preds[p].class_id);
    }
    te.iou.assign(kept.size(), std::vector<double>(gt_instances.size(), 0.0));

    tiles.push_back(std::move(te));
    gt_ptrs.push_back(&gt_instances);
    pred_ptrs.push_back(tile_preds.data());
    kept_indices.push_back(std::move(kept));
  }

  const unsigned n_threads =
      std::min<unsigned>(effective_threads(), std::max<std::size_t>(tiles.size(), 1));
  auto worker = [&](unsigned tid) {
    for (std::size_t t = tid; t < tiles.size(); t += n_threads) {
      TileEval& te = tiles[t];
      const auto& gt_instances = *gt_ptrs[t];
      for (std::size_t p = 0; p < kept_indices[t].size(); ++p) {
        const BinaryMask& pm = pred_ptrs[t][kept_indices[t][p]].mask;
        for (std::size_t g = 0; g < gt_instances.size(); ++g) {
          te.iou[p][g] = mask_iou(pm, gt_instances[g].mask);
        }
      }
    }
  };
  if (n_threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker, i);
    for (auto& th : pool) th.join();
  }
  return tiles;
}

/// Per-class AP at one IoU threshold across all tiles.
std::vector<double> ap_at_threshold(const std::vector<TileEval>& tiles,
                                    std::span<const std::int64_t> class_counts,
                                    double threshold, bool class_agnostic,
                                    std::int64_t agnostic_n_gt,
                                    double* ap_single) {
  const int n_classes = class_agnostic ? 1 : int(class_counts.size());
  std::vector<std::vector<Detection>> per_class(n_classes);
  for (const TileEval& te : tiles) {
    const MatchTable table = match_from_matrix(
        te.iou, te.fused, te.pred_class, te.gt_class, threshold,
        class_agnostic);
    // Re-emit detections in input order so cross-tile stable sort ties
    // resolve by (tile order, input order).
    std::vector<std::uint8_t> tp(te.fused.size(), 0);
    for (std::size_t rank = 0; rank < table.pred_order.size(); ++rank) {
      if (table.pred_to_gt[rank] >= 0) tp[table.pred_order[rank]] = 1;
    }
    for (std::size_t p = 0; p < te.fused.size(); ++p) {
      const int c = class_agnostic ? 0 : te.pred_class[p];
      if (c < 0 || c >= n_classes) continue;
      per_class[c].push_back({te.fused[p], tp[p] != 0});
    }
  }
  std::vector<double> ap(n_classes);
  for (int c = 0; c < n_classes; ++c) {
    std::stable_sort(per_class[c].begin(), per_class[c].end(),
                     [](const Detection& a, const Detection& b) {
                       return a.score > b.score;
                     });
    const std::int64_t n_gt =
        class_agnostic ? agnostic_n_gt : class_counts[c];
    ap[c] = ap_from_detections(per_class[c], n_gt);
  }
  if (ap_single) *ap_single = ap[0];
  return ap;
}

double best_match_miou(const std::vector<TileEval>& tiles,
                       std::int64_t n_gt_total) {
  double sum = 0.0;
  for (const TileEval& te : tiles) {
    for (std::size_t g = 0; g < te.gt_class.size(); ++g) {
      double best = 0.0;
      for (std::size_t p = 0; p < te.fused.size(); ++p) {
        best = std::max(best, te.iou[p][g]);
      }
      sum += best;
    }
  }
  return n_gt_total > 0 ? sum / double(n_gt_total) : 0.0;
}

}  // namespace

SingleClassResult single_class_metrics(const GroundTruthSet& gt,
                                       const PredictionSet& preds,
                                       const EvalOptions& opts) {
  const std::int64_t n_gt = gt.total_instances();
  if (n_gt == 0) {
    throw ValidationError("single_class_metrics: ground truth is empty");
  }
  const std::vector<TileEval> tiles = prepare_tiles(gt, preds, opts);

  SingleClassResult result;
  double sum = 0.0;
  for (const double t : opts.iou_thresholds) {
    double ap = 0.0;
    ap_at_threshold(tiles, gt.class_counts, t, true, n_gt, &ap);
    sum += ap;
    if (t == 0.50) result.ap50_single = ap;
  }
  result.map_single = sum / double(opts.iou_thresholds.size());
  result.miou = best_match_miou(tiles, n_gt);
  return result;
}

EvalReport evaluate(const GroundTruthSet& gt, const PredictionSet& preds,
                    const EvalOptions& opts) {
  if (opts.iou_thresholds.empty()) {
    throw ValidationError("evaluate: empty IoU threshold set");
  }
  const std::vector<TileEval> tiles = prepare_tiles(gt, preds, opts);
  const int n_classes = gt.num_classes();

  EvalReport report;
  report.class_names = gt.class_names;
  report.class_counts = gt.class_counts;
  report.ap.assign(n_classes, 0.0);
  report.ap50.assign(n_classes,
                     std::numeric_limits<double>::quiet_NaN());

  std::vector<double> sums(n_classes, 0.0);
  for (const double t : opts.iou_thresholds) {
    const std::vector<double> ap =
        ap_at_threshold(tiles, gt.class_counts, t, false, 0, nullptr);
    for (int c = 0; c < n_classes; ++c) sums[c] += ap[c];
    if (t == 0.50) report.ap50 = ap;
  }
  for (int c = 0; c < n_classes; ++c) {
    report.ap[c] = sums[c] / double(opts.iou_thresholds.size());
    if (std::isnan(report.ap[c])) {
      report.warnings.push_back("class '" + gt.class_names[c] +
                                "' has no ground truth, AP undefined");
    }
  }

  const AggregateResult agg = aggregate(report.ap, report.class_counts);
  report.map = agg.map;
  report.wmap = agg.wmap;

  const std::int64_t n_gt = gt.total_instances();
  if (n_gt > 0) {
    double sum_single = 0.0;
    for (const double t : opts.iou_thresholds) {
      double ap = 0.0;
      ap_at_threshold(tiles, gt.class_counts, t, true, n_gt, &ap);
      sum_single += ap;
      if (t == 0.50) report.ap50_single = ap;
    }
    report.map_single = sum_single / double(opts.iou_thresholds.size());
    report.miou = best_match_miou(tiles, n_gt);
  }
  return report;
}

void write_report(const EvalReport& report, const std::filesystem::path& dir,
                  const std::string& config_echo) {
  std::filesystem::create_directories(dir);

  json j;
  j["classes"] = json::array();
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    json cj;
    cj["name"] = report.class_names[c];
    cj["n"] = report.class_counts[c];
    if (std::isnan(report.ap[c])) {
      cj["ap"] = nullptr;
      cj["ap50"] = nullptr;
    } else {
      cj["ap"] = report.ap[c];
      cj["ap50"] = report.ap50[c];
    }
    j["classes"].push_back(std::move(cj));
  }
  j["map"] = report.map;
  j["wmap"] = report.wmap;
  j["map_single"] = report.map_single;
  j["ap50_single"] = report.ap50_single;
  j["miou"] = report.miou;
  j["warnings"] = report.warnings;
  if (!config_echo.empty()) {
    try {
      j["config"] = json::parse(config_echo);
    } catch (const json::exception&) {
      j["config"] = config_echo;
    }
  }
  std::ofstream out(dir / "report.json");
  out << j.dump(2) << "\n";
  if (!out) throw FormatError("cannot write " + (dir / "report.json").string());

  std::ofstream csv(dir / "report.csv");
  csv << "class,n,AP,AP50\n";
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    csv << report.class_names[c] << "," << report.class_counts[c] << ",";
    if (!std::isnan(report.ap[c])) {
      csv << report.ap[c] << "," << report.ap50[c];
    } else {
      csv << ",";
    }
    csv << "\n";
  }
  csv << "mAP,," << report.map << ",\n";
  csv << "wmAP,," << report.wmap << ",\n";
  csv << "mAP_single,," << report.map_single << ",\n";
  csv << "mIoU,," << report.miou << ",\n";
  if (!csv) throw FormatError("cannot write " + (dir / "report.csv").string());
}

}  // namespace crownforge
