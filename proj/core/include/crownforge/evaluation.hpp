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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crownforge/dataset.hpp"
#include "crownforge/geometry.hpp"

namespace crownforge {

struct GroundTruthInstance {
  BinaryMask mask;
  int class_id = 0;
};

struct GroundTruthSet {
  /// Ordered by tile id for deterministic reduction.
  std::map<std::string, std::vector<GroundTruthInstance>> tiles;
  std::vector<std::int64_t> class_counts;  // n_c
  std::vector<std::string> class_names;

  int num_classes() const { return int(class_counts.size()); }
  std::int64_t total_instances() const;
};

/// Rasterize manifest labels into per-tile ground-truth masks. When
/// `split` is given, only tiles of that split are kept.
GroundTruthSet ground_truth_from_manifest(
    const TileManifest& manifest,
    std::optional<Split> split = std::nullopt);

struct PredictionInstance {
  BinaryMask mask;
  int class_id = 0;
  double score = 0.0;
  std::optional<double> score2;
};

struct PredictionSet {
  std::map<std::string, std::vector<PredictionInstance>> tiles;
};

/// Mean of the two score channels when the secondary is present, else the
/// primary. Throws ValidationError on out-of-range scores.
double fuse_scores(double primary, std::optional<double> secondary);

/// JSONL interchange, one instance per line:
/// {"tile_id", "class_id", "score", "score2"?, "mask": {"type": "rle"|"polygon",
///  "width", "height", "data"}}.
PredictionSet read_predictions_jsonl(const std::filesystem::path& path);
void write_predictions_jsonl(const PredictionSet& preds,
                             const std::filesystem::path& path);

/// Per-tile match outcome at one IoU threshold. pred_to_gt[i] is the index
/// of the matched GT instance, or -1 for a false positive. Predictions are
/// indexed in fused-score order (descending, ties by input order).
struct MatchTable {
  std::vector<int> pred_order;    // original indices in score order
  std::vector<int> pred_to_gt;    // aligned with pred_order
  std::vector<std::uint8_t> gt_matched;
};

/// Greedy score-ordered matching: each prediction takes the unmatched GT
/// of highest IoU among GT of its class (or any class when class_agnostic)
/// provided that IoU >= iou_threshold.
MatchTable match_instances(std::span<const GroundTruthInstance> gt,
                           std::span<const PredictionInstance> preds,
                           double iou_threshold, bool class_agnostic = false);

/// One scored detection with its per-threshold TP verdict already decided.
struct Detection {
  double score = 0.0;
  bool tp = false;
};

/// 101-point interpolated AP: precision envelope sampled at recalls
/// 0.00, 0.01, ..., 1.00. `detections` must be sorted by descending score.
double ap_from_detections(std::span<const Detection> detections,
                          std::int64_t n_gt);

struct EvalOptions {
  /// IoU thresholds averaged into AP. Default 0.50:0.95 step 0.05.
  std::vector<double> iou_thresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                        0.75, 0.80, 0.85, 0.90, 0.95};
  int max_detections_per_tile = 300;
};

struct EvalReport {
  std::vector<std::string> class_names;
  std::vector<std::int64_t> class_counts;
  /// AP per class, averaged over the threshold set. NaN when the class has
  /// zero GT instances (excluded from aggregation).
  std::vector<double> ap;
  std::vector<double> ap50;
  double map = 0.0;
  double wmap = 0.0;
  double map_single = 0.0;
  double ap50_single = 0.0;
  double miou = 0.0;
  std::vector<std::string> warnings;
};

/// Unweighted mean and count-weighted mean of per-class APs. NaN entries
/// (classes without GT) are excluded from both. Throws ValidationError on
/// length mismatch.
struct AggregateResult {
  double map = 0.0;
  double wmap = 0.0;
};
AggregateResult aggregate(std::span<const double> ap_per_class,
                          std::span<const std::int64_t> class_counts);

/// Single-class collapse: mAP with every label mapped to one "trees"
/// class, plus best-match mIoU (mean over GT instances of the highest IoU
/// any prediction in the tile achieves; 0 when the tile has no
/// predictions). Throws ValidationError on empty GT.
struct SingleClassResult {
  double map_single = 0.0;
  double ap50_single = 0.0;
  double miou = 0.0;
};
SingleClassResult single_class_metrics(const GroundTruthSet& gt,
                                       const PredictionSet& preds,
                                       const EvalOptions& opts = {});

EvalReport evaluate(const GroundTruthSet& gt, const PredictionSet& preds,
                    const EvalOptions& opts = {});

/// report.json plus report.csv (rows: class, n, AP, AP50; footer rows for
/// mAP, wmAP, mAP_single, mIoU). `config_echo` is embedded verbatim into
/// report.json when non-empty.
void write_report(const EvalReport& report, const std::filesystem::path& dir,
                  const std::string& config_echo = "");

/// Parallelism cap: CROWNFORGE_THREADS when set, else hardware_concurrency.
unsigned effective_threads();

}  // namespace crownforge
