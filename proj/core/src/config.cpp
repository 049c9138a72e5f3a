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

#include "crownforge/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace crownforge {

using nlohmann::json;

void RunConfig::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (tile_size <= 0) throw ValidationError("config: tile_size must be > 0");
  if (!in_unit(overlap) || overlap >= 1.0) {
    throw ValidationError("config: overlap must be in [0,1)");
  }
  if (!in_unit(black_threshold)) {
    throw ValidationError("config: black_threshold must be in [0,1]");
  }
  if (!in_unit(min_visible)) {
    throw ValidationError("config: min_visible must be in [0,1]");
  }
  if (!in_unit(nms_score_threshold) || !in_unit(nms_iou_threshold)) {
    throw ValidationError("config: NMS thresholds must be in [0,1]");
  }
  if (pps < 1) throw ValidationError("config: pps must be >= 1");
  if (maxima_window < 1) {
    throw ValidationError("config: maxima_window must be >= 1");
  }
  if (ap_mode != "coco" && ap_mode != "ap50") {
    throw ValidationError("config: ap_mode must be 'coco' or 'ap50'");
  }
  if (normalization != "tile" && normalization != "orthomosaic") {
    throw ValidationError(
        "config: normalization must be 'tile' or 'orthomosaic'");
  }
  if (max_detections < 1) {
    throw ValidationError("config: max_detections must be >= 1");
  }
}

std::string RunConfig::to_json() const {
  json j;
  j["tile_size"] = tile_size;
  j["overlap"] = overlap;
  j["black_threshold"] = black_threshold;
  j["min_visible"] = min_visible;
  j["pps"] = pps;
  j["maxima_window"] = maxima_window;
  j["nms_score_threshold"] = nms_score_threshold;
  j["nms_iou_threshold"] = nms_iou_threshold;
  j["ap_mode"] = ap_mode;
  j["normalization"] = normalization;
  j["max_detections"] = max_detections;
  return j.dump();
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed config JSON: ") + e.what());
  }
  static const std::set<std::string> known = {
      "tile_size",   "overlap",       "black_threshold",
      "min_visible", "pps",           "maxima_window",
      "nms_score_threshold",          "nms_iou_threshold",
      "ap_mode",     "normalization", "max_detections"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw FormatError("config: unknown key '" + key + "'");
    }
  }

  RunConfig cfg;
  cfg.tile_size = j.value("tile_size", cfg.tile_size);
  cfg.overlap = j.value("overlap", cfg.overlap);
  cfg.black_threshold = j.value("black_threshold", cfg.black_threshold);
  cfg.min_visible = j.value("min_visible", cfg.min_visible);
  cfg.pps = j.value("pps", cfg.pps);
  cfg.maxima_window = j.value("maxima_window", cfg.maxima_window);
  cfg.nms_score_threshold =
      j.value("nms_score_threshold", cfg.nms_score_threshold);
  cfg.nms_iou_threshold = j.value("nms_iou_threshold", cfg.nms_iou_threshold);
  cfg.ap_mode = j.value("ap_mode", cfg.ap_mode);
  cfg.normalization = j.value("normalization", cfg.normalization);
  cfg.max_detections = j.value("max_detections", cfg.max_detections);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

}  // namespace crownforge
