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

#include <filesystem>
#include <string>

#include "crownforge/errors.hpp"

namespace crownforge {

/// Run configuration shared by all CLI subcommands. Defaults mirror the
/// standard pipeline parameters.
struct RunConfig {
  int tile_size = 1024;
  double overlap = 0.5;
  double black_threshold = 0.8;
  double min_visible = 0.2;
  int pps = 100;
  int maxima_window = 100;
  double nms_score_threshold = 0.5;
  double nms_iou_threshold = 0.5;
  /// "coco" = IoU 0.50:0.95 step 0.05, "ap50" = 0.50 only.
  std::string ap_mode = "coco";
  /// "tile" or "orthomosaic" scope for DSM max-normalization.
  std::string normalization = "tile";
  int max_detections = 300;

  /// Throws ValidationError on out-of-range values.
  void validate() const;
  std::string to_json() const;
};

/// Parse config JSON; unknown keys are rejected with a FormatError naming
/// the key. Values not present keep their defaults.
RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json(const std::string& text);

}  // namespace crownforge
