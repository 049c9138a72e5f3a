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

#include <optional>
#include <string>
#include <vector>

#include "crownforge/raster.hpp"

namespace crownforge {

struct PointPrompt {
  double x = 0.0;
  double y = 0.0;
  enum class Source { grid, dsm_maxima } source = Source::grid;
  std::optional<double> elevation;
};

struct PromptSet {
  std::string tile_id;
  std::vector<PointPrompt> prompts;
  std::string params;  // e.g. "pps=100" or "window=100"
};

/// Regular pps x pps grid of points at cell centers:
/// ((i + 0.5) * tile_size / pps, (j + 0.5) * tile_size / pps).
PromptSet grid_prompts(int tile_size, int pps);

/// Sliding square-window maximum filter over the DSM; windows are clipped
/// at the borders. Pixels whose value equals their filtered maximum form
/// plateau candidates; 8-connected candidate components each yield one
/// prompt at the component centroid (rounded to the nearest pixel),
/// carrying the plateau elevation. Pixels below min_height (when set) are
/// never candidates. All-nodata tiles yield an empty set.
PromptSet dsm_local_maxima(const RasterGrid& dsm_tile, int window = 100,
                           std::optional<double> min_height = std::nullopt);

/// Per-pixel sliding maximum with border-clipped square windows; exposed
/// for verification.
std::vector<float> max_filter(const RasterGrid& dsm_tile, int window);

/// One JSON line: {"tile_id":..., "source":..., "params":..., "points":[[x,y,elev?],...]}.
std::string prompt_set_to_jsonl(const PromptSet& set);
PromptSet prompt_set_from_jsonl(const std::string& line);

}  // namespace crownforge
