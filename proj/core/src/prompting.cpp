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

#include "crownforge/prompting.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include <json.hpp>

namespace crownforge {

using nlohmann::json;

PromptSet grid_prompts(int tile_size, int pps) {
  if (pps < 1) throw ValidationError("grid_prompts: pps must be >= 1");
  if (tile_size < 1) throw ValidationError("grid_prompts: tile_size must be >= 1");
  PromptSet set;
  set.params = "pps=" + std::to_string(pps);
  set.prompts.reserve(std::size_t(pps) * pps);
  const double cell = double(tile_size) / pps;
  for (int j = 0; j < pps; ++j) {
    for (int i = 0; i < pps; ++i) {
      set.prompts.push_back(
          {(i + 0.5) * cell, (j + 0.5) * cell, PointPrompt::Source::grid, {}});
    }
  }
  return set;
}

namespace {

constexpr float kNegInf = -std::numeric_limits<float>::infinity();

// Monotonic-deque sliding maximum over a strided 1D sequence. The window
// around index i covers [i - left, i + right], clipped to the sequence.
void sliding_max_1d(const float* in, float* out, int n, std::ptrdiff_t stride,
                    int left, int right) {
  std::deque<int> deq;
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int hi = std::min(n - 1, i + right);
    for (; next <= hi; ++next) {
      const float v = in[next * stride];
      while (!deq.empty() && in[deq.back() * stride] <= v) deq.pop_back();
      deq.push_back(next);
    }
    while (deq.front() < i - left) deq.pop_front();
    out[i * stride] = in[deq.front() * stride];
  }
}

}  // namespace

std::vector<float> max_filter(const RasterGrid& dsm_tile, int window) {
  if (dsm_tile.bands != 1 || dsm_tile.dtype != Dtype::float32) {
    throw ValidationError("max_filter: expects a single-band float DSM");
  }
  if (window < 1) throw ValidationError("max_filter: window must be >= 1");
  const int w = dsm_tile.width;
  const int h = dsm_tile.height;
  const int left = window / 2;
  const int right = window - left - 1;

  std::vector<float> values(dsm_tile.f32.begin(), dsm_tile.f32.end());
  for (float& v : values) {
    if (dsm_tile.is_nodata(v)) v = kNegInf;
  }
  std::vector<float> tmp(values.size());
  // Separable: rows first, then columns of the row result.
  for (int y = 0; y < h; ++y) {
    sliding_max_1d(values.data() + std::size_t(y) * w,
                   tmp.data() + std::size_t(y) * w, w, 1, left, right);
  }
  std::vector<float> out(values.size());
  for (int x = 0; x < w; ++x) {
    sliding_max_1d(tmp.data() + x, out.data() + x, h, w, left, right);
  }
  return out;
}

PromptSet dsm_local_maxima(const RasterGrid& dsm_tile, int window,
                           std::optional<double> min_height) {
  const std::vector<float> filtered = max_filter(dsm_tile, window);
  const int w = dsm_tile.width;
  const int h = dsm_tile.height;

  std::vector<std::uint8_t> candidate(dsm_tile.pixel_count(), 0);
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    const float v = dsm_tile.f32[i];
    if (dsm_tile.is_nodata(v)) continue;
    if (min_height && double(v) < *min_height) continue;
    if (v == filtered[i]) candidate[i] = 1;
  }

  PromptSet set;
  set.params = "window=" + std::to_string(window);

  std::vector<std::uint8_t> visited(candidate.size(), 0);
  std::vector<std::size_t> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t start = std::size_t(y) * w + x;
      if (!candidate[start] || visited[start]) continue;

      // Flood one 8-connected plateau component.
      double sum_x = 0.0, sum_y = 0.0;
      std::size_t n = 0;
      float peak = kNegInf;
      stack.assign(1, start);
      visited[start] = 1;
      while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        const int cx = int(cur % w);
        const int cy = int(cur / w);
        sum_x += cx;
        sum_y += cy;
        ++n;
        peak = std::max(peak, dsm_tile.f32[cur]);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t ni = std::size_t(ny) * w + nx;
            if (candidate[ni] && !visited[ni]) {
              visited[ni] = 1;
              stack.push_back(ni);
            }
          }
        }
      }
      PointPrompt prompt;
      prompt.x = double(std::llround(sum_x / double(n)));
      prompt.y = double(std::llround(sum_y / double(n)));
      prompt.source = PointPrompt::Source::dsm_maxima;
      prompt.elevation = double(peak);
      set.prompts.push_back(prompt);
    }
  }
  return set;
}

std::string prompt_set_to_jsonl(const PromptSet& set) {
  json j;
  j["tile_id"] = set.tile_id;
  const bool is_grid =
      set.prompts.empty() || set.prompts[0].source == PointPrompt::Source::grid;
  j["source"] = is_grid ? "grid" : "dsm_maxima";
  j["params"] = set.params;
  json points = json::array();
  for (const PointPrompt& p : set.prompts) {
    json pt = json::array({p.x, p.y});
    if (p.elevation) pt.push_back(*p.elevation);
    points.push_back(std::move(pt));
  }
  j["points"] = std::move(points);
  return j.dump();
}

PromptSet prompt_set_from_jsonl(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed prompt line: ") + e.what());
  }
  PromptSet set;
  set.tile_id = j.value("tile_id", "");
  set.params = j.value("params", "");
  const auto source = j.value("source", "grid") == "grid"
                          ? PointPrompt::Source::grid
                          : PointPrompt::Source::dsm_maxima;
  try {
    for (const auto& pt : j.at("points")) {
      PointPrompt p;
      p.x = pt.at(0).get<double>();
      p.y = pt.at(1).get<double>();
      p.source = source;
      if (pt.size() > 2) p.elevation = pt.at(2).get<double>();
      set.prompts.push_back(p);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed prompt line: ") + e.what());
  }
  return set;
}

}  // namespace crownforge
