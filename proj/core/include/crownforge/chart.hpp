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
#include <string>
#include <vector>

#include "crownforge/errors.hpp"

namespace crownforge {

struct ChartSeries {
  std::string label;
  std::vector<double> values;  // one per class
  std::vector<double> errors;  // optional, empty or one per class
};

struct ChartSpec {
  std::vector<std::string> classes;
  std::vector<std::int64_t> counts;  // per-class prevalence, drives ordering
  std::vector<ChartSeries> series;
  /// Scale the y axis to [0, 100] instead of [0, 1].
  bool percent = false;
};

/// Grouped per-class bar chart as an SVG string. Classes are ordered left
/// to right by descending count (stable on ties); identical specs render
/// byte-identical output. Throws ValidationError on inconsistent lengths
/// or an empty series list.
std::string render_chart(const ChartSpec& spec);

void write_chart(const ChartSpec& spec, const std::filesystem::path& path);

}  // namespace crownforge
