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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "crownforge/chart.hpp"
#include "crownforge/config.hpp"

using namespace crownforge;
namespace fs = std::filesystem;

TEST_CASE("render_chart") {
  ChartSpec spec;
  spec.classes = {"pigl", "thoc", "other", "piba", "pima", "ulam", "pist",
                  "acsa", "beal"};
  spec.counts = {6519, 1946, 1601, 1471, 1056, 1050, 544, 56, 19};
  spec.percent = true;
  spec.series.push_back({"baseline",
                         {73.23, 69.43, 47.33, 53.03, 29.17, 44.40, 76.83,
                          65.43, 16.00},
                         {}});
  spec.series.push_back({"contender",
                         {69.75, 60.08, 41.82, 45.88, 13.31, 30.90, 73.60,
                          41.23, 7.64},
                         {1.2, 0.8, 2.0, 1.5, 3.1, 2.2, 0.9, 4.0, 5.0}});

  SUBCASE("identical specs render byte-identical SVG") {
    const std::string a = render_chart(spec);
    const std::string b = render_chart(spec);
    CHECK(a == b);
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
  }
  SUBCASE("two series of nine classes draw eighteen bars") {
    const std::string svg = render_chart(spec);
    std::size_t bars = 0, pos = 0;
    while ((pos = svg.find("class=\"bar\"", pos)) != std::string::npos) {
      ++bars;
      ++pos;
    }
    CHECK(bars == 18);
    // both series named in the legend
    CHECK(svg.find("baseline") != std::string::npos);
    CHECK(svg.find("contender") != std::string::npos);
    // error bars drawn only for the series that has them
    std::size_t whiskers = 0;
    pos = 0;
    while ((pos = svg.find("class=\"errorbar\"", pos)) != std::string::npos) {
      ++whiskers;
      ++pos;
    }
    CHECK(whiskers == 9);
  }
  SUBCASE("classes are ordered by descending count") {
    ChartSpec shuffled = spec;
    // feed the classes in alphabetical order; output order must not change
    std::vector<std::size_t> perm{7, 8, 3, 0, 4, 6, 2, 1, 5};
    ChartSpec reordered;
    reordered.percent = spec.percent;
    for (const std::size_t i : perm) {
      reordered.classes.push_back(spec.classes[i]);
      reordered.counts.push_back(spec.counts[i]);
    }
    for (const ChartSeries& s : spec.series) {
      ChartSeries rs;
      rs.label = s.label;
      for (const std::size_t i : perm) {
        rs.values.push_back(s.values[i]);
        if (!s.errors.empty()) rs.errors.push_back(s.errors[i]);
      }
      reordered.series.push_back(std::move(rs));
    }
    const std::string svg = render_chart(reordered);
    std::size_t prev = 0;
    for (const char* name : {"pigl", "thoc", "piba", "pist", "acsa", "beal"}) {
      const std::size_t at = svg.find(std::string(">") + name + "<");
      REQUIRE(at != std::string::npos);
      CHECK(at > prev);
      prev = at;
    }
  }
  SUBCASE("length mismatches are rejected") {
    ChartSpec bad = spec;
    bad.series[0].values.pop_back();
    CHECK_THROWS_AS(render_chart(bad), ValidationError);
    ChartSpec empty;
    empty.classes = {"a"};
    empty.counts = {1};
    CHECK_THROWS_AS(render_chart(empty), ValidationError);
  }
  SUBCASE("write_chart produces a parseable file") {
    const fs::path dir = fs::temp_directory_path() / "crownforge_chart_test";
    fs::create_directories(dir);
    write_chart(spec, dir / "chart.svg");
    std::ifstream in(dir / "chart.svg");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    CHECK(text == render_chart(spec));
  }
}

TEST_CASE("run config") {
  SUBCASE("defaults") {
    const RunConfig c;
    CHECK(c.tile_size == 1024);
    CHECK(c.overlap == 0.5);
    CHECK(c.black_threshold == 0.8);
    CHECK(c.min_visible == 0.2);
    CHECK(c.pps == 100);
    CHECK(c.maxima_window == 100);
    CHECK(c.nms_score_threshold == 0.5);
    CHECK(c.nms_iou_threshold == 0.5);
    CHECK(c.ap_mode == "coco");
    CHECK(c.normalization == "tile");
    CHECK(c.max_detections == 300);
    CHECK_NOTHROW(c.validate());
  }
  SUBCASE("round trip through JSON") {
    RunConfig c;
    c.tile_size = 512;
    c.pps = 32;
    c.ap_mode = "ap50";
    const RunConfig back = config_from_json(c.to_json());
    CHECK(back.tile_size == 512);
    CHECK(back.pps == 32);
    CHECK(back.ap_mode == "ap50");
    CHECK(back.overlap == 0.5);
  }
  SUBCASE("unknown keys are rejected by name") {
    CHECK_THROWS_WITH_AS(config_from_json("{\"tile_sze\": 512}"),
                         doctest::Contains("tile_sze"), FormatError);
  }
  SUBCASE("partial configs keep defaults") {
    const RunConfig c = config_from_json("{\"overlap\": 0.25}");
    CHECK(c.overlap == 0.25);
    CHECK(c.tile_size == 1024);
  }
  SUBCASE("out-of-range values fail validation") {
    RunConfig c;
    c.overlap = 1.5;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = RunConfig{};
    c.tile_size = 0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = RunConfig{};
    c.ap_mode = "strict";
    CHECK_THROWS_AS(c.validate(), ValidationError);
  }
  SUBCASE("load_config reads a file") {
    const fs::path dir = fs::temp_directory_path() / "crownforge_cfg_test";
    fs::create_directories(dir);
    std::ofstream(dir / "cfg.json") << "{\"maxima_window\": 64}";
    CHECK(load_config(dir / "cfg.json").maxima_window == 64);
    CHECK_THROWS_AS(load_config(dir / "missing.json"), FormatError);
  }
}
