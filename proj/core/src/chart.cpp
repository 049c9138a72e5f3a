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

#include "crownforge/chart.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace crownforge {

namespace {

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                          "#76b7b2", "#edc948", "#b07aa1", "#9c755f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_chart(const ChartSpec& spec) {
  if (spec.series.empty()) {
    throw ValidationError("render_chart: no series");
  }
  const std::size_t n_classes = spec.classes.size();
  if (spec.counts.size() != n_classes) {
    throw ValidationError("render_chart: counts/classes length mismatch");
  }
  for (const ChartSeries& s : spec.series) {
    if (s.values.size() != n_classes ||
        (!s.errors.empty() && s.errors.size() != n_classes)) {
      throw ValidationError("render_chart: series '" + s.label +
                            "' length mismatch");
    }
  }

  // Classes left to right by descending prevalence.
  std::vector<std::size_t> order(n_classes);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spec.counts[a] > spec.counts[b];
  });

  const double y_max = spec.percent ? 100.0 : 1.0;
  const double margin_left = 50.0, margin_right = 20.0;
  const double margin_top = 20.0 + 18.0 * double(spec.series.size());
  const double margin_bottom = 40.0;
  const double bar_w = 18.0, bar_gap = 4.0;
  const double group_w =
      double(spec.series.size()) * (bar_w + bar_gap) + 16.0;
  const double plot_h = 240.0;
  const double width = margin_left + double(n_classes) * group_w + margin_right;
  const double height = margin_top + plot_h + margin_bottom;

  auto y_of = [&](double v) {
    return margin_top + plot_h * (1.0 - std::clamp(v, 0.0, y_max) / y_max);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width)
      << " " << fmt(height) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // y axis with 5 gridlines
  for (int i = 0; i <= 5; ++i) {
    const double v = y_max * i / 5.0;
    const double y = y_of(v);
    svg << "<line x1=\"" << fmt(margin_left) << "\" y1=\"" << fmt(y)
        << "\" x2=\"" << fmt(width - margin_right) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << fmt(margin_left - 6.0) << "\" y=\"" << fmt(y + 4.0)
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
        << fmt(v) << "</text>\n";
  }

  // legend
  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const double ly = 14.0 + 18.0 * double(s);
    svg << "<rect x=\"" << fmt(margin_left) << "\" y=\"" << fmt(ly - 9.0)
        << "\" width=\"12\" height=\"12\" fill=\""
        << kPalette[s % std::size(kPalette)] << "\"/>\n";
    svg << "<text x=\"" << fmt(margin_left + 16.0) << "\" y=\"" << fmt(ly + 2.0)
        << "\" font-size=\"12\" font-family=\"sans-serif\">"
        << xml_escape(spec.series[s].label) << "</text>\n";
  }

  for (std::size_t gi = 0; gi < order.size(); ++gi) {
    const std::size_t c = order[gi];
    const double gx = margin_left + double(gi) * group_w + 8.0;
    for (std::size_t s = 0; s < spec.series.size(); ++s) {
      const double v = spec.series[s].values[c];
      const double x = gx + double(s) * (bar_w + bar_gap);
      const double y = y_of(v);
      svg << "<rect class=\"bar\" x=\"" << fmt(x) << "\" y=\"" << fmt(y)
          << "\" width=\"" << fmt(bar_w) << "\" height=\""
          << fmt(margin_top + plot_h - y) << "\" fill=\""
          << kPalette[s % std::size(kPalette)] << "\"/>\n";
      if (!spec.series[s].errors.empty()) {
        const double err = spec.series[s].errors[c];
        const double cx = x + bar_w / 2.0;
        svg << "<line class=\"errorbar\" x1=\"" << fmt(cx) << "\" y1=\""
            << fmt(y_of(v - err)) << "\" x2=\"" << fmt(cx) << "\" y2=\""
            << fmt(y_of(v + err)) << "\" stroke=\"#333333\"/>\n";
      }
    }
    svg << "<text x=\"" << fmt(gx + group_w / 2.0 - 8.0) << "\" y=\""
        << fmt(margin_top + plot_h + 16.0)
        << "\" text-anchor=\"middle\" font-size=\"11\" "
           "font-family=\"sans-serif\">"
        << xml_escape(spec.classes[c]) << "</text>\n";
  }

  // x axis baseline
  svg << "<line x1=\"" << fmt(margin_left) << "\" y1=\""
      << fmt(margin_top + plot_h) << "\" x2=\"" << fmt(width - margin_right)
      << "\" y2=\"" << fmt(margin_top + plot_h) << "\" stroke=\"#333333\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_chart(const ChartSpec& spec, const std::filesystem::path& path) {
  const std::string svg = render_chart(spec);
  std::ofstream out(path, std::ios::binary);
  out << svg;
  if (!out) throw FormatError("cannot write " + path.string());
}

}  // namespace crownforge
