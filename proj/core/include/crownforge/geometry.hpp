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
#include <span>
#include <vector>

#include "crownforge/errors.hpp"

namespace crownforge {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned rectangle, [x0, x1) x [y0, y1).
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

/// Simple polygon with optional holes. Rings are implicitly closed: the
/// first vertex is NOT repeated at the end. An empty exterior means the
/// empty polygon.
struct Polygon {
  std::vector<Point> exterior;
  std::vector<std::vector<Point>> holes;

  bool empty() const { return exterior.empty(); }
};

/// Shoelace area of the exterior minus hole areas. Always non-negative
/// regardless of ring orientation. Throws GeometryError on rings with
/// fewer than 3 distinct vertices.
double polygon_area(const Polygon& p);

/// Sutherland-Hodgman clip of every ring against the rectangle. Returns
/// the empty polygon when there is no overlap. Throws GeometryError on a
/// non-positive rectangle.
Polygon clip_polygon_to_rect(const Polygon& p, const Rect& rect);

/// Dense binary mask, row-major, one byte per pixel (0 or 1).
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  BinaryMask() = default;
  BinaryMask(int w, int h) : width(w), height(h), pixels(size_t(w) * h, 0) {}

  bool at(int x, int y) const { return pixels[size_t(y) * width + x] != 0; }
  void set(int x, int y, bool v) { pixels[size_t(y) * width + x] = v ? 1 : 0; }

  std::size_t count() const;
  bool operator==(const BinaryMask&) const = default;
};

/// Column-major run-length counts, alternating zero-runs and one-runs,
/// starting with a zero-run (possibly of length 0).
struct RunLengthCounts {
  int width = 0;
  int height = 0;
  std::vector<std::uint64_t> counts;
};

/// Rasterize with the pixel-center containment rule: pixel (x, y) is set
/// iff its center (x + 0.5, y + 0.5) is inside the polygon under even-odd
/// counting over all rings. Throws GeometryError on a zero-size window.
BinaryMask rasterize_polygon(const Polygon& p, int width, int height);

RunLengthCounts rle_encode(const BinaryMask& m);
/// Throws FormatError when the counts do not sum to width*height.
BinaryMask rle_decode(const RunLengthCounts& rle);

/// |a & b| / |a | b|. Throws GeometryError on dimension mismatch or when
/// both masks are empty (the IoU of two empty instances is undefined).
double mask_iou(const BinaryMask& a, const BinaryMask& b);

struct ScoredInstance {
  BinaryMask mask;
  int class_id = 0;
  double score = 0.0;
};

struct NmsOptions {
  double score_threshold = 0.5;
  double iou_threshold = 0.5;
  /// Suppress only within the same class.
  bool class_aware = false;
  /// Use bounding-box IoU instead of mask IoU.
  bool box_iou = false;
};

/// Greedy NMS: drop instances below score_threshold, then walk the rest in
/// descending score order (ties keep input order) and keep an instance iff
/// its IoU with every already-kept instance is <= iou_threshold. Output is
/// sorted by descending score.
std::vector<ScoredInstance> nms(const std::vector<ScoredInstance>& instances,
                                const NmsOptions& opts = {});

/// IoU of the tight bounding boxes of the set pixels.
double box_iou(const BinaryMask& a, const BinaryMask& b);

/// Even-odd containment test over all rings (holes flip the parity).
bool point_in_polygon(const Point& pt, const Polygon& p);

}  // namespace crownforge
