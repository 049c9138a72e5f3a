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

#include "crownforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace crownforge {

namespace {

double ring_signed_area(std::span<const Point> ring) {
  double acc = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = ring[i];
    const Point& b = ring[(i + 1) % n];
    acc += a.x * b.y - b.x * a.y;
  }
  return 0.5 * acc;
}

std::size_t distinct_vertices(std::span<const Point> ring) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    bool dup = false;
    for (std::size_t j = 0; j < i; ++j) {
      if (ring[j].x == ring[i].x && ring[j].y == ring[i].y) {
        dup = true;
        break;
      }
    }
    if (!dup) ++n;
  }
  return n;
}

void require_ring(std::span<const Point> ring, const char* what) {
  if (distinct_vertices(ring) < 3) {
    throw GeometryError(std::string(what) +
                        ": ring has fewer than 3 distinct vertices");
  }
}

// Clip one ring against a single half-plane of the rectangle.
// side: 0 = x >= x0, 1 = x <= x1, 2 = y >= y0, 3 = y <= y1.
std::vector<Point> clip_ring_halfplane(const std::vector<Point>& ring,
                                       const Rect& r, int side) {
  auto inside = [&](const Point& p) {
    switch (side) {
      case 0: return p.x >= r.x0;
      case 1: return p.x <= r.x1;
      case 2: return p.y >= r.y0;
      default: return p.y <= r.y1;
    }
  };
  auto intersect = [&](const Point& a, const Point& b) {
    double t;
    switch (side) {
      case 0: t = (r.x0 - a.x) / (b.x - a.x); break;
      case 1: t = (r.x1 - a.x) / (b.x - a.x); break;
      case 2: t = (r.y0 - a.y) / (b.y - a.y); break;
      default: t = (r.y1 - a.y) / (b.y - a.y); break;
    }
    Point p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    // Pin the clipped coordinate exactly onto the boundary.
    switch (side) {
      case 0: p.x = r.x0; break;
      case 1: p.x = r.x1; break;
      case 2: p.y = r.y0; break;
      default: p.y = r.y1; break;
    }
    return p;
  };

  std::vector<Point> out;
  out.reserve(ring.size() + 4);
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& cur = ring[i];
    const Point& prev = ring[(i + n - 1) % n];
    const bool cur_in = inside(cur);
    const bool prev_in = inside(prev);
    if (cur_in) {
      if (!prev_in) out.push_back(intersect(prev, cur));
      out.push_back(cur);
    } else if (prev_in) {
      out.push_back(intersect(prev, cur));
    }
  }
  return out;
}

std::vector<Point> clip_ring(const std::vector<Point>& ring, const Rect& r) {
  std::vector<Point> cur = ring;
  for (int side = 0; side < 4 && !cur.empty(); ++side) {
    cur = clip_ring_halfplane(cur, r, side);
  }
  // Drop consecutive duplicates produced by clipping along an edge.
  std::vector<Point> dedup;
  dedup.reserve(cur.size());
  for (const Point& p : cur) {
    if (dedup.empty() || dedup.back().x != p.x || dedup.back().y != p.y) {
      dedup.push_back(p);
    }
  }
  while (dedup.size() > 1 && dedup.front().x == dedup.back().x &&
         dedup.front().y == dedup.back().y) {
    dedup.pop_back();
  }
  if (dedup.size() < 3 || std::abs(ring_signed_area(dedup)) == 0.0) {
    return {};
  }
  return dedup;
}

}  // namespace

double polygon_area(const Polygon& p) {
  if (p.empty()) return 0.0;
  require_ring(p.exterior, "polygon_area");
  double area = std::abs(ring_signed_area(p.exterior));
  for (const auto& hole : p.holes) {
    require_ring(hole, "polygon_area (hole)");
    area -= std::abs(ring_signed_area(hole));
  }
  return area;
}

Polygon clip_polygon_to_rect(const Polygon& p, const Rect& rect) {
  if (rect.width() <= 0.0 || rect.height() <= 0.0) {
    throw GeometryError("clip_polygon_to_rect: rectangle has no area");
  }
  if (p.empty()) return {};
  require_ring(p.exterior, "clip_polygon_to_rect");

  Polygon out;
  out.exterior = clip_ring(p.exterior, rect);
  if (out.exterior.empty()) return {};
  for (const auto& hole : p.holes) {
    auto clipped = clip_ring(hole, rect);
    if (!clipped.empty()) out.holes.push_back(std::move(clipped));
  }
  return out;
}

std::size_t BinaryMask::count() const {
  return std::size_t(
      std::count(pixels.begin(), pixels.end(), std::uint8_t(1)));
}

BinaryMask rasterize_polygon(const Polygon& p, int width, int height) {
  if (width <= 0 || height <= 0) {
    throw GeometryError("rasterize_polygon: zero-size window");
  }
  BinaryMask mask(width, height);
  if (p.empty()) return mask;

  std::vector<std::span<const Point>> rings;
  rings.emplace_back(p.exterior);
  for (const auto& h : p.holes) rings.emplace_back(h);

  std::vector<double> xs;
  for (int y = 0; y < height; ++y) {
    const double cy = y + 0.5;
    xs.clear();
    for (const auto ring : rings) {
      const std::size_t n = ring.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Point& a = ring[i];
        const Point& b = ring[(i + 1) % n];
        // Half-open edge rule in y keeps shared vertices counted once.
        if ((a.y <= cy && b.y > cy) || (b.y <= cy && a.y > cy)) {
          xs.push_back(a.x + (cy - a.y) * (b.x - a.x) / (b.y - a.y));
        }
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      // Even-odd fill of [xa, xb): pixel centers cx with xa <= cx < xb.
      int x_lo = int(std::ceil(xs[i] - 0.5));
      int x_hi = int(std::ceil(xs[i + 1] - 0.5)) - 1;
      x_lo = std::max(x_lo, 0);
      x_hi = std::min(x_hi, width - 1);
      for (int x = x_lo; x <= x_hi; ++x) mask.set(x, y, true);
    }
  }
  return mask;
}

RunLengthCounts rle_encode(const BinaryMask& m) {
  RunLengthCounts rle;
  rle.width = m.width;
  rle.height = m.height;
  std::uint8_t expected = 0;  // counts start with a zeros-run
  std::uint64_t run = 0;
  for (int x = 0; x < m.width; ++x) {
    for (int y = 0; y < m.height; ++y) {
      const std::uint8_t v = m.pixels[size_t(y) * m.width + x];
      if (v == expected) {
        ++run;
      } else {
        rle.counts.push_back(run);
        expected = v;
        run = 1;
      }
    }
  }
  rle.counts.push_back(run);
  if (rle.counts.empty()) rle.counts.push_back(0);
  return rle;
}

BinaryMask rle_decode(const RunLengthCounts& rle) {
  if (rle.width <= 0 || rle.height <= 0) {
    throw FormatError("rle_decode: non-positive dimensions");
  }
  const std::uint64_t total =
      std::accumulate(rle.counts.begin(), rle.counts.end(), std::uint64_t(0));
  if (total != std::uint64_t(rle.width) * std::uint64_t(rle.height)) {
    throw FormatError("rle_decode: counts sum to " + std::to_string(total) +
                      ", expected " +
                      std::to_string(std::uint64_t(rle.width) * rle.height));
  }
  BinaryMask m(rle.width, rle.height);
  std::uint64_t pos = 0;
  std::uint8_t value = 0;
  for (const std::uint64_t run : rle.counts) {
    if (value) {
      for (std::uint64_t k = 0; k < run; ++k) {
        const std::uint64_t idx = pos + k;
        const int x = int(idx / rle.height);
        const int y = int(idx % rle.height);
        m.set(x, y, true);
      }
    }
    pos += run;
    value ^= 1;
  }
  return m;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw GeometryError("mask_iou: dimension mismatch");
  }
  std::uint64_t inter = 0;
  std::uint64_t uni = 0;
  const std::size_t n = a.pixels.size();
  for (std::size_t i = 0; i < n; ++i) {
    inter += a.pixels[i] & b.pixels[i];
    uni += a.pixels[i] | b.pixels[i];
  }
  if (uni == 0) {
    throw GeometryError("mask_iou: both masks empty, IoU undefined");
  }
  return double(inter) / double(uni);
}

double box_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw GeometryError("box_iou: dimension mismatch");
  }
  struct Box {
    int x0, y0, x1, y1;  // inclusive
    bool empty;
  };
  auto bounds = [](const BinaryMask& m) {
    Box box{m.width, m.height, -1, -1, true};
    for (int y = 0; y < m.height; ++y) {
      for (int x = 0; x < m.width; ++x) {
        if (m.at(x, y)) {
          box.x0 = std::min(box.x0, x);
          box.y0 = std::min(box.y0, y);
          box.x1 = std::max(box.x1, x);
          box.y1 = std::max(box.y1, y);
          box.empty = false;
        }
      }
    }
    return box;
  };
  const Box ba = bounds(a);
  const Box bb = bounds(b);
  if (ba.empty && bb.empty) {
    throw GeometryError("box_iou: both masks empty, IoU undefined");
  }
  if (ba.empty || bb.empty) return 0.0;
  const std::int64_t ix0 = std::max(ba.x0, bb.x0);
  const std::int64_t iy0 = std::max(ba.y0, bb.y0);
  const std::int64_t ix1 = std::min(ba.x1, bb.x1);
  const std::int64_t iy1 = std::min(ba.y1, bb.y1);
  const std::int64_t iw = std::max<std::int64_t>(0, ix1 - ix0 + 1);
  const std::int64_t ih = std::max<std::int64_t>(0, iy1 - iy0 + 1);
  const std::int64_t inter = iw * ih;
  const std::int64_t area_a =
      std::int64_t(ba.x1 - ba.x0 + 1) * (ba.y1 - ba.y0 + 1);
  const std::int64_t area_b =
      std::int64_t(bb.x1 - bb.x0 + 1) * (bb.y1 - bb.y0 + 1);
  return double(inter) / double(area_a + area_b - inter);
}

bool point_in_polygon(const Point& pt, const Polygon& p) {
  if (p.empty()) return false;
  auto crossings = [&pt](std::span<const Point> ring) {
    int n_cross = 0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = ring[i];
      const Point& b = ring[(i + 1) % n];
      if ((a.y <= pt.y && b.y > pt.y) || (b.y <= pt.y && a.y > pt.y)) {
        const double x = a.x + (pt.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (x > pt.x) ++n_cross;
      }
    }
    return n_cross;
  };
  int total = crossings(p.exterior);
  for (const auto& h : p.holes) total += crossings(h);
  return (total % 2) == 1;
}

std::vector<ScoredInstance> nms(const std::vector<ScoredInstance>& instances,
                                const NmsOptions& opts) {
  std::vector<std::size_t> order;
  order.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].score >= opts.score_threshold) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return instances[a].score > instances[b].score;
  });

  std::vector<std::size_t> kept;
  for (const std::size_t i : order) {
    bool suppressed = false;
    for (const std::size_t k : kept) {
      if (opts.class_aware &&
          instances[k].class_id != instances[i].class_id) {
        continue;
      }
      const double iou = opts.box_iou
                             ? box_iou(instances[k].mask, instances[i].mask)
                             : mask_iou(instances[k].mask, instances[i].mask);
      if (iou > opts.iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(i);
  }

  std::vector<ScoredInstance> out;
  out.reserve(kept.size());
  for (const std::size_t i : kept) out.push_back(instances[i]);
  return out;
}

}  // namespace crownforge
