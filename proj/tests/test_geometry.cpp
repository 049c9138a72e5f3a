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

#include <cmath>
#include <random>

#include "crownforge/geometry.hpp"

using namespace crownforge;

namespace {

Polygon square(double x0, double y0, double side) {
  return Polygon{{{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side},
                  {x0, y0 + side}},
                 {}};
}

// Independent shoelace, written against the closed-ring formulation.
double shoelace_oracle(const std::vector<Point>& ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point& a = ring[i];
    const Point& b = ring[(i + 1) % ring.size()];
    twice += (a.x + b.x) * (b.y - a.y);
  }
  return std::abs(twice) / 2.0;
}

BinaryMask random_mask(std::mt19937& rng, int max_dim = 32) {
  std::uniform_int_distribution<int> dim(1, max_dim);
  const int w = dim(rng), h = dim(rng);
  BinaryMask m(w, h);
  std::bernoulli_distribution bit(0.4);
  for (auto& p : m.pixels) p = bit(rng) ? 1 : 0;
  return m;
}

}  // namespace

TEST_CASE("polygon_area basics") {
  CHECK(polygon_area(square(0, 0, 1)) == doctest::Approx(1.0));
  CHECK(polygon_area(Polygon{{{0, 0}, {2, 0}, {0, 2}}, {}}) ==
        doctest::Approx(2.0));

  Polygon with_hole = square(0, 0, 4);
  with_hole.holes.push_back({{1, 1}, {2, 1}, {2, 2}, {1, 2}});
  CHECK(polygon_area(with_hole) == doctest::Approx(15.0));

  CHECK(polygon_area(Polygon{}) == 0.0);
  CHECK_THROWS_AS(polygon_area(Polygon{{{0, 0}, {1, 1}}, {}}), GeometryError);
  CHECK_THROWS_AS(polygon_area(Polygon{{{0, 0}, {1, 1}, {0, 0}, {1, 1}}, {}}),
                  GeometryError);
}

TEST_CASE("polygon_area matches shoelace oracle on random 10-gons") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> radius(1.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    // Star-shaped 10-gon: strictly increasing angles keep it simple.
    std::vector<Point> ring;
    for (int k = 0; k < 10; ++k) {
      const double theta = 2.0 * M_PI * k / 10.0;
      const double r = radius(rng);
      ring.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
    CHECK(polygon_area(Polygon{ring, {}}) ==
          doctest::Approx(shoelace_oracle(ring)).epsilon(1e-9));
  }
}

TEST_CASE("clip_polygon_to_rect") {
  const Rect rect{0, 0, 10, 10};

  SUBCASE("fully inside keeps area") {
    const Polygon p = square(2, 2, 3);
    CHECK(polygon_area(clip_polygon_to_rect(p, rect)) ==
          doctest::Approx(polygon_area(p)));
  }
  SUBCASE("fully outside is empty") {
    CHECK(clip_polygon_to_rect(square(20, 20, 3), rect).empty());
  }
  SUBCASE("half-covered square") {
    // 2x2 square centered on the rect's right edge.
    const Polygon p = square(9, 4, 2);
    CHECK(polygon_area(clip_polygon_to_rect(p, rect)) == doctest::Approx(2.0));
  }
  SUBCASE("invalid rect") {
    CHECK_THROWS_AS(clip_polygon_to_rect(square(0, 0, 1), Rect{5, 5, 5, 9}),
                    GeometryError);
  }
  SUBCASE("area monotonicity on random triangles") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> coord(-5.0, 15.0);
    for (int trial = 0; trial < 200; ++trial) {
      const Polygon p{{{coord(rng), coord(rng)},
                       {coord(rng), coord(rng)},
                       {coord(rng), coord(rng)}},
                      {}};
      double full;
      try {
        full = polygon_area(p);
      } catch (const GeometryError&) {
        continue;
      }
      const Polygon clipped = clip_polygon_to_rect(p, rect);
      const double part = clipped.empty() ? 0.0 : polygon_area(clipped);
      CHECK(part <= full + 1e-9);
    }
  }
}

TEST_CASE("rasterize_polygon") {
  SUBCASE("axis-aligned 2x2 square sets 4 pixels") {
    const BinaryMask m = rasterize_polygon(square(0, 0, 2), 4, 4);
    CHECK(m.count() == 4);
    CHECK(m.at(0, 0));
    CHECK(m.at(1, 1));
    CHECK_FALSE(m.at(2, 0));
  }
  SUBCASE("empty polygon gives empty mask") {
    CHECK(rasterize_polygon(Polygon{}, 8, 8).count() == 0);
  }
  SUBCASE("zero-size window throws") {
    CHECK_THROWS_AS(rasterize_polygon(square(0, 0, 1), 0, 4), GeometryError);
  }
  SUBCASE("disc pixel count tracks area, per-pixel oracle agrees") {
    const double cx = 32.0, cy = 32.0, r = 20.0;
    std::vector<Point> ring;
    for (int k = 0; k < 256; ++k) {
      const double theta = 2.0 * M_PI * k / 256.0;
      ring.push_back({cx + r * std::cos(theta), cy + r * std::sin(theta)});
    }
    const BinaryMask m = rasterize_polygon(Polygon{ring, {}}, 64, 64);
    CHECK(double(m.count()) ==
          doctest::Approx(M_PI * r * r).epsilon(0.02));
    // center-in-circle oracle (the 256-gon is indistinguishable at 1px)
    std::size_t mismatches = 0;
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
        const bool in_circle = dx * dx + dy * dy < r * r;
        if (in_circle != m.at(x, y)) ++mismatches;
      }
    }
    CHECK(mismatches <= 8);
  }
  SUBCASE("hole is carved out") {
    Polygon p = square(0, 0, 8);
    p.holes.push_back({{2, 2}, {6, 2}, {6, 6}, {2, 6}});
    const BinaryMask m = rasterize_polygon(p, 8, 8);
    CHECK(m.count() == 64 - 16);
    CHECK_FALSE(m.at(4, 4));
    CHECK(m.at(0, 0));
  }
  SUBCASE("set-pixel count converges with resolution") {
    auto disc_error = [](int scale) {
      const double r = 10.0 * scale;
      std::vector<Point> ring;
      for (int k = 0; k < 512; ++k) {
        const double theta = 2.0 * M_PI * k / 512.0;
        ring.push_back({2 * r + r * std::cos(theta),
                        2 * r + r * std::sin(theta)});
      }
      const BinaryMask m =
          rasterize_polygon(Polygon{ring, {}}, 4 * int(r), 4 * int(r));
      return std::abs(double(m.count()) - M_PI * r * r) / (M_PI * r * r);
    };
    CHECK(disc_error(4) < disc_error(1));
  }
}

TEST_CASE("rle canonical encodings") {
  SUBCASE("all-zero 3x3 is [9]") {
    const RunLengthCounts rle = rle_encode(BinaryMask(3, 3));
    CHECK(rle.counts == std::vector<std::uint64_t>{9});
  }
  SUBCASE("single pixel (0,0) is [0, 1, HW-1]") {
    BinaryMask m(5, 4);
    m.set(0, 0, true);
    const RunLengthCounts rle = rle_encode(m);
    CHECK(rle.counts == std::vector<std::uint64_t>{0, 1, 19});
  }
  SUBCASE("column-major order") {
    // pixel (x=1, y=0) in 2x2: column-major index 2
    BinaryMask m(2, 2);
    m.set(1, 0, true);
    CHECK(rle_encode(m).counts == std::vector<std::uint64_t>{2, 1, 1});
  }
}

TEST_CASE("rle round trip and decode errors") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryMask m = random_mask(rng);
    CHECK(rle_decode(rle_encode(m)) == m);
  }
  RunLengthCounts bad;
  bad.width = 3;
  bad.height = 3;
  bad.counts = {4, 4};  // sums to 8, not 9
  CHECK_THROWS_AS(rle_decode(bad), FormatError);
}

TEST_CASE("mask_iou") {
  BinaryMask a(4, 1), b(4, 1);
  a.set(0, 0, true);
  a.set(1, 0, true);
  b.set(1, 0, true);
  b.set(2, 0, true);
  CHECK(mask_iou(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(mask_iou(a, a) == 1.0);

  BinaryMask c(4, 1);
  c.set(3, 0, true);
  CHECK(mask_iou(a, c) == 0.0);

  CHECK_THROWS_AS(mask_iou(a, BinaryMask(5, 1)), GeometryError);
  CHECK_THROWS_AS(mask_iou(BinaryMask(4, 1), BinaryMask(4, 1)),
                  GeometryError);

  SUBCASE("symmetry and range on random masks") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
      BinaryMask x = random_mask(rng, 16);
      BinaryMask y(x.width, x.height);
      std::bernoulli_distribution bit(0.4);
      for (auto& p : y.pixels) p = bit(rng) ? 1 : 0;
      if (x.count() == 0 && y.count() == 0) continue;
      const double iou = mask_iou(x, y);
      CHECK(iou == mask_iou(y, x));
      CHECK(iou >= 0.0);
      CHECK(iou <= 1.0);
      CHECK((iou == 1.0) == (x == y));
    }
  }
}

namespace {

// O(n^2) reference suppressor, kept deliberately naive.
std::vector<ScoredInstance> nms_reference(
    const std::vector<ScoredInstance>& input, double score_thr,
    double iou_thr) {
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input[i].score >= score_thr) order.push_back({-input[i].score, i});
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<ScoredInstance> kept;
  for (const auto& [neg, i] : order) {
    bool ok = true;
    for (const ScoredInstance& k : kept) {
      if (mask_iou(k.mask, input[i].mask) > iou_thr) ok = false;
    }
    if (ok) kept.push_back(input[i]);
  }
  return kept;
}

std::vector<ScoredInstance> random_instances(std::mt19937& rng, int n,
                                             int dim = 16) {
  std::uniform_int_distribution<int> pos(0, dim - 4);
  std::uniform_int_distribution<int> len(2, 4);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::vector<ScoredInstance> out;
  for (int i = 0; i < n; ++i) {
    BinaryMask m(dim, dim);
    const int x0 = pos(rng), y0 = pos(rng);
    const int w = len(rng), h = len(rng);
    for (int y = y0; y < std::min(dim, y0 + h); ++y) {
      for (int x = x0; x < std::min(dim, x0 + w); ++x) m.set(x, y, true);
    }
    out.push_back({std::move(m), 0, score(rng)});
  }
  return out;
}

bool same_instances(const std::vector<ScoredInstance>& a,
                    const std::vector<ScoredInstance>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].score != b[i].score || !(a[i].mask == b[i].mask)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("nms basics") {
  std::vector<ScoredInstance> instances;

  BinaryMask m(4, 4);
  m.set(1, 1, true);
  m.set(2, 1, true);

  SUBCASE("single instance above threshold is kept") {
    instances.push_back({m, 0, 0.9});
    CHECK(nms(instances).size() == 1);
  }
  SUBCASE("duplicate masks collapse to the top score") {
    instances.push_back({m, 0, 0.9});
    instances.push_back({m, 0, 0.8});
    const auto kept = nms(instances);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].score == 0.9);
  }
  SUBCASE("below score threshold is dropped") {
    instances.push_back({m, 0, 0.3});
    CHECK(nms(instances).empty());
  }
}

TEST_CASE("nms equals brute-force reference and is idempotent") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const auto instances = random_instances(rng, 20);
    const auto mine = nms(instances);
    const auto ref = nms_reference(instances, 0.5, 0.5);
    CHECK(same_instances(mine, ref));
    CHECK(same_instances(nms(mine), mine));
    // no kept pair overlaps beyond the threshold
    for (std::size_t i = 0; i < mine.size(); ++i) {
      for (std::size_t j = i + 1; j < mine.size(); ++j) {
        CHECK(mask_iou(mine[i].mask, mine[j].mask) <= 0.5);
      }
    }
    for (const auto& inst : mine) CHECK(inst.score >= 0.5);
  }
}

TEST_CASE("class-aware nms keeps cross-class duplicates") {
  BinaryMask m(4, 4);
  m.set(0, 0, true);
  std::vector<ScoredInstance> instances{{m, 0, 0.9}, {m, 1, 0.8}};
  CHECK(nms(instances).size() == 1);
  NmsOptions opts;
  opts.class_aware = true;
  CHECK(nms(instances, opts).size() == 2);
}

TEST_CASE("box_iou on rectangles") {
  BinaryMask a(8, 8), b(8, 8);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) a.set(x, y, true);
  for (int y = 2; y < 6; ++y)
    for (int x = 2; x < 6; ++x) b.set(x, y, true);
  CHECK(box_iou(a, b) == doctest::Approx(4.0 / 28.0));
}

TEST_CASE("point_in_polygon") {
  const Polygon p = square(0, 0, 4);
  CHECK(point_in_polygon({2, 2}, p));
  CHECK_FALSE(point_in_polygon({5, 2}, p));
  Polygon holed = square(0, 0, 4);
  holed.holes.push_back({{1, 1}, {3, 1}, {3, 3}, {1, 3}});
  CHECK_FALSE(point_in_polygon({2, 2}, holed));
  CHECK(point_in_polygon({0.5, 0.5}, holed));
}
