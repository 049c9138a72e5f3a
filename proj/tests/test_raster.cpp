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
#include <random>

#include "crownforge/raster.hpp"

using namespace crownforge;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "crownforge_raster_test";
  fs::create_directories(dir);
  return dir;
}

RasterGrid make_rgb(int w, int h, std::uint8_t fill = 100) {
  RasterGrid g;
  g.width = w;
  g.height = h;
  g.bands = 3;
  g.dtype = Dtype::uint8;
  g.crs = "EPSG:32618";
  g.geotransform = {500000.0, 0.01, 0.0, 5000000.0, 0.0, -0.01};
  g.u8.assign(g.value_count(), fill);
  return g;
}

RasterGrid make_dsm(int w, int h, float fill = 5.0f) {
  RasterGrid g;
  g.width = w;
  g.height = h;
  g.bands = 1;
  g.dtype = Dtype::float32;
  g.crs = "EPSG:32618";
  g.geotransform = {500000.0, 0.01, 0.0, 5000000.0, 0.0, -0.01};
  g.nodata = -9999.0;
  g.f32.assign(g.value_count(), fill);
  return g;
}

}  // namespace

TEST_CASE("raster round trip is byte identical") {
  const fs::path dir = temp_dir();

  SUBCASE("2x2 uint8 3-band") {
    RasterGrid g = make_rgb(2, 2);
    for (std::size_t i = 0; i < g.u8.size(); ++i) g.u8[i] = std::uint8_t(i * 7);
    write_raster(g, dir / "rgb");
    const RasterGrid back = read_raster(dir / "rgb");
    CHECK(back.u8 == g.u8);
    CHECK(back.width == 2);
    CHECK(back.bands == 3);
    CHECK(back.geotransform == g.geotransform);
    CHECK(back.crs == g.crs);
    CHECK_FALSE(back.nodata.has_value());
  }
  SUBCASE("512x512 float32 DSM, checksum equal") {
    RasterGrid g = make_dsm(512, 512);
    std::mt19937 rng(5);
    std::uniform_real_distribution<float> val(0.0f, 30.0f);
    for (auto& v : g.f32) v = val(rng);
    write_raster(g, dir / "dsm");
    const RasterGrid back = read_raster(dir / "dsm");
    CHECK(raster_checksum(back) == raster_checksum(g));
    CHECK(back.nodata == g.nodata);
  }
  SUBCASE("reading by header or payload path works") {
    write_raster(make_rgb(2, 2), dir / "alias");
    CHECK(read_raster(dir / "alias.rasterhdr.json").width == 2);
    CHECK(read_raster(dir / "alias.raster").width == 2);
  }
}

TEST_CASE("raster format errors name the offending field") {
  const fs::path dir = temp_dir();
  write_raster(make_rgb(4, 4), dir / "broken");

  SUBCASE("payload size mismatch") {
    // Declare 100 pixels over the 4x4x3 payload.
    std::ifstream in(dir / "broken.rasterhdr.json");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    in.close();
    auto pos = text.find("\"width\": 4");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 10, "\"width\": 10");
    std::ofstream(dir / "broken.rasterhdr.json") << text;
    CHECK_THROWS_WITH_AS(read_raster(dir / "broken"),
                         doctest::Contains("bytes"), FormatError);
  }
  SUBCASE("malformed JSON") {
    std::ofstream(dir / "broken.rasterhdr.json") << "{ not json";
    CHECK_THROWS_AS(read_raster(dir / "broken"), FormatError);
  }
  SUBCASE("missing field") {
    std::ofstream(dir / "broken.rasterhdr.json") << "{\"width\": 4}";
    CHECK_THROWS_WITH_AS(read_raster(dir / "broken"),
                         doctest::Contains("height"), FormatError);
  }
  SUBCASE("unknown dtype") {
    std::ofstream(dir / "broken.rasterhdr.json")
        << R"({"width":1,"height":1,"bands":1,"dtype":"int7",
             "geotransform":[0,1,0,0,0,-1],"crs":"","byte_order":"little",
             "payload":"broken.raster"})";
    CHECK_THROWS_WITH_AS(read_raster(dir / "broken"),
                         doctest::Contains("int7"), FormatError);
  }
}

TEST_CASE("align_dsm") {
  SUBCASE("identity grid leaves values unchanged") {
    RasterGrid dsm = make_dsm(16, 16);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x)
        dsm.f32[std::size_t(y) * 16 + x] = float(x + 2 * y);
    const RasterGrid ref = make_rgb(16, 16);
    const RasterGrid out = align_dsm(dsm, ref);
    for (std::size_t i = 0; i < out.f32.size(); ++i) {
      CHECK(out.f32[i] == doctest::Approx(dsm.f32[i]).epsilon(1e-6));
    }
  }
  SUBCASE("constant DSM upsampled 2x stays constant in the interior") {
    RasterGrid dsm = make_dsm(8, 8, 7.5f);
    RasterGrid ref = make_rgb(16, 16);
    ref.geotransform = {500000.0, 0.005, 0.0, 5000000.0, 0.0, -0.005};
    const RasterGrid out = align_dsm(dsm, ref);
    int valid = 0;
    for (const float v : out.f32) {
      if (!out.is_nodata(v)) {
        CHECK(v == doctest::Approx(7.5f));
        ++valid;
      }
    }
    CHECK(valid > 0);
  }
  SUBCASE("linear ramp matches analytic bilinear oracle") {
    // f(X, Y) = a*X + b*Y + c is reproduced exactly by bilinear sampling.
    const double a = 3.0, b = -2.0, c = 10.0;
    RasterGrid dsm = make_dsm(32, 32);
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        const Point g = dsm.geo_from_pixel(x + 0.5, y + 0.5);
        dsm.f32[std::size_t(y) * 32 + x] =
            float(a * (g.x - 500000.0) + b * (g.y - 5000000.0) + c);
      }
    }
    RasterGrid ref = make_rgb(64, 64);
    ref.geotransform = {500000.0, 0.005, 0.0, 5000000.0, 0.0, -0.005};
    const RasterGrid out = align_dsm(dsm, ref);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        const float v = out.f32[std::size_t(y) * 64 + x];
        if (out.is_nodata(v)) continue;
        const Point g = ref.geo_from_pixel(x + 0.5, y + 0.5);
        const double expect =
            a * (g.x - 500000.0) + b * (g.y - 5000000.0) + c;
        CHECK(double(v) == doctest::Approx(expect).epsilon(1e-5));
      }
    }
  }
  SUBCASE("CRS mismatch throws") {
    RasterGrid dsm = make_dsm(4, 4);
    dsm.crs = "EPSG:4326";
    CHECK_THROWS_AS(align_dsm(dsm, make_rgb(4, 4)), ValidationError);
  }
  SUBCASE("nodata source pixels propagate") {
    RasterGrid dsm = make_dsm(8, 8, 3.0f);
    dsm.f32[3 * 8 + 3] = -9999.0f;
    const RasterGrid out = align_dsm(dsm, make_rgb(8, 8));
    CHECK(out.is_nodata(out.f32[3 * 8 + 3]));
    CHECK_FALSE(out.is_nodata(out.f32[0]));
  }
}

TEST_CASE("black_fraction") {
  RasterGrid rgb = make_rgb(8, 8, 50);
  const PixelWindow full{0, 0, 8, 8};
  CHECK(black_fraction(rgb, full) == 0.0);

  // black out the left half
  const std::size_t plane = rgb.pixel_count();
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 4; ++x) {
      for (int b = 0; b < 3; ++b) {
        rgb.u8[b * plane + std::size_t(y) * 8 + x] = 0;
      }
    }
  }
  CHECK(black_fraction(rgb, full) == doctest::Approx(0.5));
  CHECK(black_fraction(rgb, PixelWindow{0, 0, 4, 8}) == 1.0);
  CHECK(black_fraction(rgb, PixelWindow{4, 0, 4, 8}) == 0.0);

  // a pixel dark in only one channel is not black
  rgb.u8[plane + 0] = 7;
  CHECK(black_fraction(rgb, PixelWindow{0, 0, 1, 1}) == 0.0);

  CHECK_THROWS_AS(black_fraction(rgb, PixelWindow{5, 0, 8, 8}),
                  ValidationError);

  SUBCASE("additive over a partition") {
    const double whole = black_fraction(rgb, full) * 64;
    const double parts = black_fraction(rgb, PixelWindow{0, 0, 8, 4}) * 32 +
                         black_fraction(rgb, PixelWindow{0, 4, 8, 4}) * 32;
    CHECK(whole == doctest::Approx(parts));
  }
}

TEST_CASE("normalize_dsm") {
  SUBCASE("max becomes exactly 1.0") {
    RasterGrid dsm = make_dsm(4, 4, 10.0f);
    dsm.f32[5] = 50.0f;
    const RasterGrid out = normalize_dsm(dsm);
    CHECK(out.f32[5] == 1.0f);
    CHECK(out.f32[0] == doctest::Approx(0.2f));
  }
  SUBCASE("constant tile becomes all ones") {
    const RasterGrid out = normalize_dsm(make_dsm(4, 4, 7.0f));
    for (const float v : out.f32) CHECK(v == 1.0f);
  }
  SUBCASE("inverting recovers the input") {
    RasterGrid dsm = make_dsm(16, 16);
    std::mt19937 rng(9);
    std::uniform_real_distribution<float> val(0.1f, 40.0f);
    for (auto& v : dsm.f32) v = val(rng);
    const float max_val = *std::max_element(dsm.f32.begin(), dsm.f32.end());
    const RasterGrid out = normalize_dsm(dsm);
    for (std::size_t i = 0; i < out.f32.size(); ++i) {
      CHECK(double(out.f32[i]) * max_val ==
            doctest::Approx(double(dsm.f32[i])).epsilon(1e-6));
    }
  }
  SUBCASE("idempotent") {
    RasterGrid dsm = make_dsm(4, 4, 3.0f);
    dsm.f32[7] = 9.0f;
    const RasterGrid once = normalize_dsm(dsm);
    const RasterGrid twice = normalize_dsm(once);
    CHECK(once.f32 == twice.f32);
  }
  SUBCASE("nodata preserved, degenerate tiles rejected") {
    RasterGrid dsm = make_dsm(2, 2, 4.0f);
    dsm.f32[3] = -9999.0f;
    const RasterGrid out = normalize_dsm(dsm);
    CHECK(out.f32[3] == -9999.0f);

    CHECK_THROWS_AS(normalize_dsm(make_dsm(2, 2, -1.0f)), ValidationError);
    CHECK_THROWS_AS(normalize_dsm(make_dsm(2, 2, -9999.0f)), ValidationError);
  }
}
