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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crownforge/errors.hpp"
#include "crownforge/geometry.hpp"

namespace crownforge {

enum class Dtype { uint8, float32 };

std::string dtype_name(Dtype d);
Dtype dtype_from_name(const std::string& name);

/// Integer pixel window [x0, x0+w) x [y0, y0+h).
struct PixelWindow {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;
};

/// Georeferenced raster. Payload is band-sequential row-major: band 0
/// rows first, then band 1, etc. Exactly one of `u8` / `f32` is populated
/// depending on dtype. The geotransform maps pixel (col, row) to
/// (X, Y) = (gt[0] + col*gt[1] + row*gt[2], gt[3] + col*gt[4] + row*gt[5]).
struct RasterGrid {
  int width = 0;
  int height = 0;
  int bands = 1;
  Dtype dtype = Dtype::float32;
  std::array<double, 6> geotransform{0.0, 1.0, 0.0, 0.0, 0.0, -1.0};
  std::string crs;
  std::optional<double> nodata;
  std::vector<std::uint8_t> u8;
  std::vector<float> f32;

  std::size_t pixel_count() const {
    return std::size_t(width) * std::size_t(height);
  }
  std::size_t value_count() const { return pixel_count() * bands; }

  float f32_at(int x, int y, int band = 0) const {
    return f32[std::size_t(band) * pixel_count() + std::size_t(y) * width + x];
  }
  std::uint8_t u8_at(int x, int y, int band = 0) const {
    return u8[std::size_t(band) * pixel_count() + std::size_t(y) * width + x];
  }
  bool is_nodata(float v) const {
    return nodata.has_value() && double(v) == *nodata;
  }

  Point geo_from_pixel(double col, double row) const;
  Point pixel_from_geo(double x, double y) const;
  /// Geographic bounds of a pixel window, as (min_x, min_y, max_x, max_y).
  std::array<double, 4> window_geo_bounds(const PixelWindow& win) const;
};

/// Native container: `<base>.rasterhdr.json` describing the grid plus
/// `<base>.raster` holding the raw little-endian payload. `path` may be
/// the base path, the header path, or the payload path.
RasterGrid read_raster(const std::filesystem::path& path);
void write_raster(const RasterGrid& grid, const std::filesystem::path& base);

/// Resample `dsm` onto the pixel grid of `reference` (bilinear). A target
/// pixel becomes nodata when it maps outside the source or when any of the
/// four contributing source pixels is nodata. Throws ValidationError on
/// CRS mismatch.
RasterGrid align_dsm(const RasterGrid& dsm, const RasterGrid& reference);

/// Fraction of window pixels whose (R, G, B) is exactly (0, 0, 0).
double black_fraction(const RasterGrid& rgb, const PixelWindow& win);

/// Divide every valid pixel by the maximum valid value, so the output
/// maximum is exactly 1.0. Nodata pixels pass through. Throws
/// ValidationError when the maximum is <= 0 or the tile is all nodata.
RasterGrid normalize_dsm(const RasterGrid& dsm);

/// FNV-1a over the payload bytes, used for manifest source checksums.
std::uint64_t raster_checksum(const RasterGrid& grid);

}  // namespace crownforge
