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

#include "crownforge/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "raster payload I/O assumes a little-endian host");

namespace crownforge {

namespace fs = std::filesystem;
using nlohmann::json;

std::string dtype_name(Dtype d) {
  return d == Dtype::uint8 ? "uint8" : "float32";
}

Dtype dtype_from_name(const std::string& name) {
  if (name == "uint8") return Dtype::uint8;
  if (name == "float32") return Dtype::float32;
  throw FormatError("raster header: unknown dtype '" + name + "'");
}

Point RasterGrid::geo_from_pixel(double col, double row) const {
  const auto& gt = geotransform;
  return {gt[0] + col * gt[1] + row * gt[2],
          gt[3] + col * gt[4] + row * gt[5]};
}

Point RasterGrid::pixel_from_geo(double x, double y) const {
  const auto& gt = geotransform;
  const double det = gt[1] * gt[5] - gt[2] * gt[4];
  if (det == 0.0) throw GeometryError("pixel_from_geo: singular geotransform");
  const double dx = x - gt[0];
  const double dy = y - gt[3];
  return {(dx * gt[5] - gt[2] * dy) / det, (gt[1] * dy - gt[4] * dx) / det};
}

std::array<double, 4> RasterGrid::window_geo_bounds(
    const PixelWindow& win) const {
  const Point corners[4] = {
      geo_from_pixel(win.x0, win.y0),
      geo_from_pixel(win.x0 + win.w, win.y0),
      geo_from_pixel(win.x0, win.y0 + win.h),
      geo_from_pixel(win.x0 + win.w, win.y0 + win.h),
  };
  std::array<double, 4> b = {corners[0].x, corners[0].y, corners[0].x,
                             corners[0].y};
  for (const Point& c : corners) {
    b[0] = std::min(b[0], c.x);
    b[1] = std::min(b[1], c.y);
    b[2] = std::max(b[2], c.x);
    b[3] = std::max(b[3], c.y);
  }
  return b;
}

namespace {

fs::path header_path_for(const fs::path& path) {
  std::string s = path.string();
  const std::string hdr_ext = ".rasterhdr.json";
  if (s.size() >= hdr_ext.size() &&
      s.compare(s.size() - hdr_ext.size(), hdr_ext.size(), hdr_ext) == 0) {
    return path;
  }
  const std::string raw_ext = ".raster";
  if (s.size() >= raw_ext.size() &&
      s.compare(s.size() - raw_ext.size(), raw_ext.size(), raw_ext) == 0) {
    return fs::path(s.substr(0, s.size() - raw_ext.size()) + hdr_ext);
  }
  return fs::path(s + hdr_ext);
}

std::size_t dtype_size(Dtype d) { return d == Dtype::uint8 ? 1 : 4; }

template <typename T>
T require_field(const json& j, const char* field) {
  if (!j.contains(field)) {
    throw FormatError(std::string("raster header: missing field '") + field +
                      "'");
  }
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("raster header: bad value for field '") +
                      field + "'");
  }
}

}  // namespace

RasterGrid read_raster(const fs::path& path) {
  const fs::path hdr_path = header_path_for(path);
  std::ifstream hdr_in(hdr_path);
  if (!hdr_in) {
    throw FormatError("cannot open raster header " + hdr_path.string());
  }
  json j;
  try {
    hdr_in >> j;
  } catch (const json::exception& e) {
    throw FormatError("malformed raster header " + hdr_path.string() + ": " +
                      e.what());
  }

  RasterGrid g;
  g.width = require_field<int>(j, "width");
  g.height = require_field<int>(j, "height");
  g.bands = require_field<int>(j, "bands");
  g.dtype = dtype_from_name(require_field<std::string>(j, "dtype"));
  const auto gt = require_field<std::vector<double>>(j, "geotransform");
  if (gt.size() != 6) {
    throw FormatError("raster header: field 'geotransform' must have 6 terms");
  }
  std::copy(gt.begin(), gt.end(), g.geotransform.begin());
  g.crs = require_field<std::string>(j, "crs");
  if (j.contains("nodata") && !j.at("nodata").is_null()) {
    g.nodata = require_field<double>(j, "nodata");
  }
  if (require_field<std::string>(j, "byte_order") != "little") {
    throw FormatError("raster header: field 'byte_order' must be 'little'");
  }
  const auto payload_name = require_field<std::string>(j, "payload");
  if (g.width <= 0 || g.height <= 0 || g.bands <= 0) {
    throw FormatError("raster header: non-positive field 'width'/'height'/'bands'");
  }

  const fs::path payload_path = hdr_path.parent_path() / payload_name;
  std::ifstream raw(payload_path, std::ios::binary | std::ios::ate);
  if (!raw) {
    throw FormatError("cannot open raster payload " + payload_path.string());
  }
  const std::size_t file_size = std::size_t(raw.tellg());
  const std::size_t expect = g.value_count() * dtype_size(g.dtype);
  if (file_size != expect) {
    throw FormatError("raster payload " + payload_path.string() + " is " +
                      std::to_string(file_size) + " bytes, header declares " +
                      std::to_string(expect));
  }
  raw.seekg(0);
  if (g.dtype == Dtype::uint8) {
    g.u8.resize(g.value_count());
    raw.read(reinterpret_cast<char*>(g.u8.data()), std::streamsize(expect));
  } else {
    g.f32.resize(g.value_count());
    raw.read(reinterpret_cast<char*>(g.f32.data()), std::streamsize(expect));
  }
  if (!raw) throw FormatError("short read on " + payload_path.string());
  return g;
}

void write_raster(const RasterGrid& grid, const fs::path& base) {
  const std::size_t expect = grid.value_count();
  const std::size_t have =
      grid.dtype == Dtype::uint8 ? grid.u8.size() : grid.f32.size();
  if (have != expect) {
    throw FormatError("write_raster: payload has " + std::to_string(have) +
                      " values, dimensions require " + std::to_string(expect));
  }

  const std::string name = base.filename().string();
  json j;
  j["width"] = grid.width;
  j["height"] = grid.height;
  j["bands"] = grid.bands;
  j["dtype"] = dtype_name(grid.dtype);
  j["geotransform"] = grid.geotransform;
  j["crs"] = grid.crs;
  if (grid.nodata) {
    j["nodata"] = *grid.nodata;
  } else {
    j["nodata"] = nullptr;
  }
  j["byte_order"] = "little";
  j["payload"] = name + ".raster";

  const fs::path hdr_path = fs::path(base.string() + ".rasterhdr.json");
  std::ofstream hdr(hdr_path);
  hdr << j.dump(2) << "\n";
  if (!hdr) throw FormatError("cannot write " + hdr_path.string());

  const fs::path payload_path = fs::path(base.string() + ".raster");
  std::ofstream raw(payload_path, std::ios::binary);
  if (grid.dtype == Dtype::uint8) {
    raw.write(reinterpret_cast<const char*>(grid.u8.data()),
              std::streamsize(grid.u8.size()));
  } else {
    raw.write(reinterpret_cast<const char*>(grid.f32.data()),
              std::streamsize(grid.f32.size() * 4));
  }
  if (!raw) throw FormatError("cannot write " + payload_path.string());
}

RasterGrid align_dsm(const RasterGrid& dsm, const RasterGrid& reference) {
  if (dsm.crs != reference.crs) {
    throw ValidationError("align_dsm: CRS mismatch ('" + dsm.crs + "' vs '" +
                          reference.crs + "'), reprojection not supported");
  }
  if (dsm.bands != 1 || dsm.dtype != Dtype::float32) {
    throw ValidationError("align_dsm: source must be a single-band float DSM");
  }

  RasterGrid out;
  out.width = reference.width;
  out.height = reference.height;
  out.bands = 1;
  out.dtype = Dtype::float32;
  out.geotransform = reference.geotransform;
  out.crs = reference.crs;
  out.nodata = dsm.nodata ? dsm.nodata : std::optional<double>(-9999.0);
  const float fill = float(*out.nodata);
  out.f32.assign(out.pixel_count(), fill);

  for (int r = 0; r < out.height; ++r) {
    for (int c = 0; c < out.width; ++c) {
      const Point geo = reference.geo_from_pixel(c + 0.5, r + 0.5);
      const Point px = dsm.pixel_from_geo(geo.x, geo.y);
      // Sample position in source pixel-center coordinates. Snap positions
      // a rounding error away from the valid range back onto its edge.
      double u = px.x - 0.5;
      double v = px.y - 0.5;
      constexpr double kSnap = 1e-6;
      if (u < 0.0 && u > -kSnap) u = 0.0;
      if (u > dsm.width - 1 && u < dsm.width - 1 + kSnap) u = dsm.width - 1;
      if (v < 0.0 && v > -kSnap) v = 0.0;
      if (v > dsm.height - 1 && v < dsm.height - 1 + kSnap) v = dsm.height - 1;
      const int ix0 = int(std::floor(u));
      const int iy0 = int(std::floor(v));
      const double fx = u - ix0;
      const double fy = v - iy0;
      const int ix1 = (fx == 0.0) ? ix0 : ix0 + 1;
      const int iy1 = (fy == 0.0) ? iy0 : iy0 + 1;
      if (ix0 < 0 || iy0 < 0 || ix1 >= dsm.width || iy1 >= dsm.height) {
        continue;  // outside the source extent
      }
      const float v00 = dsm.f32_at(ix0, iy0);
      const float v10 = dsm.f32_at(ix1, iy0);
      const float v01 = dsm.f32_at(ix0, iy1);
      const float v11 = dsm.f32_at(ix1, iy1);
      if (dsm.is_nodata(v00) || dsm.is_nodata(v10) || dsm.is_nodata(v01) ||
          dsm.is_nodata(v11)) {
        continue;  // nodata propagates to any touched target pixel
      }
      const double top = v00 + fx * (double(v10) - v00);
      const double bot = v01 + fx * (double(v11) - v01);
      out.f32[std::size_t(r) * out.width + c] = float(top + fy * (bot - top));
    }
  }
  return out;
}

double black_fraction(const RasterGrid& rgb, const PixelWindow& win) {
  if (rgb.bands != 3 || rgb.dtype != Dtype::uint8) {
    throw ValidationError("black_fraction: expects a 3-band uint8 raster");
  }
  if (win.w <= 0 || win.h <= 0 || win.x0 < 0 || win.y0 < 0 ||
      win.x0 + win.w > rgb.width || win.y0 + win.h > rgb.height) {
    throw ValidationError("black_fraction: window out of bounds");
  }
  const std::size_t plane = rgb.pixel_count();
  std::size_t black = 0;
  for (int y = win.y0; y < win.y0 + win.h; ++y) {
    const std::size_t row = std::size_t(y) * rgb.width;
    for (int x = win.x0; x < win.x0 + win.w; ++x) {
      const std::size_t i = row + x;
      if (rgb.u8[i] == 0 && rgb.u8[plane + i] == 0 &&
          rgb.u8[2 * plane + i] == 0) {
        ++black;
      }
    }
  }
  return double(black) / (double(win.w) * win.h);
}

RasterGrid normalize_dsm(const RasterGrid& dsm) {
  if (dsm.bands != 1 || dsm.dtype != Dtype::float32) {
    throw ValidationError("normalize_dsm: expects a single-band float DSM");
  }
  float max_val = -std::numeric_limits<float>::infinity();
  bool any_valid = false;
  for (const float v : dsm.f32) {
    if (dsm.is_nodata(v)) continue;
    any_valid = true;
    max_val = std::max(max_val, v);
  }
  if (!any_valid) {
    throw ValidationError("normalize_dsm: all-nodata sample");
  }
  if (max_val <= 0.0f) {
    throw ValidationError("normalize_dsm: degenerate sample, max " +
                          std::to_string(max_val) + " <= 0");
  }
  RasterGrid out = dsm;
  for (float& v : out.f32) {
    if (!dsm.is_nodata(v)) v = (v == max_val) ? 1.0f : v / max_val;
  }
  return out;
}

std::uint64_t raster_checksum(const RasterGrid& grid) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](const std::uint8_t* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      h ^= data[i];
      h *= 1099511628211ull;
    }
  };
  if (grid.dtype == Dtype::uint8) {
    mix(grid.u8.data(), grid.u8.size());
  } else {
    mix(reinterpret_cast<const std::uint8_t*>(grid.f32.data()),
        grid.f32.size() * 4);
  }
  return h;
}

}  // namespace crownforge
