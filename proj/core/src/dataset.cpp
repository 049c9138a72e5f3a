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

#include "crownforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace crownforge {

namespace fs = std::filesystem;
using nlohmann::json;

int ClassMap::class_of(const std::string& species) const {
  auto it = species_to_class.find(species);
  return it != species_to_class.end() ? it->second : other_index();
}

ClassMap build_class_map(std::span<const CrownAnnotation> annotations,
                         int threshold) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& a : annotations) ++counts[a.species];

  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (const auto& [species, n] : counts) {
    if (n > threshold) kept.emplace_back(species, n);
  }
  // Descending count; alphabetical tie-break keeps the map deterministic.
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  ClassMap cm;
  for (const auto& [species, n] : kept) {
    cm.species_to_class[species] = int(cm.classes.size());
    cm.classes.push_back(species);
  }
  cm.classes.push_back("other");
  const int other = cm.other_index();
  for (const auto& [species, n] : counts) {
    if (!cm.species_to_class.count(species)) {
      cm.species_to_class[species] = other;
    }
  }
  return cm;
}

std::string split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    default: return "unassigned";
  }
}

Split split_from_name(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  if (name == "unassigned") return Split::unassigned;
  throw FormatError("unknown split label '" + name + "'");
}

namespace {

Polygon polygon_to_pixel_space(const Polygon& p, const RasterGrid& ref) {
  Polygon out;
  auto convert = [&ref](const std::vector<Point>& ring) {
    std::vector<Point> px;
    px.reserve(ring.size());
    for (const Point& pt : ring) px.push_back(ref.pixel_from_geo(pt.x, pt.y));
    return px;
  };
  out.exterior = convert(p.exterior);
  for (const auto& h : p.holes) out.holes.push_back(convert(h));
  return out;
}

Polygon rebase_polygon(const Polygon& p, double dx, double dy) {
  Polygon out = p;
  for (Point& pt : out.exterior) {
    pt.x -= dx;
    pt.y -= dy;
  }
  for (auto& hole : out.holes) {
    for (Point& pt : hole) {
      pt.x -= dx;
      pt.y -= dy;
    }
  }
  return out;
}

std::size_t rasterized_count(const Polygon& p) {
  if (p.empty()) return 0;
  double min_x = p.exterior[0].x, max_x = min_x;
  double min_y = p.exterior[0].y, max_y = min_y;
  for (const Point& pt : p.exterior) {
    min_x = std::min(min_x, pt.x);
    max_x = std::max(max_x, pt.x);
    min_y = std::min(min_y, pt.y);
    max_y = std::max(max_y, pt.y);
  }
  const double dx = std::floor(min_x);
  const double dy = std::floor(min_y);
  const int w = std::max(1, int(std::ceil(max_x - dx)));
  const int h = std::max(1, int(std::ceil(max_y - dy)));
  return rasterize_polygon(rebase_polygon(p, dx, dy), w, h).count();
}

}  // namespace

std::vector<TileLabel> clip_labels_to_tile(
    std::span<const CrownAnnotation> annotations, const RasterGrid& reference,
    const PixelWindow& window, const ClassMap& class_map, double min_visible,
    bool pixel_count_visibility) {
  const Rect rect{double(window.x0), double(window.y0),
                  double(window.x0 + window.w), double(window.y0 + window.h)};
  std::vector<TileLabel> labels;
  for (const auto& ann : annotations) {
    const Polygon px = polygon_to_pixel_space(ann.polygon, reference);
    const Polygon clipped = clip_polygon_to_rect(px, rect);
    if (clipped.empty()) continue;

    double fraction;
    if (pixel_count_visibility) {
      const std::size_t full = rasterized_count(px);
      if (full == 0) continue;
      fraction = double(rasterized_count(clipped)) / double(full);
    } else {
      const double full = polygon_area(px);
      if (full <= 0.0) continue;
      fraction = polygon_area(clipped) / full;
    }
    if (fraction < min_visible) continue;

    TileLabel label;
    label.polygon = rebase_polygon(clipped, window.x0, window.y0);
    label.class_id = class_map.class_of(ann.species);
    label.visible_fraction = fraction;
    labels.push_back(std::move(label));
  }
  return labels;
}

TileManifest generate_tiles(const RasterGrid& rgb, const RasterGrid& dsm,
                            std::span<const Polygon> aoi,
                            std::span<const CrownAnnotation> annotations,
                            const ClassMap& class_map,
                            const TilingParams& params,
                            const fs::path& out_dir) {
  if (rgb.bands != 3 || rgb.dtype != Dtype::uint8) {
    throw ValidationError("generate_tiles: expects a 3-band uint8 orthomosaic");
  }
  if (dsm.width != rgb.width || dsm.height != rgb.height ||
      dsm.geotransform != rgb.geotransform) {
    throw ValidationError(
        "generate_tiles: DSM is not aligned to the orthomosaic grid");
  }
  if (aoi.empty()) throw ValidationError("generate_tiles: no AOIs given");

  TileManifest manifest;
  manifest.class_map = class_map;
  manifest.params = params;
  manifest.source_checksums[params.source_name + "_rgb"] =
      raster_checksum(rgb);
  manifest.source_checksums[params.source_name + "_dsm"] =
      raster_checksum(dsm);

  // AOI bounding box in pixel space anchors the window grid.
  std::vector<Polygon> aoi_px;
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_y;
  for (const Polygon& p : aoi) {
    aoi_px.push_back(polygon_to_pixel_space(p, rgb));
    for (const Point& pt : aoi_px.back().exterior) {
      min_x = std::min(min_x, pt.x);
      max_x = std::max(max_x, pt.x);
      min_y = std::min(min_y, pt.y);
      max_y = std::max(max_y, pt.y);
    }
  }
  if (max_x <= 0.0 || max_y <= 0.0 || min_x >= rgb.width ||
      min_y >= rgb.height) {
    return manifest;  // AOI outside the raster: zero tiles
  }

  const int tile = params.tile_size;
  const int stride = std::max(1, int(std::lround(tile * (1.0 - params.overlap))));
  const int anchor_x = std::max(0, int(std::floor(min_x)));
  const int anchor_y = std::max(0, int(std::floor(min_y)));
  const float dsm_nodata = float(dsm.nodata.value_or(-9999.0));

  if (!params.manifest_only) fs::create_directories(out_dir);

  for (int y0 = anchor_y; y0 + tile <= rgb.height && y0 < max_y; y0 += stride) {
    for (int x0 = anchor_x; x0 + tile <= rgb.width && x0 < max_x;
         x0 += stride) {
      const PixelWindow win{x0, y0, tile, tile};

      // AOI coverage mask for this window.
      BinaryMask aoi_mask(tile, tile);
      const Rect win_rect{double(x0), double(y0), double(x0 + tile),
                          double(y0 + tile)};
      for (const Polygon& p : aoi_px) {
        const Polygon local =
            rebase_polygon(clip_polygon_to_rect(p, win_rect), x0, y0);
        if (local.empty()) continue;
        const BinaryMask part = rasterize_polygon(local, tile, tile);
        for (std::size_t i = 0; i < aoi_mask.pixels.size(); ++i) {
          aoi_mask.pixels[i] |= part.pixels[i];
        }
      }

      // Extract the tile and black out everything outside the AOIs.
      RasterGrid tile_rgb;
      tile_rgb.width = tile;
      tile_rgb.height = tile;
      tile_rgb.bands = 3;
      tile_rgb.dtype = Dtype::uint8;
      tile_rgb.crs = rgb.crs;
      tile_rgb.geotransform = rgb.geotransform;
      {
        const Point origin = rgb.geo_from_pixel(x0, y0);
        tile_rgb.geotransform[0] = origin.x;
        tile_rgb.geotransform[3] = origin.y;
      }
      tile_rgb.u8.resize(tile_rgb.value_count());
      RasterGrid tile_dsm;
      tile_dsm.width = tile;
      tile_dsm.height = tile;
      tile_dsm.bands = 1;
      tile_dsm.dtype = Dtype::float32;
      tile_dsm.crs = dsm.crs;
      tile_dsm.geotransform = tile_rgb.geotransform;
      tile_dsm.nodata = double(dsm_nodata);
      tile_dsm.f32.resize(tile_dsm.pixel_count());

      const std::size_t src_plane = rgb.pixel_count();
      const std::size_t dst_plane = tile_rgb.pixel_count();
      for (int ty = 0; ty < tile; ++ty) {
        for (int tx = 0; tx < tile; ++tx) {
          const std::size_t src = std::size_t(y0 + ty) * rgb.width + (x0 + tx);
          const std::size_t dst = std::size_t(ty) * tile + tx;
          if (aoi_mask.pixels[dst]) {
            for (int b = 0; b < 3; ++b) {
              tile_rgb.u8[b * dst_plane + dst] = rgb.u8[b * src_plane + src];
            }
            tile_dsm.f32[dst] = dsm.f32[src];
          } else {
            for (int b = 0; b < 3; ++b) tile_rgb.u8[b * dst_plane + dst] = 0;
            tile_dsm.f32[dst] = dsm_nodata;
          }
        }
      }

      if (black_fraction(tile_rgb, PixelWindow{0, 0, tile, tile}) >
          params.black_threshold) {
        continue;
      }

      std::vector<TileLabel> labels =
          clip_labels_to_tile(annotations, rgb, win, class_map,
                              params.min_visible,
                              params.pixel_count_visibility);
      if (labels.empty()) continue;

      TileRecord rec;
      rec.tile_id = params.source_name + "_x" + std::to_string(x0) + "_y" +
                    std::to_string(y0);
      rec.source = params.source_name;
      rec.window = win;
      rec.geo_bounds = rgb.window_geo_bounds(win);
      rec.labels = std::move(labels);
      if (!params.manifest_only) {
        write_raster(tile_rgb, out_dir / (rec.tile_id + "_rgb"));
        write_raster(tile_dsm, out_dir / (rec.tile_id + "_dsm"));
      }
      manifest.tiles.push_back(std::move(rec));
    }
  }
  return manifest;
}

namespace {

bool segments_cross(const Point& a, const Point& b, const Point& c,
                    const Point& d) {
  auto orient = [](const Point& p, const Point& q, const Point& r) {
    const double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
  };
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  // Proper crossing only; shared boundaries do not count as overlap.
  return o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 && o1 != o2 && o3 != o4;
}

bool on_boundary(const Point& pt, const Polygon& poly) {
  constexpr double kEps = 1e-9;
  const std::size_t n = poly.exterior.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly.exterior[i];
    const Point& b = poly.exterior[(i + 1) % n];
    const double cross =
        (b.x - a.x) * (pt.y - a.y) - (b.y - a.y) * (pt.x - a.x);
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (len == 0.0) continue;
    if (std::abs(cross) / len > kEps) continue;
    const double dot =
        (pt.x - a.x) * (b.x - a.x) + (pt.y - a.y) * (b.y - a.y);
    if (dot >= -kEps && dot <= len * len + kEps) return true;
  }
  return false;
}

// Vertex strictly inside the other polygon; shared boundaries do not count.
bool strictly_inside(const Point& pt, const Polygon& poly) {
  return !on_boundary(pt, poly) && point_in_polygon(pt, poly);
}

bool polygons_interiors_overlap(const Polygon& a, const Polygon& b) {
  for (const Point& p : a.exterior) {
    if (strictly_inside(p, b)) return true;
  }
  for (const Point& p : b.exterior) {
    if (strictly_inside(p, a)) return true;
  }
  const std::size_t na = a.exterior.size();
  const std::size_t nb = b.exterior.size();
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      if (segments_cross(a.exterior[i], a.exterior[(i + 1) % na],
                         b.exterior[j], b.exterior[(j + 1) % nb])) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

void assign_splits(TileManifest& manifest,
                   std::span<const SplitRegion> regions) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = i + 1; j < regions.size(); ++j) {
      if (regions[i].split != regions[j].split &&
          polygons_interiors_overlap(regions[i].polygon,
                                     regions[j].polygon)) {
        throw ValidationError("assign_splits: regions of splits '" +
                              split_name(regions[i].split) + "' and '" +
                              split_name(regions[j].split) + "' overlap");
      }
    }
  }

  for (TileRecord& tile : manifest.tiles) {
    const auto& gb = tile.geo_bounds;
    const Rect footprint{gb[0], gb[1], gb[2], gb[3]};
    const Point center{(gb[0] + gb[2]) / 2.0, (gb[1] + gb[3]) / 2.0};

    Split center_split = Split::unassigned;
    std::vector<Split> touching;
    for (const SplitRegion& region : regions) {
      const Polygon clipped = clip_polygon_to_rect(region.polygon, footprint);
      const bool touches = !clipped.empty() && polygon_area(clipped) > 0.0;
      if (touches &&
          std::find(touching.begin(), touching.end(), region.split) ==
              touching.end()) {
        touching.push_back(region.split);
      }
      if (point_in_polygon(center, region.polygon)) {
        center_split = region.split;
      }
    }
    // Straddling two splits leaks spatial context; exclude such tiles.
    tile.split = touching.size() > 1 ? Split::unassigned : center_split;
  }
}

SplitValidation validate_splits(const TileManifest& manifest) {
  SplitValidation report;
  const int n_classes = manifest.class_map.num_classes();
  report.label_counts.assign(std::size_t(std::max(n_classes, 0)),
                             {0, 0, 0});
  for (const TileRecord& tile : manifest.tiles) {
    if (tile.split == Split::unassigned) {
      ++report.unassigned_tiles;
      continue;
    }
    const int s = int(tile.split);
    ++report.tile_counts[s];
    for (const TileLabel& label : tile.labels) {
      if (label.class_id >= 0 && label.class_id < n_classes) {
        ++report.label_counts[label.class_id][s];
      }
    }
  }
  for (int c = 0; c < n_classes; ++c) {
    for (int s = 0; s < 3; ++s) {
      if (report.label_counts[c][s] == 0) {
        report.ok = false;
        report.failures.push_back("class '" + manifest.class_map.classes[c] +
                                  "' absent from split '" +
                                  split_name(Split(s)) + "'");
      }
    }
  }
  return report;
}

namespace {

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw FormatError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::vector<Point> ring_from_geojson(const json& ring) {
  std::vector<Point> out;
  for (const auto& coord : ring) {
    out.push_back({coord.at(0).get<double>(), coord.at(1).get<double>()});
  }
  // GeoJSON rings repeat the first vertex; our convention closes implicitly.
  if (out.size() > 1 && out.front().x == out.back().x &&
      out.front().y == out.back().y) {
    out.pop_back();
  }
  return out;
}

Polygon polygon_from_geojson(const json& coords) {
  Polygon p;
  if (coords.empty()) throw FormatError("GeoJSON polygon with no rings");
  p.exterior = ring_from_geojson(coords.at(0));
  for (std::size_t i = 1; i < coords.size(); ++i) {
    p.holes.push_back(ring_from_geojson(coords.at(i)));
  }
  return p;
}

/// Flatten Polygon and MultiPolygon geometries into simple polygons.
std::vector<Polygon> polygons_from_feature(const json& feature) {
  const json& geom = feature.at("geometry");
  const std::string type = geom.at("type").get<std::string>();
  std::vector<Polygon> out;
  if (type == "Polygon") {
    out.push_back(polygon_from_geojson(geom.at("coordinates")));
  } else if (type == "MultiPolygon") {
    for (const auto& coords : geom.at("coordinates")) {
      out.push_back(polygon_from_geojson(coords));
    }
  } else {
    throw FormatError("unsupported GeoJSON geometry type '" + type + "'");
  }
  return out;
}

const json& features_of(const json& j, const fs::path& path) {
  if (!j.contains("features")) {
    throw FormatError(path.string() + ": not a GeoJSON FeatureCollection");
  }
  return j.at("features");
}

}  // namespace

std::vector<CrownAnnotation> read_annotations_geojson(const fs::path& path) {
  const json j = load_json_file(path);
  std::vector<CrownAnnotation> out;
  for (const auto& feature : features_of(j, path)) {
    auto polys = polygons_from_feature(feature);
    if (polys.size() != 1) {
      throw FormatError(path.string() +
                        ": annotation features must be simple polygons");
    }
    CrownAnnotation ann;
    ann.polygon = std::move(polys[0]);
    const json& props = feature.value("properties", json::object());
    if (!props.contains("species")) {
      throw FormatError(path.string() +
                        ": annotation feature missing property 'species'");
    }
    ann.species = props.at("species").get<std::string>();
    if (props.contains("id")) {
      const json& id = props.at("id");
      ann.id = id.is_string() ? id.get<std::string>() : id.dump();
    } else {
      ann.id = std::to_string(out.size());
    }
    ann.site_id = props.value("site", "");
    out.push_back(std::move(ann));
  }
  return out;
}

std::vector<Polygon> read_aoi_geojson(const fs::path& path) {
  const json j = load_json_file(path);
  std::vector<Polygon> out;
  for (const auto& feature : features_of(j, path)) {
    for (auto& p : polygons_from_feature(feature)) out.push_back(std::move(p));
  }
  return out;
}

std::vector<SplitRegion> read_split_regions_geojson(const fs::path& path) {
  const json j = load_json_file(path);
  std::vector<SplitRegion> out;
  for (const auto& feature : features_of(j, path)) {
    const json& props = feature.value("properties", json::object());
    if (!props.contains("split")) {
      throw FormatError(path.string() +
                        ": split region feature missing property 'split'");
    }
    const Split split = split_from_name(props.at("split").get<std::string>());
    for (auto& p : polygons_from_feature(feature)) {
      out.push_back(SplitRegion{std::move(p), split});
    }
  }
  return out;
}

namespace {

json ring_to_json(const std::vector<Point>& ring) {
  json out = json::array();
  for (const Point& p : ring) out.push_back(json::array({p.x, p.y}));
  return out;
}

std::vector<Point> ring_from_json(const json& j) {
  std::vector<Point> out;
  for (const auto& c : j) {
    out.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
  }
  return out;
}

}  // namespace

void write_manifest(const TileManifest& manifest, const fs::path& dir) {
  fs::create_directories(dir);

  std::ofstream out(dir / "manifest.jsonl");
  if (!out) throw FormatError("cannot write " + (dir / "manifest.jsonl").string());
  for (const TileRecord& tile : manifest.tiles) {
    json j;
    j["tile_id"] = tile.tile_id;
    j["source"] = tile.source;
    j["window"] = {tile.window.x0, tile.window.y0, tile.window.w,
                   tile.window.h};
    j["geo_bounds"] = tile.geo_bounds;
    j["split"] = split_name(tile.split);
    json labels = json::array();
    for (const TileLabel& label : tile.labels) {
      json lj;
      lj["class_id"] = label.class_id;
      lj["visible_fraction"] = label.visible_fraction;
      lj["polygon"] = ring_to_json(label.polygon.exterior);
      if (!label.polygon.holes.empty()) {
        json holes = json::array();
        for (const auto& h : label.polygon.holes) holes.push_back(ring_to_json(h));
        lj["holes"] = holes;
      }
      labels.push_back(std::move(lj));
    }
    j["labels"] = std::move(labels);
    out << j.dump() << "\n";
  }

  json ds;
  ds["classes"] = manifest.class_map.classes;
  ds["species_to_class"] = manifest.class_map.species_to_class;
  ds["tile_size"] = manifest.params.tile_size;
  ds["overlap"] = manifest.params.overlap;
  ds["black_threshold"] = manifest.params.black_threshold;
  ds["min_visible"] = manifest.params.min_visible;
  json checks = json::object();
  for (const auto& [name, sum] : manifest.source_checksums) {
    std::ostringstream hex;
    hex << std::hex << sum;
    checks[name] = hex.str();
  }
  ds["source_checksums"] = std::move(checks);
  json totals;
  totals["tiles"] = manifest.tiles.size();
  std::array<std::int64_t, 4> per_split{0, 0, 0, 0};
  for (const TileRecord& t : manifest.tiles) ++per_split[int(t.split)];
  totals["train"] = per_split[0];
  totals["val"] = per_split[1];
  totals["test"] = per_split[2];
  totals["unassigned"] = per_split[3];
  ds["totals"] = std::move(totals);

  std::ofstream ds_out(dir / "dataset.json");
  ds_out << ds.dump(2) << "\n";
  if (!ds_out) throw FormatError("cannot write " + (dir / "dataset.json").string());
}

TileManifest read_manifest(const fs::path& manifest_jsonl) {
  std::ifstream in(manifest_jsonl);
  if (!in) throw FormatError("cannot open " + manifest_jsonl.string());

  TileManifest manifest;
  std::string line;
  int line_no = 0;
  int max_class = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(manifest_jsonl.string() + ":" +
                        std::to_string(line_no) + ": " + e.what());
    }
    TileRecord tile;
    tile.tile_id = j.at("tile_id").get<std::string>();
    tile.source = j.value("source", "");
    const auto& win = j.at("window");
    tile.window = {win.at(0).get<int>(), win.at(1).get<int>(),
                   win.at(2).get<int>(), win.at(3).get<int>()};
    if (j.contains("geo_bounds")) {
      const auto& gb = j.at("geo_bounds");
      for (int i = 0; i < 4; ++i) tile.geo_bounds[i] = gb.at(i).get<double>();
    }
    tile.split = split_from_name(j.value("split", "unassigned"));
    for (const auto& lj : j.at("labels")) {
      TileLabel label;
      label.class_id = lj.at("class_id").get<int>();
      label.visible_fraction = lj.value("visible_fraction", 1.0);
      label.polygon.exterior = ring_from_json(lj.at("polygon"));
      if (lj.contains("holes")) {
        for (const auto& h : lj.at("holes")) {
          label.polygon.holes.push_back(ring_from_json(h));
        }
      }
      max_class = std::max(max_class, label.class_id);
      tile.labels.push_back(std::move(label));
    }
    manifest.tiles.push_back(std::move(tile));
  }

  const fs::path ds_path = manifest_jsonl.parent_path() / "dataset.json";
  if (fs::exists(ds_path)) {
    const json ds = load_json_file(ds_path);
    manifest.class_map.classes =
        ds.at("classes").get<std::vector<std::string>>();
    if (ds.contains("species_to_class")) {
      manifest.class_map.species_to_class =
          ds.at("species_to_class")
              .get<std::unordered_map<std::string, int>>();
    }
    manifest.params.tile_size = ds.value("tile_size", 1024);
    manifest.params.overlap = ds.value("overlap", 0.5);
    manifest.params.black_threshold = ds.value("black_threshold", 0.8);
    manifest.params.min_visible = ds.value("min_visible", 0.2);
  } else {
    for (int c = 0; c <= max_class; ++c) {
      manifest.class_map.classes.push_back("class_" + std::to_string(c));
    }
    if (manifest.class_map.classes.empty()) {
      manifest.class_map.classes.push_back("other");
    }
  }
  return manifest;
}

}  // namespace crownforge
