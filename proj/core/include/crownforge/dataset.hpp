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
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "crownforge/geometry.hpp"
#include "crownforge/raster.hpp"

namespace crownforge {

struct CrownAnnotation {
  std::string id;
  Polygon polygon;  // CRS coordinates
  std::string species;
  std::string site_id;
};

/// Species-to-class mapping. Kept species (count > threshold) come first,
/// ordered by descending total count; the trailing class is always "other".
struct ClassMap {
  std::vector<std::string> classes;
  std::unordered_map<std::string, int> species_to_class;

  int num_classes() const { return int(classes.size()); }
  int other_index() const { return int(classes.size()) - 1; }
  int class_of(const std::string& species) const;
};

ClassMap build_class_map(std::span<const CrownAnnotation> annotations,
                         int threshold = 20);

struct TileLabel {
  Polygon polygon;  // tile-pixel coordinates
  int class_id = 0;
  double visible_fraction = 1.0;
};

enum class Split { train, val, test, unassigned };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct TileRecord {
  std::string tile_id;
  std::string source;  // orthomosaic name
  PixelWindow window;
  std::array<double, 4> geo_bounds;  // min_x, min_y, max_x, max_y
  Split split = Split::unassigned;
  std::vector<TileLabel> labels;
};

struct TilingParams {
  int tile_size = 1024;
  double overlap = 0.5;
  double black_threshold = 0.8;
  double min_visible = 0.2;
  /// Measure visibility by rasterized pixel counts instead of polygon area.
  bool pixel_count_visibility = false;
  /// Skip writing per-tile rasters (manifest only).
  bool manifest_only = false;
  std::string source_name = "ortho";
};

struct TileManifest {
  std::vector<TileRecord> tiles;
  ClassMap class_map;
  TilingParams params;
  std::map<std::string, std::uint64_t> source_checksums;
};

/// Clip annotations to a pixel window. An annotation is kept iff
/// area(clipped) / area(original) >= min_visible; the surviving polygon is
/// rebased to tile-pixel coordinates (window origin at (0, 0)).
std::vector<TileLabel> clip_labels_to_tile(
    std::span<const CrownAnnotation> annotations, const RasterGrid& reference,
    const PixelWindow& window, const ClassMap& class_map,
    double min_visible = 0.2, bool pixel_count_visibility = false);

/// Tile an orthomosaic/DSM pair over the AOIs. Windows sit on a stride of
/// tile_size * (1 - overlap), anchored at the AOI-union bounding box origin,
/// enumerated row-major; windows that do not fully fit in the raster are
/// not emitted. Pixels outside every AOI are blacked out (RGB (0,0,0), DSM
/// nodata) before the black-fraction test. A window is emitted iff its
/// black fraction is <= black_threshold and at least one label survives
/// clipping. Per-tile rasters land in out_dir unless manifest_only is set.
TileManifest generate_tiles(const RasterGrid& rgb, const RasterGrid& dsm,
                            std::span<const Polygon> aoi,
                            std::span<const CrownAnnotation> annotations,
                            const ClassMap& class_map,
                            const TilingParams& params,
                            const std::filesystem::path& out_dir);

struct SplitRegion {
  Polygon polygon;  // CRS coordinates
  Split split = Split::train;
};

/// Assign each tile to the split whose region contains its geographic
/// center. A tile whose geo footprint overlaps regions of two different
/// splits is marked unassigned. Throws ValidationError when regions of
/// different splits overlap each other.
void assign_splits(TileManifest& manifest,
                   std::span<const SplitRegion> regions);

struct SplitValidation {
  bool ok = true;
  /// classes x splits (train, val, test) label counts.
  std::vector<std::array<std::int64_t, 3>> label_counts;
  std::array<std::int64_t, 3> tile_counts{0, 0, 0};
  std::int64_t unassigned_tiles = 0;
  std::vector<std::string> failures;  // "class 'x' absent from split 'y'"
};

SplitValidation validate_splits(const TileManifest& manifest);

// GeoJSON ingestion. Annotations: polygon features with properties
// `species` and `id` (optional `site`). AOIs: bare polygon features.
// Split regions: polygon features with property `split` in {train,val,test}.
std::vector<CrownAnnotation> read_annotations_geojson(
    const std::filesystem::path& path);
std::vector<Polygon> read_aoi_geojson(const std::filesystem::path& path);
std::vector<SplitRegion> read_split_regions_geojson(
    const std::filesystem::path& path);

/// Write manifest.jsonl (one tile per line) and dataset.json (class map,
/// parameters, totals) into dir.
void write_manifest(const TileManifest& manifest,
                    const std::filesystem::path& dir);
/// Read back a manifest from its manifest.jsonl path; a sibling
/// dataset.json is loaded when present.
TileManifest read_manifest(const std::filesystem::path& manifest_jsonl);

}  // namespace crownforge
