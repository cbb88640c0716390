/* Copyright 2026 The gigadetect Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef GIGADETECT_STITCHER_HPP_
#define GIGADETECT_STITCHER_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gigadetect/geometry.hpp"
#include "gigadetect/raster.hpp"
#include "gigadetect/tiler.hpp"

namespace gigadetect {

inline constexpr double kDefaultMergeIou = 0.5;

// Detections of one image, all in that image's native pixel frame.
struct DetectionList {
  std::string image_name;
  std::vector<Detection> detections;
};

// Merged result: canonical order, every box inside the image.
struct GlobalDetectionSet {
  std::string image_name;
  std::vector<Detection> detections;
};

// Maps tile-frame boxes to the native image frame:
// native = (tile box + (tile.col, tile.row)) * downsample_factor, clipped to
// [0, image_width] x [0, image_height]. Each output keeps its tile origin as
// provenance.
std::vector<Detection> Globalize(std::span<const Detection> dets,
                                 const TileSpec& tile, int downsample_factor,
                                 double image_width, double image_height);

// Concatenates, sorts canonically and applies per-class NMS. Throws
// kInvalidArgument when the lists name different images.
GlobalDetectionSet Merge(std::span<const DetectionList> sets,
                         double nms_iou = kDefaultMergeIou);

struct ClassCatalog {
  std::vector<std::string> names;

  // "class_<id>" for ids without a name.
  std::string Name(int class_id) const;
  // -1 when unknown.
  int Id(const std::string& name) const;
};

// airplane, boat, building, car, airport.
ClassCatalog DefaultClasses();

// One parsed JSON Lines record.
struct DetectionRecord {
  std::string image;
  std::string class_name;
  Detection detection;
  GeoBox geo;
};

// JSON Lines, one object per detection with keys image, class_id, class_name,
// confidence, xmin, ymin, xmax, ymax, geo_xmin, geo_ymin, geo_xmax, geo_ymax,
// scale_id in that order.
std::string FormatDetectionLine(const std::string& image, const Detection& det,
                                const GeoTransform& transform,
                                const ClassCatalog& classes);
void WriteDetections(const GlobalDetectionSet& set, const ImageMeta& meta,
                     const ClassCatalog& classes,
                     const std::filesystem::path& path);
// Throws kIo / kSchema.
std::vector<DetectionRecord> ReadDetectionRecords(
    const std::filesystem::path& path);
// Groups records by image, in order of first appearance.
std::vector<DetectionList> ReadDetectionLists(
    const std::filesystem::path& path);
// Single-image file; throws kSchema when records name several images.
GlobalDetectionSet ReadDetections(const std::filesystem::path& path);

void WriteDetectionsCsv(const GlobalDetectionSet& set, const ImageMeta& meta,
                        const ClassCatalog& classes,
                        const std::filesystem::path& path);

}  // namespace gigadetect

#endif  // GIGADETECT_STITCHER_HPP_
