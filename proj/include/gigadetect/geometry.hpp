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

#ifndef GIGADETECT_GEOMETRY_HPP_
#define GIGADETECT_GEOMETRY_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gigadetect {

// Axis-aligned box in continuous pixel coordinates, x right and y down.
// Half-open semantics: area = (xmax - xmin) * (ymax - ymin).
struct PixelBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double Width() const { return xmax - xmin; }
  double Height() const { return ymax - ymin; }
  double Area() const { return Width() * Height(); }
  double CenterX() const { return 0.5 * (xmin + xmax); }
  double CenterY() const { return 0.5 * (ymin + ymax); }
  bool IsValid() const { return xmin <= xmax && ymin <= ymax; }

  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

// Pixel offset of the tile a detection came from, in that tile's raster frame.
struct TileOrigin {
  int64_t row = 0;
  int64_t col = 0;

  friend bool operator==(const TileOrigin&, const TileOrigin&) = default;
};

struct Detection {
  int class_id = 0;
  double confidence = 0.0;
  PixelBox box;
  std::string scale_id;
  std::optional<TileOrigin> tile_origin;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// North-up affine transform without rotation; gsd is meters per pixel.
struct GeoTransform {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double gsd = 1.0;
};

// World-coordinate box. geo_ymin corresponds to pixel ymin, so for a north-up
// raster geo_ymin >= geo_ymax.
struct GeoBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;
};

double Iou(const PixelBox& a, const PixelBox& b);

// Strict weak ordering used everywhere a canonical detection order is needed:
// confidence descending, then (class_id, xmin, ymin, xmax, ymax) ascending,
// then provenance so that exact duplicates from different tiles still order
// deterministically.
bool CanonicalLess(const Detection& a, const Detection& b);

void CanonicalSort(std::vector<Detection>& dets);

// Greedy non-maximal suppression. Output is sorted canonically and depends
// only on the input multiset. Throws kInvalidArgument when iou_threshold is
// outside [0, 1].
std::vector<Detection> Nms(std::span<const Detection> dets,
                           double iou_threshold, bool per_class = true);

GeoBox PixelToGeo(const PixelBox& box, const GeoTransform& t);
PixelBox GeoToPixel(const GeoBox& box, const GeoTransform& t);

PixelBox ClipBox(const PixelBox& box, double width, double height);

}  // namespace gigadetect

#endif  // GIGADETECT_GEOMETRY_HPP_
