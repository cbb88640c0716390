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

#ifndef GIGADETECT_TILER_HPP_
#define GIGADETECT_TILER_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gigadetect/raster.hpp"
#include "json.hpp"

namespace gigadetect {

// One sliding-window cutout: top-left offset and size in the parent image.
struct TileSpec {
  int64_t row = 0;
  int64_t col = 0;
  int64_t height = 0;
  int64_t width = 0;

  friend bool operator==(const TileSpec&, const TileSpec&) = default;
};

struct TilePlan {
  std::string image_name;
  int64_t image_width = 0;
  int64_t image_height = 0;
  int64_t window = 0;
  double overlap_frac = 0.0;
  std::vector<TileSpec> tiles;  // row-major: all columns of a row band first
};

inline constexpr double kDefaultOverlap = 0.15;

// stride = floor(window * (1 - overlap)), at least 1.
int64_t TileStride(int64_t window, double overlap_frac);

// Window start offsets along one axis of length `dim`. The last window is
// shifted to end at the image edge; an axis shorter than the window gets a
// single start at 0.
std::vector<int64_t> AxisStarts(int64_t dim, int64_t window,
                                double overlap_frac);

// Throws kInvalidArgument for window < 1, overlap outside [0, 1) or empty
// image dimensions.
TilePlan PlanTiles(int64_t image_width, int64_t image_height, int64_t window,
                   double overlap_frac, std::string image_name = {});

struct TileName {
  std::string image_name;
  TileSpec spec;
  std::string ext;

  friend bool operator==(const TileName&, const TileName&) = default;
};

// "<image>|<row>_<col>_<height>_<width>.<ext>"
std::string FormatTileName(std::string_view image_name, const TileSpec& spec,
                           std::string_view ext);
// Throws kParse naming the offending segment.
TileName ParseTileName(std::string_view name);

// Pixel-exact crop. Throws kInvalidArgument when the spec leaves the raster.
Raster Extract(const Raster& raster, const TileSpec& spec);
// Writes `tile` into `dst` at the spec offset.
void Embed(Raster& dst, const Raster& tile, const TileSpec& spec);

nlohmann::json TilePlanToJson(const TilePlan& plan);
TilePlan TilePlanFromJson(const nlohmann::json& j);

}  // namespace gigadetect

#endif  // GIGADETECT_TILER_HPP_
