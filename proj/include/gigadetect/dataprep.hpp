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

#ifndef GIGADETECT_DATAPREP_HPP_
#define GIGADETECT_DATAPREP_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gigadetect/geometry.hpp"
#include "gigadetect/raster.hpp"

namespace gigadetect {

inline constexpr double kCarSizeMeters = 3.0;
inline constexpr double kFootprintCoverage = 0.9;

struct PointLabel {
  double x = 0.0;
  double y = 0.0;
  int class_id = 0;
};

struct FootprintLabel {
  std::vector<std::pair<double, double>> polygon;
  int class_id = 0;
};

struct LabeledBox {
  int class_id = 0;
  PixelBox box;

  friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

// Square of side object_size_m / gsd centred on the point, clipped to the
// image. Throws kInvalidArgument for non-positive size or gsd.
PixelBox PointToBox(const PointLabel& p, double object_size_m, double gsd,
                    double image_width, double image_height);

// Axis-aligned hull of the polygon with each side scaled by `coverage` about
// its centre. Throws kInvalidArgument for fewer than three vertices, zero
// area, self-intersection, or coverage outside (0, 1].
PixelBox FootprintToBox(const FootprintLabel& f,
                        double coverage = kFootprintCoverage);

bool PolygonSelfIntersects(std::span<const std::pair<double, double>> polygon);

struct RotatedSample {
  Raster image;
  std::vector<LabeledBox> boxes;
};

// Rotates counter-clockwise (as displayed) about the image centre onto a
// canvas just large enough for the result; boxes map to the hull of their
// rotated corners. Multiples of 90 degrees are exact pixel permutations.
RotatedSample RotateSample(const Raster& image,
                           std::span<const LabeledBox> boxes,
                           double angle_degrees);

struct HsvRange {
  double lo = 0.7;
  double hi = 1.3;
};

// Scales saturation and value by factors drawn uniformly from the ranges;
// hue is untouched. Ranges must lie in (0, 4].
Raster HsvJitter(const Raster& image, HsvRange saturation, HsvRange value,
                 uint64_t seed);

// "<class_id> <x_center> <y_center> <width> <height>" per box, geometry
// normalized by image size with six decimals. Throws kInvalidArgument for a
// box outside the image.
std::string FormatLabels(std::span<const LabeledBox> boxes, double image_width,
                         double image_height);
void EmitLabels(std::span<const LabeledBox> boxes, double image_width,
                double image_height, const std::filesystem::path& path);
std::vector<LabeledBox> ParseLabels(const std::string& text,
                                    double image_width, double image_height);

// {0, 90, 180, 270} by default; continuous draws from [0, 360) otherwise.
double SampleRotationAngle(uint64_t seed, bool continuous);

}  // namespace gigadetect

#endif  // GIGADETECT_DATAPREP_HPP_
