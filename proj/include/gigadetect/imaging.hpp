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

#ifndef GIGADETECT_IMAGING_HPP_
#define GIGADETECT_IMAGING_HPP_

#include <filesystem>
#include <vector>

#include "gigadetect/kernels.hpp"
#include "gigadetect/raster.hpp"

namespace gigadetect {

struct LoadedImage {
  Raster raster;
  ImageMeta meta;
  bool sidecar_found = false;
};

// Reads an 8-bit RGB PNG or TIFF (format sniffed from the file header) and
// its optional `<path>.meta.json` sidecar. Without a sidecar the meta
// defaults to gsd 1.0 at origin (0, 0) and a warning is logged.
//
// Errors: kIo (unreadable), kUnsupportedFormat, kUnsupportedBitDepth,
// kMalformedSidecar.
LoadedImage LoadImage(const std::filesystem::path& path);

// Writes PNG or TIFF depending on the extension (.png, .tif, .tiff) plus the
// sidecar.
void SaveImage(const Raster& raster, const ImageMeta& meta,
               const std::filesystem::path& path);

std::filesystem::path SidecarPath(const std::filesystem::path& image_path);
void WriteSidecar(const ImageMeta& meta, const std::filesystem::path& path);
// Returns false when the sidecar file does not exist.
bool ReadSidecar(const std::filesystem::path& path, ImageMeta& meta);

// Output dimension of an axis after resampling from src_gsd to dst_gsd:
// floor(dim * src / dst), tolerant of binary rounding of decimal GSDs.
int64_t DegradedDim(int64_t dim, double src_gsd, double dst_gsd);

// Gaussian low-pass (sigma = ratio / 2 px, radius ceil(3 sigma), reflect
// border) followed by area-average subsampling. dst == src returns a copy.
// Throws kInvalidArgument when dst_gsd < src_gsd or the result is empty.
Raster Degrade(RasterView raster, double src_gsd, double dst_gsd,
               kernels::Exec exec = kernels::Exec::kParallel);

// Degraded ground sample distances, meters per pixel, excluding the 0.15 m
// original.
std::vector<double> GsdLadder();
// The original 0.15 m followed by GsdLadder(): thirteen rungs.
std::vector<double> FullGsdLadder();

inline constexpr double kNativeCowcGsd = 0.15;

double ObjectPixelExtent(double object_size_m, double gsd);

}  // namespace gigadetect

#endif  // GIGADETECT_IMAGING_HPP_
