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

#include "gigadetect/raster.hpp"

#include <algorithm>
#include <cmath>

#include "gigadetect/error.hpp"

namespace gigadetect {

Raster::Raster(int64_t width, int64_t height) : width_(width), height_(height) {
  Require(width >= 1 && height >= 1, "raster dimensions must be >= 1");
  data_.assign(static_cast<size_t>(width * height * kRgbChannels), 0);
}

Raster::Raster(int64_t width, int64_t height, std::vector<uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  Require(width >= 1 && height >= 1, "raster dimensions must be >= 1");
  Require(data_.size() == static_cast<size_t>(width * height * kRgbChannels),
          "raster data length must equal width * height * 3");
}

RasterView Raster::View() const {
  return RasterView(data_.data(), width_, height_, width_ * kRgbChannels);
}

RasterView RasterView::Sub(int64_t col, int64_t row, int64_t width,
                           int64_t height) const {
  Require(col >= 0 && row >= 0 && width >= 1 && height >= 1 &&
              col + width <= width_ && row + height <= height_,
          "sub-view out of raster bounds");
  return RasterView(data_ + row * row_stride_ + col * kRgbChannels, width,
                    height, row_stride_);
}

Raster RasterView::ToRaster() const {
  Raster out(width_, height_);
  const size_t row_bytes = static_cast<size_t>(width_ * kRgbChannels);
  for (int64_t y = 0; y < height_; ++y) {
    std::copy_n(Row(y), row_bytes, out.Row(y));
  }
  return out;
}

void ValidateMeta(const ImageMeta& meta) {
  Require(std::isfinite(meta.transform.gsd) && meta.transform.gsd > 0.0,
          "gsd must be > 0");
  Require(meta.name.find('|') == std::string::npos,
          "image name must not contain '|'");
}

}  // namespace gigadetect
