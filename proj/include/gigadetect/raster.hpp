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

#ifndef GIGADETECT_RASTER_HPP_
#define GIGADETECT_RASTER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gigadetect/geometry.hpp"

namespace gigadetect {

inline constexpr int kRgbChannels = 3;

class RasterView;

// Owned 8-bit RGB raster, row-major, channels interleaved.
class Raster {
 public:
  Raster() = default;
  // Zero-filled raster; throws kInvalidArgument when either dimension < 1.
  Raster(int64_t width, int64_t height);
  Raster(int64_t width, int64_t height, std::vector<uint8_t> data);

  int64_t width() const { return width_; }
  int64_t height() const { return height_; }
  int channels() const { return kRgbChannels; }
  bool empty() const { return data_.empty(); }

  std::span<const uint8_t> data() const { return data_; }
  std::span<uint8_t> mutable_data() { return data_; }

  uint8_t* Row(int64_t y) { return data_.data() + y * width_ * kRgbChannels; }
  const uint8_t* Row(int64_t y) const {
    return data_.data() + y * width_ * kRgbChannels;
  }
  uint8_t& At(int64_t x, int64_t y, int c) {
    return data_[(y * width_ + x) * kRgbChannels + c];
  }
  uint8_t At(int64_t x, int64_t y, int c) const {
    return data_[(y * width_ + x) * kRgbChannels + c];
  }

  RasterView View() const;

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int64_t width_ = 0;
  int64_t height_ = 0;
  std::vector<uint8_t> data_;
};

// Non-owning window into a Raster. Row stride is in bytes.
class RasterView {
 public:
  RasterView() = default;
  RasterView(const uint8_t* data, int64_t width, int64_t height,
             int64_t row_stride)
      : data_(data), width_(width), height_(height), row_stride_(row_stride) {}

  int64_t width() const { return width_; }
  int64_t height() const { return height_; }
  const uint8_t* Row(int64_t y) const { return data_ + y * row_stride_; }
  uint8_t At(int64_t x, int64_t y, int c) const {
    return Row(y)[x * kRgbChannels + c];
  }

  RasterView Sub(int64_t col, int64_t row, int64_t width,
                 int64_t height) const;
  Raster ToRaster() const;

 private:
  const uint8_t* data_ = nullptr;
  int64_t width_ = 0;
  int64_t height_ = 0;
  int64_t row_stride_ = 0;
};

struct ImageMeta {
  std::string name;
  GeoTransform transform;

  double gsd() const { return transform.gsd; }
};

// Throws kInvalidArgument when gsd <= 0 or the name contains '|'.
void ValidateMeta(const ImageMeta& meta);

}  // namespace gigadetect

#endif  // GIGADETECT_RASTER_HPP_
