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

#ifndef GIGADETECT_TENSOR_HPP_
#define GIGADETECT_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gigadetect {

struct Shape3 {
  int h = 0;
  int w = 0;
  int c = 0;

  size_t Size() const { return static_cast<size_t>(h) * w * c; }
  std::string ToString() const;

  friend bool operator==(const Shape3&, const Shape3&) = default;
};

// H x W x C activation array, row-major with channels innermost.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape3 shape);
  Tensor(Shape3 shape, std::vector<float> values);

  const Shape3& shape() const { return shape_; }
  int h() const { return shape_.h; }
  int w() const { return shape_.w; }
  int c() const { return shape_.c; }

  std::span<const float> values() const { return values_; }
  std::span<float> mutable_values() { return values_; }

  float& At(int y, int x, int ch) { return values_[Index(y, x, ch)]; }
  float At(int y, int x, int ch) const { return values_[Index(y, x, ch)]; }
  const float* Pixel(int y, int x) const { return &values_[Index(y, x, 0)]; }
  float* Pixel(int y, int x) { return &values_[Index(y, x, 0)]; }

  bool AllFinite() const;

 private:
  size_t Index(int y, int x, int ch) const {
    return (static_cast<size_t>(y) * shape_.w + x) * shape_.c + ch;
  }

  Shape3 shape_;
  std::vector<float> values_;
};

}  // namespace gigadetect

#endif  // GIGADETECT_TENSOR_HPP_
