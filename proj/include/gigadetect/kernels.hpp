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

// Numeric kernels of the forward pass. Each data-parallel kernel has an
// OpenMP path and a serial path that produce bit-identical results (the
// per-element summation order does not depend on the thread schedule).
// Conv2dDirect is the plain nested-loop reference the fast path is tested
// and benchmarked against.

#ifndef GIGADETECT_KERNELS_HPP_
#define GIGADETECT_KERNELS_HPP_

#include <vector>

#include "gigadetect/tensor.hpp"

namespace gigadetect::kernels {

enum class Exec { kSerial, kParallel };

inline constexpr float kLeakySlope = 0.1f;
inline constexpr float kBatchNormEpsilon = 1e-5f;

struct ConvParams {
  int filters = 0;
  int size = 1;
  int in_channels = 0;
  // [filter][channel][ky][kx]
  std::vector<float> weights;
  // One per filter; zeros when a batch norm supplies the bias.
  std::vector<float> bias;
};

// Weights rearranged into 16-column panels of the (size*size*C) x filters
// matrix so the GEMM micro-kernel streams them contiguously.
struct PackedConv {
  int filters = 0;
  int size = 1;
  int in_channels = 0;
  std::vector<float> panels;
  std::vector<float> bias;
};

inline constexpr int kPanelWidth = 16;

PackedConv Pack(const ConvParams& params);

// Stride 1, same padding (size / 2 zeros on each side). Throws kShape when
// x.c() != in_channels.
Tensor Conv2d(const Tensor& x, const PackedConv& conv,
              Exec exec = Exec::kParallel);
Tensor Conv2d(const Tensor& x, const ConvParams& params,
              Exec exec = Exec::kParallel);

Tensor Conv2dDirect(const Tensor& x, const ConvParams& params);

// 2x2 window, stride 2; output floor(h/2) x floor(w/2) x c.
Tensor Maxpool2x2(const Tensor& x, Exec exec = Exec::kParallel);

struct BatchNormParams {
  std::vector<float> scale;
  std::vector<float> bias;
  std::vector<float> mean;
  std::vector<float> variance;
};

inline float Leaky(float v, float slope = kLeakySlope) {
  return v > 0.0f ? v : slope * v;
}

// In place: y = scale * (x - mean) / sqrt(var + eps) + bias, then leaky.
void BatchNormLeaky(Tensor& x, const BatchNormParams& bn,
                    Exec exec = Exec::kParallel);

// 2x2 blocks to channels. Output channel (dy * 2 + dx) * c + ch holds input
// (2y + dy, 2x + dx, ch). Requires even h and w.
Tensor SpaceToDepth(const Tensor& x);
Tensor DepthToSpace(const Tensor& x);

// Channels of `first` followed by channels of `second`; spatial dims must
// agree.
Tensor ConcatChannels(const Tensor& first, const Tensor& second);

}  // namespace gigadetect::kernels

#endif  // GIGADETECT_KERNELS_HPP_
