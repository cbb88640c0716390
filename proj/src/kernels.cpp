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

#include "gigadetect/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gigadetect/error.hpp"

namespace gigadetect {

std::string Shape3::ToString() const {
  return fmt::format("{}x{}x{}", h, w, c);
}

Tensor::Tensor(Shape3 shape) : shape_(shape), values_(shape.Size(), 0.0f) {}

Tensor::Tensor(Shape3 shape, std::vector<float> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.Size()) {
    Fail(ErrorCode::kShape,
         fmt::format("tensor {} needs {} values, got {}", shape_.ToString(),
                     shape_.Size(), values_.size()));
  }
}

bool Tensor::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](float v) { return std::isfinite(v); });
}

namespace kernels {
namespace {

constexpr int kRowBlock = 32;
constexpr int kMicroRows = 4;

void CheckParams(const ConvParams& p) {
  const size_t expected = static_cast<size_t>(p.filters) * p.in_channels *
                          p.size * p.size;
  if (p.filters < 1 || p.in_channels < 1 || p.size < 1 ||
      p.size % 2 == 0) {
    Fail(ErrorCode::kShape, "conv needs filters, channels >= 1 and odd size");
  }
  if (p.weights.size() != expected || p.bias.size() != size_t(p.filters)) {
    Fail(ErrorCode::kShape,
         fmt::format("conv weights: expected {} weights and {} biases, got "
                     "{} and {}",
                     expected, p.filters, p.weights.size(), p.bias.size()));
  }
  const auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(p.weights.begin(), p.weights.end(), finite) ||
      !std::all_of(p.bias.begin(), p.bias.end(), finite)) {
    Fail(ErrorCode::kNumeric, "conv parameters contain non-finite values");
  }
}

void CheckInput(const Tensor& x, int in_channels) {
  if (x.c() != in_channels) {
    Fail(ErrorCode::kShape,
         fmt::format("conv expects {} input channels, got tensor {}",
                     in_channels, x.shape().ToString()));
  }
}

// Fills `rows` rows of the im2col matrix for output pixels starting at m0.
void Im2ColBlock(const Tensor& x, int size, int64_t m0, int rows,
                 float* block) {
  const int h = x.h(), w = x.w(), c = x.c();
  const int pad = size / 2;
  const int64_t k_total = int64_t(size) * size * c;
  for (int i = 0; i < kRowBlock; ++i) {
    float* row = block + i * k_total;
    if (i >= rows) {
      std::fill_n(row, k_total, 0.0f);
      continue;
    }
    const int64_t m = m0 + i;
    const int y = int(m / w), xpos = int(m % w);
    for (int ky = 0; ky < size; ++ky) {
      const int sy = y + ky - pad;
      for (int kx = 0; kx < size; ++kx) {
        const int sx = xpos + kx - pad;
        float* dst = row + (ky * size + kx) * c;
        if (sy < 0 || sy >= h || sx < 0 || sx >= w) {
          std::fill_n(dst, c, 0.0f);
        } else {
          std::copy_n(x.Pixel(sy, sx), c, dst);
        }
      }
    }
  }
}

// acc[r][j] = sum_k a_r[k] * panel[k][j] for four rows at once.
inline void MicroKernel(const float* a, int64_t k_total, const float* panel,
                        float acc[kMicroRows][kPanelWidth]) {
  const float* a0 = a;
  const float* a1 = a + k_total;
  const float* a2 = a + 2 * k_total;
  const float* a3 = a + 3 * k_total;
  for (int r = 0; r < kMicroRows; ++r) {
    for (int j = 0; j < kPanelWidth; ++j) acc[r][j] = 0.0f;
  }
  for (int64_t k = 0; k < k_total; ++k) {
    const float* b = panel + k * kPanelWidth;
    const float v0 = a0[k], v1 = a1[k], v2 = a2[k], v3 = a3[k];
    for (int j = 0; j < kPanelWidth; ++j) {
      acc[0][j] += v0 * b[j];
      acc[1][j] += v1 * b[j];
      acc[2][j] += v2 * b[j];
      acc[3][j] += v3 * b[j];
    }
  }
}

}  // namespace

PackedConv Pack(const ConvParams& params) {
  CheckParams(params);
  const int s = params.size, c = params.in_channels, n = params.filters;
  const int64_t k_total = int64_t(s) * s * c;
  const int panels = (n + kPanelWidth - 1) / kPanelWidth;
  PackedConv packed{n, s, c,
                    std::vector<float>(size_t(panels) * k_total * kPanelWidth,
                                       0.0f),
                    params.bias};
  for (int f = 0; f < n; ++f) {
    const int p = f / kPanelWidth, j = f % kPanelWidth;
    for (int ch = 0; ch < c; ++ch) {
      for (int ky = 0; ky < s; ++ky) {
        for (int kx = 0; kx < s; ++kx) {
          const int64_t k = int64_t(ky * s + kx) * c + ch;
          const size_t src = ((size_t(f) * c + ch) * s + ky) * s + kx;
          packed.panels[(size_t(p) * k_total + k) * kPanelWidth + j] =
              params.weights[src];
        }
      }
    }
  }
  return packed;
}

Tensor Conv2d(const Tensor& x, const PackedConv& conv, Exec exec) {
  CheckInput(x, conv.in_channels);
  const int h = x.h(), w = x.w(), n = conv.filters;
  const int64_t k_total = int64_t(conv.size) * conv.size * conv.in_channels;
  const int64_t m_total = int64_t(h) * w;
  const int panels = (n + kPanelWidth - 1) / kPanelWidth;
  const int64_t blocks = (m_total + kRowBlock - 1) / kRowBlock;

  Tensor out({h, w, n});
  float* out_data = out.mutable_values().data();

#pragma omp parallel if (exec == Exec::kParallel)
  {
    std::vector<float> block(size_t(kRowBlock) * k_total);
    float acc[kMicroRows][kPanelWidth];
#pragma omp for schedule(static)
    for (int64_t b = 0; b < blocks; ++b) {
      const int64_t m0 = b * kRowBlock;
      const int rows = int(std::min<int64_t>(kRowBlock, m_total - m0));
      Im2ColBlock(x, conv.size, m0, rows, block.data());
      for (int p = 0; p < panels; ++p) {
        const float* panel =
            conv.panels.data() + size_t(p) * k_total * kPanelWidth;
        const int cols = std::min(kPanelWidth, n - p * kPanelWidth);
        for (int i = 0; i < rows; i += kMicroRows) {
          MicroKernel(block.data() + i * k_total, k_total, panel, acc);
          for (int r = 0; r < kMicroRows && i + r < rows; ++r) {
            float* dst = out_data + (m0 + i + r) * n + p * kPanelWidth;
            for (int j = 0; j < cols; ++j) {
              dst[j] = acc[r][j] + conv.bias[p * kPanelWidth + j];
            }
          }
        }
      }
    }
  }
  return out;
}

Tensor Conv2d(const Tensor& x, const ConvParams& params, Exec exec) {
  return Conv2d(x, Pack(params), exec);
}

Tensor Conv2dDirect(const Tensor& x, const ConvParams& params) {
  CheckParams(params);
  CheckInput(x, params.in_channels);
  const int h = x.h(), w = x.w(), c = x.c(), s = params.size;
  const int pad = s / 2;
  Tensor out({h, w, params.filters});
  for (int y = 0; y < h; ++y) {
    for (int xpos = 0; xpos < w; ++xpos) {
      for (int f = 0; f < params.filters; ++f) {
        float sum = params.bias[f];
        for (int ch = 0; ch < c; ++ch) {
          for (int ky = 0; ky < s; ++ky) {
            const int sy = y + ky - pad;
            if (sy < 0 || sy >= h) continue;
            for (int kx = 0; kx < s; ++kx) {
              const int sx = xpos + kx - pad;
              if (sx < 0 || sx >= w) continue;
              sum += x.At(sy, sx, ch) *
                     params.weights[((size_t(f) * c + ch) * s + ky) * s + kx];
            }
          }
        }
        out.At(y, xpos, f) = sum;
      }
    }
  }
  return out;
}

Tensor Maxpool2x2(const Tensor& x, Exec exec) {
  const int oh = x.h() / 2, ow = x.w() / 2, c = x.c();
  if (oh < 1 || ow < 1) {
    Fail(ErrorCode::kShape,
         fmt::format("maxpool needs at least 2x2 input, got {}",
                     x.shape().ToString()));
  }
  Tensor out({oh, ow, c});
#pragma omp parallel for if (exec == Exec::kParallel) schedule(static)
  for (int y = 0; y < oh; ++y) {
    for (int xpos = 0; xpos < ow; ++xpos) {
      const float* p00 = x.Pixel(2 * y, 2 * xpos);
      const float* p01 = x.Pixel(2 * y, 2 * xpos + 1);
      const float* p10 = x.Pixel(2 * y + 1, 2 * xpos);
      const float* p11 = x.Pixel(2 * y + 1, 2 * xpos + 1);
      float* dst = out.Pixel(y, xpos);
      for (int ch = 0; ch < c; ++ch) {
        dst[ch] = std::max(std::max(p00[ch], p01[ch]),
                           std::max(p10[ch], p11[ch]));
      }
    }
  }
  return out;
}

void BatchNormLeaky(Tensor& x, const BatchNormParams& bn, Exec exec) {
  const int c = x.c();
  if (bn.scale.size() != size_t(c) || bn.bias.size() != size_t(c) ||
      bn.mean.size() != size_t(c) || bn.variance.size() != size_t(c)) {
    Fail(ErrorCode::kShape,
         fmt::format("batch norm expects {} channels", c));
  }
  std::vector<float> mul(c), add(c);
  for (int ch = 0; ch < c; ++ch) {
    if (!(bn.variance[ch] >= 0.0f)) {
      Fail(ErrorCode::kNumeric, "batch norm variance must be >= 0");
    }
    mul[ch] = bn.scale[ch] / std::sqrt(bn.variance[ch] + kBatchNormEpsilon);
    add[ch] = bn.bias[ch] - bn.mean[ch] * mul[ch];
  }
  float* data = x.mutable_values().data();
  const int64_t pixels = int64_t(x.h()) * x.w();
#pragma omp parallel for if (exec == Exec::kParallel) schedule(static)
  for (int64_t p = 0; p < pixels; ++p) {
    float* px = data + p * c;
    for (int ch = 0; ch < c; ++ch) px[ch] = Leaky(px[ch] * mul[ch] + add[ch]);
  }
}

Tensor SpaceToDepth(const Tensor& x) {
  if (x.h() % 2 != 0 || x.w() % 2 != 0) {
    Fail(ErrorCode::kShape,
         fmt::format("space-to-depth needs even dims, got {}",
                     x.shape().ToString()));
  }
  const int c = x.c();
  Tensor out({x.h() / 2, x.w() / 2, 4 * c});
  for (int y = 0; y < out.h(); ++y) {
    for (int xpos = 0; xpos < out.w(); ++xpos) {
      float* dst = out.Pixel(y, xpos);
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          std::copy_n(x.Pixel(2 * y + dy, 2 * xpos + dx), c,
                      dst + (dy * 2 + dx) * c);
        }
      }
    }
  }
  return out;
}

Tensor DepthToSpace(const Tensor& x) {
  if (x.c() % 4 != 0) {
    Fail(ErrorCode::kShape,
         fmt::format("depth-to-space needs channels divisible by 4, got {}",
                     x.shape().ToString()));
  }
  const int c = x.c() / 4;
  Tensor out({x.h() * 2, x.w() * 2, c});
  for (int y = 0; y < x.h(); ++y) {
    for (int xpos = 0; xpos < x.w(); ++xpos) {
      const float* src = x.Pixel(y, xpos);
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          std::copy_n(src + (dy * 2 + dx) * c, c,
                      out.Pixel(2 * y + dy, 2 * xpos + dx));
        }
      }
    }
  }
  return out;
}

Tensor ConcatChannels(const Tensor& first, const Tensor& second) {
  if (first.h() != second.h() || first.w() != second.w()) {
    Fail(ErrorCode::kShape,
         fmt::format("channel concat needs equal spatial dims, got {} and {}",
                     first.shape().ToString(), second.shape().ToString()));
  }
  const int c1 = first.c(), c2 = second.c();
  Tensor out({first.h(), first.w(), c1 + c2});
  for (int y = 0; y < first.h(); ++y) {
    for (int xpos = 0; xpos < first.w(); ++xpos) {
      float* dst = out.Pixel(y, xpos);
      std::copy_n(first.Pixel(y, xpos), c1, dst);
      std::copy_n(second.Pixel(y, xpos), c2, dst + c1);
    }
  }
  return out;
}

}  // namespace kernels
}  // namespace gigadetect
