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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "gigadetect/error.hpp"
#include "gigadetect/kernels.hpp"
#include "test_util.hpp"

namespace gigadetect {
namespace {

using kernels::Exec;
using testing::Gen;

Tensor RandomTensor(Gen& g, Shape3 s) {
  Tensor t(s);
  for (float& v : t.mutable_values()) v = float(g.Uniform(-1, 1));
  return t;
}

kernels::ConvParams RandomConv(Gen& g, int filters, int size, int channels) {
  kernels::ConvParams p;
  p.filters = filters;
  p.size = size;
  p.in_channels = channels;
  p.weights.resize(size_t(filters) * channels * size * size);
  for (float& w : p.weights) w = float(g.Uniform(-1, 1));
  p.bias.resize(size_t(filters));
  for (float& b : p.bias) b = float(g.Uniform(-1, 1));
  return p;
}

// Same-padded stride-1 convolution summed in double.
Tensor ConvOracle(const Tensor& x, const kernels::ConvParams& p) {
  Tensor y({x.h(), x.w(), p.filters});
  const int pad = p.size / 2;
  for (int oy = 0; oy < x.h(); ++oy) {
    for (int ox = 0; ox < x.w(); ++ox) {
      for (int f = 0; f < p.filters; ++f) {
        double acc = p.bias[size_t(f)];
        for (int c = 0; c < p.in_channels; ++c) {
          for (int ky = 0; ky < p.size; ++ky) {
            for (int kx = 0; kx < p.size; ++kx) {
              const int iy = oy + ky - pad, ix = ox + kx - pad;
              if (iy < 0 || ix < 0 || iy >= x.h() || ix >= x.w()) continue;
              const size_t wi =
                  ((size_t(f) * p.in_channels + c) * p.size + ky) * p.size + kx;
              acc += double(p.weights[wi]) * x.At(iy, ix, c);
            }
          }
        }
        y.At(oy, ox, f) = float(acc);
      }
    }
  }
  return y;
}

float MaxAbsDiff(const Tensor& a, const Tensor& b) {
  EXPECT_EQ(a.shape(), b.shape());
  float m = 0.0f;
  for (size_t i = 0; i < a.values().size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

TEST(Conv2d, MatchesOracleOnRandomSmallInputs) {
  Gen g(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int size = g.Coin() ? 3 : 1;
    const int filters = int(g.Int(1, 40));
    const Tensor x = RandomTensor(g, {8, 8, 3});
    const auto p = RandomConv(g, filters, size, 3);
    const Tensor oracle = ConvOracle(x, p);
    EXPECT_LE(MaxAbsDiff(kernels::Conv2d(x, p, Exec::kParallel), oracle), 1e-5f);
    EXPECT_LE(MaxAbsDiff(kernels::Conv2d(x, p, Exec::kSerial), oracle), 1e-5f);
    EXPECT_LE(MaxAbsDiff(kernels::Conv2dDirect(x, p), oracle), 1e-5f);
  }
}

TEST(Conv2d, SerialAndParallelAreBitIdentical) {
  Gen g(42);
  for (int trial = 0; trial < 10; ++trial) {
    const int c = int(g.Int(1, 70));
    const Tensor x = RandomTensor(g, {int(g.Int(1, 40)), int(g.Int(1, 40)), c});
    const auto p = RandomConv(g, int(g.Int(1, 70)), g.Coin() ? 3 : 1, c);
    const Tensor a = kernels::Conv2d(x, p, Exec::kSerial);
    const Tensor b = kernels::Conv2d(x, p, Exec::kParallel);
    ASSERT_EQ(a.shape(), b.shape());
    EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(),
                           b.values().begin()));
    EXPECT_LE(MaxAbsDiff(a, ConvOracle(x, p)), 1e-4f);
  }
}

TEST(Conv2d, OneByOneKeepsSpatialDims) {
  Gen g(43);
  const Tensor x = RandomTensor(g, {104, 104, 128});
  const Tensor y = kernels::Conv2d(x, RandomConv(g, 64, 1, 128));
  EXPECT_EQ(y.shape(), (Shape3{104, 104, 64}));
}

TEST(Conv2d, ChannelMismatchIsShapeError) {
  Gen g(44);
  try {
    kernels::Conv2d(RandomTensor(g, {4, 4, 3}), RandomConv(g, 2, 3, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
}

TEST(Maxpool, HalvesSpatialDims) {
  const Tensor y = kernels::Maxpool2x2(Tensor({208, 208, 32}));
  EXPECT_EQ(y.shape(), (Shape3{104, 104, 32}));
}

TEST(Maxpool, TakesBlockMaximum) {
  Tensor x({2, 2, 1}, {1.0f, -3.0f, 7.5f, 2.0f});
  EXPECT_EQ(kernels::Maxpool2x2(x).At(0, 0, 0), 7.5f);
}

TEST(Leaky, PiecewiseDefinition) {
  EXPECT_FLOAT_EQ(kernels::Leaky(-1.0f), -0.1f);
  EXPECT_FLOAT_EQ(kernels::Leaky(2.0f), 2.0f);
  EXPECT_FLOAT_EQ(kernels::Leaky(0.0f), 0.0f);
}

TEST(BatchNormLeaky, NormalizesThenActivates) {
  Tensor x({1, 1, 2}, {3.0f, -1.0f});
  kernels::BatchNormParams bn{{2.0f, 1.0f}, {0.5f, 0.0f}, {1.0f, 0.0f},
                              {4.0f, 1.0f}};
  kernels::BatchNormLeaky(x, bn);
  const double y0 = 2.0 * (3.0 - 1.0) / std::sqrt(4.0 + 1e-5) + 0.5;
  const double y1 = 0.1 * (1.0 * (-1.0) / std::sqrt(1.0 + 1e-5));
  EXPECT_NEAR(x.At(0, 0, 0), y0, 1e-6);
  EXPECT_NEAR(x.At(0, 0, 1), y1, 1e-6);
}

TEST(SpaceToDepth, FourByFourIsPermutation) {
  Tensor x({4, 4, 1});
  for (int i = 0; i < 16; ++i) x.mutable_values()[size_t(i)] = float(i);
  const Tensor y = kernels::SpaceToDepth(x);
  EXPECT_EQ(y.shape(), (Shape3{2, 2, 4}));
  std::vector<float> vals(y.values().begin(), y.values().end());
  std::sort(vals.begin(), vals.end());
  for (int i = 0; i < 16; ++i) EXPECT_EQ(vals[size_t(i)], float(i));
  // Channel (dy * 2 + dx) holds input (2y + dy, 2x + dx).
  EXPECT_EQ(y.At(1, 0, 3), x.At(3, 1, 0));
  EXPECT_EQ(y.At(0, 1, 1), x.At(0, 3, 0));
}

TEST(SpaceToDepthProperty, InverseRestoresInput) {
  Gen g(45);
  for (int i = 0; i < 50; ++i) {
    const Tensor x = RandomTensor(
        g, {2 * int(g.Int(1, 10)), 2 * int(g.Int(1, 10)), int(g.Int(1, 9))});
    const Tensor back = kernels::DepthToSpace(kernels::SpaceToDepth(x));
    ASSERT_EQ(back.shape(), x.shape());
    EXPECT_TRUE(std::equal(x.values().begin(), x.values().end(),
                           back.values().begin()));
  }
}

TEST(SpaceToDepth, OddDimsAreShapeErrors) {
  EXPECT_THROW(kernels::SpaceToDepth(Tensor({3, 4, 1})), Error);
}

TEST(ConcatChannels, FirstOperandChannelsLeadAndSpatialMismatchThrows) {
  Tensor a({1, 1, 2}, {1, 2});
  Tensor b({1, 1, 1}, {3});
  const Tensor c = kernels::ConcatChannels(a, b);
  EXPECT_EQ(c.shape(), (Shape3{1, 1, 3}));
  EXPECT_EQ(c.At(0, 0, 2), 3.0f);
  EXPECT_THROW(kernels::ConcatChannels(a, Tensor({2, 1, 1})), Error);
}

}  // namespace
}  // namespace gigadetect
