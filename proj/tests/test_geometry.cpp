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
#include "gigadetect/geometry.hpp"
#include "test_util.hpp"

namespace gigadetect {
namespace {

using testing::Gen;
using testing::MakeDet;

// Counts unit cells covered by integer boxes.
double CellIou(int ax0, int ay0, int ax1, int ay1, int bx0, int by0, int bx1,
               int by1) {
  int inter = 0, uni = 0;
  for (int y = std::min(ay0, by0); y < std::max(ay1, by1); ++y) {
    for (int x = std::min(ax0, bx0); x < std::max(ax1, bx1); ++x) {
      const bool in_a = x >= ax0 && x < ax1 && y >= ay0 && y < ay1;
      const bool in_b = x >= bx0 && x < bx1 && y >= by0 && y < by1;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni == 0 ? 0.0 : double(inter) / uni;
}

TEST(Iou, IdenticalBoxesGiveOne) {
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
}

TEST(Iou, DisjointBoxesGiveZero) {
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0);
}

TEST(Iou, HalfShiftedSquaresMatchCellCount) {
  const double oracle = CellIou(0, 0, 2, 2, 1, 0, 3, 2);
  EXPECT_DOUBLE_EQ(oracle, 2.0 / 6.0);
  EXPECT_NEAR(Iou({0, 0, 2, 2}, {1, 0, 3, 2}), oracle, 1e-15);
}

TEST(Iou, DegenerateBoxesGiveZero) {
  EXPECT_EQ(Iou({5, 5, 5, 5}, {5, 5, 5, 5}), 0.0);
  EXPECT_EQ(Iou({0, 0, 0, 10}, {0, 0, 10, 10}), 0.0);
}

TEST(Iou, TouchingEdgesDoNotOverlap) {
  EXPECT_EQ(Iou({0, 0, 10, 10}, {10, 0, 20, 10}), 0.0);
}

TEST(IouProperty, AgreesWithCellCountingOnIntegerBoxes) {
  Gen g(11);
  for (int i = 0; i < 2000; ++i) {
    int a[4], b[4];
    for (int* v : {a, b}) {
      v[0] = int(g.Int(0, 15));
      v[1] = int(g.Int(0, 15));
      v[2] = v[0] + int(g.Int(1, 8));
      v[3] = v[1] + int(g.Int(1, 8));
    }
    const double expect =
        CellIou(a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]);
    EXPECT_NEAR(Iou({double(a[0]), double(a[1]), double(a[2]), double(a[3])},
                    {double(b[0]), double(b[1]), double(b[2]), double(b[3])}),
                expect, 1e-12);
  }
}

TEST(IouProperty, SymmetricAndBounded) {
  Gen g(12);
  for (int i = 0; i < 5000; ++i) {
    const PixelBox a = g.Box(), b = g.Box();
    const double ab = Iou(a, b);
    EXPECT_EQ(ab, Iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_DOUBLE_EQ(Iou(a, a), 1.0);
  }
}

TEST(Nms, DuplicateKeepsHigherConfidence) {
  const std::vector<Detection> in = {MakeDet(0, 0.8, {0, 0, 10, 10}),
                                     MakeDet(0, 0.9, {0, 0, 10, 10})};
  const auto out = Nms(in, 0.5);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].confidence, 0.9);
}

TEST(Nms, EmptyInput) { EXPECT_TRUE(Nms({}, 0.5).empty()); }

TEST(Nms, ThreeBoxExample) {
  const Detection a = MakeDet(0, 0.9, {0, 0, 10, 10});
  const Detection b = MakeDet(0, 0.8, {1, 1, 11, 11});
  const Detection c = MakeDet(0, 0.7, {100, 100, 110, 110});
  EXPECT_NEAR(Iou(a.box, b.box), CellIou(0, 0, 10, 10, 1, 1, 11, 11), 1e-15);
  EXPECT_NEAR(Iou(a.box, b.box), 81.0 / 119.0, 1e-15);
  const auto out = Nms(std::vector{b, c, a}, 0.5);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], a);
  EXPECT_EQ(out[1], c);
}

TEST(Nms, PerClassKeepsCrossClassOverlap) {
  const std::vector<Detection> in = {MakeDet(0, 0.9, {0, 0, 10, 10}),
                                     MakeDet(1, 0.8, {0, 0, 10, 10})};
  EXPECT_EQ(Nms(in, 0.5).size(), 2u);
  EXPECT_EQ(Nms(in, 0.5, /*per_class=*/false).size(), 1u);
}

TEST(Nms, RejectsThresholdOutsideUnitInterval) {
  try {
    Nms({}, 1.5);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  EXPECT_THROW(Nms({}, -0.1), Error);
}

TEST(Nms, EqualConfidenceTieBreaksOnClassThenCoordinates) {
  const Detection a = MakeDet(0, 0.5, {2, 0, 12, 10});
  const Detection b = MakeDet(0, 0.5, {1, 0, 11, 10});
  const auto out = Nms(std::vector{a, b}, 0.5);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], b);
}

TEST(NmsProperty, IdempotentOrderFreeAndBounded) {
  Gen g(13);
  for (int trial = 0; trial < 2000; ++trial) {
    const double thr = double(g.Int(0, 10)) / 10.0;
    const bool per_class = g.Coin();
    std::vector<Detection> in;
    const int64_t n = g.Int(0, 25);
    for (int64_t i = 0; i < n; ++i) in.push_back(g.Det(3, 60.0));
    const auto out = Nms(in, thr, per_class);

    EXPECT_EQ(Nms(out, thr, per_class), out);
    auto shuffled = in;
    std::shuffle(shuffled.begin(), shuffled.end(), g.engine());
    EXPECT_EQ(Nms(shuffled, thr, per_class), out);
    for (size_t i = 0; i < out.size(); ++i) {
      for (size_t j = i + 1; j < out.size(); ++j) {
        if (per_class && out[i].class_id != out[j].class_id) continue;
        EXPECT_LE(Iou(out[i].box, out[j].box), thr);
      }
    }
    if (!in.empty()) {
      ASSERT_FALSE(out.empty());
      const double top = std::max_element(in.begin(), in.end(),
                                          [](const auto& x, const auto& y) {
                                            return x.confidence < y.confidence;
                                          })->confidence;
      EXPECT_EQ(out.front().confidence, top);
    }
    EXPECT_TRUE(std::is_sorted(out.begin(), out.end(), CanonicalLess));
  }
}

TEST(PixelToGeo, OriginMapsToWorldOrigin) {
  const GeoBox g = PixelToGeo({0, 0, 0, 0}, {100, 200, 0.5});
  EXPECT_EQ(g.xmin, 100);
  EXPECT_EQ(g.ymin, 200);
  EXPECT_EQ(g.xmax, 100);
  EXPECT_EQ(g.ymax, 200);
}

TEST(PixelToGeo, LinearMap) {
  const GeoBox g = PixelToGeo({2, 4, 2, 4}, {0, 0, 0.5});
  EXPECT_EQ(g.xmin, 1);
  EXPECT_EQ(g.ymin, -2);
  EXPECT_EQ(g.xmax, 1);
  EXPECT_EQ(g.ymax, -2);
}

TEST(PixelToGeo, AffineExample) {
  const GeoBox g = PixelToGeo({10, 10, 20, 20}, {500, 500, 0.3});
  EXPECT_NEAR(g.xmin, 503, 1e-9);
  EXPECT_NEAR(g.ymin, 497, 1e-9);
  EXPECT_NEAR(g.xmax, 506, 1e-9);
  EXPECT_NEAR(g.ymax, 494, 1e-9);
}

TEST(PixelToGeoProperty, RoundTrip) {
  Gen g(14);
  for (int i = 0; i < 5000; ++i) {
    const GeoTransform t{g.Uniform(-1e5, 1e5), g.Uniform(-1e5, 1e5),
                         g.Uniform(0.1, 5)};
    const PixelBox b = g.Box(20000, 500);
    const PixelBox r = GeoToPixel(PixelToGeo(b, t), t);
    EXPECT_NEAR(r.xmin, b.xmin, 1e-9);
    EXPECT_NEAR(r.ymin, b.ymin, 1e-9);
    EXPECT_NEAR(r.xmax, b.xmax, 1e-9);
    EXPECT_NEAR(r.ymax, b.ymax, 1e-9);
  }
}

TEST(ClipBox, ClampsToImage) {
  EXPECT_EQ(ClipBox({-5, -5, 5, 5}, 100, 100), (PixelBox{0, 0, 5, 5}));
  EXPECT_EQ(ClipBox({95, 95, 105, 105}, 100, 100),
            (PixelBox{95, 95, 100, 100}));
}

}  // namespace
}  // namespace gigadetect
