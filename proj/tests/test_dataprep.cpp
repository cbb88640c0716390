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

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "gigadetect/dataprep.hpp"
#include "gigadetect/error.hpp"
#include "test_util.hpp"

namespace gigadetect {
namespace {

using testing::Gen;
using testing::TempDir;

TEST(PointToBox, CarAtThirtyCentimetres) {
  EXPECT_EQ(PointToBox({100, 100, 3}, 3.0, 0.30, 1000, 1000),
            (PixelBox{95, 95, 105, 105}));
}

TEST(PointToBox, ClipsAtCorner) {
  EXPECT_EQ(PointToBox({0, 0, 3}, 3.0, 0.30, 1000, 1000),
            (PixelBox{0, 0, 5, 5}));
}

TEST(PointToBox, TwoPixelSide) {
  const PixelBox b = PointToBox({50, 50, 0}, 0.15 * 2, 0.15, 100, 100);
  EXPECT_NEAR(b.Width(), 2.0, 1e-12);
  EXPECT_NEAR(b.Height(), 2.0, 1e-12);
}

TEST(PointToBox, RejectsNonPositiveSize) {
  EXPECT_THROW(PointToBox({1, 1, 0}, 0.0, 0.3, 10, 10), Error);
  EXPECT_THROW(PointToBox({1, 1, 0}, 3.0, 0.0, 10, 10), Error);
}

TEST(PointToBoxProperty, CentredWhenUnclipped) {
  Gen g(81);
  for (int i = 0; i < 1000; ++i) {
    const double gsd = g.Uniform(0.1, 1.0);
    const PointLabel p{g.Uniform(40, 960), g.Uniform(40, 960), 3};
    const PixelBox b = PointToBox(p, 3.0, gsd, 1000, 1000);
    EXPECT_NEAR(b.CenterX(), p.x, 1e-9);
    EXPECT_NEAR(b.CenterY(), p.y, 1e-9);
  }
}

TEST(FootprintToBox, UnitSquareFullCoverage) {
  const FootprintLabel f{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 2};
  EXPECT_EQ(FootprintToBox(f, 1.0), (PixelBox{0, 0, 1, 1}));
}

TEST(FootprintToBox, NinetyPercentPerAxis) {
  const FootprintLabel f{{{0, 0}, {10, 0}, {10, 10}, {0, 10}}, 2};
  const PixelBox b = FootprintToBox(f);
  EXPECT_NEAR(b.xmin, 0.5, 1e-12);
  EXPECT_NEAR(b.ymin, 0.5, 1e-12);
  EXPECT_NEAR(b.xmax, 9.5, 1e-12);
  EXPECT_NEAR(b.ymax, 9.5, 1e-12);
}

TEST(FootprintToBox, LShapeDependsOnlyOnExtent) {
  const FootprintLabel l{{{0, 0}, {10, 0}, {10, 4}, {4, 4}, {4, 20}, {0, 20}},
                         2};
  const FootprintLabel rect{{{0, 0}, {10, 0}, {10, 20}, {0, 20}}, 2};
  EXPECT_EQ(FootprintToBox(l, 0.9), FootprintToBox(rect, 0.9));
}

TEST(FootprintToBox, DegeneratePolygonsAreRejected) {
  EXPECT_THROW(FootprintToBox({{{0, 0}, {1, 1}}, 0}), Error);
  EXPECT_THROW(FootprintToBox({{{0, 0}, {1, 1}, {2, 2}}, 0}), Error);
  // Bow tie.
  EXPECT_THROW(FootprintToBox({{{0, 0}, {10, 10}, {10, 0}, {0, 10}}, 0}),
               Error);
  const FootprintLabel sq{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 0};
  EXPECT_THROW(FootprintToBox(sq, 0.0), Error);
  EXPECT_THROW(FootprintToBox(sq, 1.1), Error);
}

TEST(FootprintToBoxProperty, CoverageMonotone) {
  Gen g(82);
  for (int i = 0; i < 500; ++i) {
    const double x = g.Uniform(0, 100), y = g.Uniform(0, 100);
    const double w = g.Uniform(1, 50), h = g.Uniform(1, 50);
    const FootprintLabel f{{{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}, 0};
    const double a = g.Uniform(0.01, 1.0), b = g.Uniform(0.01, 1.0);
    const PixelBox small = FootprintToBox(f, std::min(a, b));
    const PixelBox big = FootprintToBox(f, std::max(a, b));
    EXPECT_GE(small.xmin, big.xmin - 1e-12);
    EXPECT_GE(small.ymin, big.ymin - 1e-12);
    EXPECT_LE(small.xmax, big.xmax + 1e-12);
    EXPECT_LE(small.ymax, big.ymax + 1e-12);
  }
}

TEST(RotateSample, ZeroIsIdentity) {
  Gen g(83);
  const Raster r = g.RandomRaster(23, 11);
  const std::vector<LabeledBox> boxes = {{1, {2, 3, 7, 9}}};
  const RotatedSample s = RotateSample(r, boxes, 0.0);
  EXPECT_EQ(s.image, r);
  EXPECT_EQ(s.boxes, boxes);
}

TEST(RotateSample, HalfTurnIsPointSymmetry) {
  Gen g(84);
  const Raster r = g.RandomRaster(23, 11);
  const std::vector<LabeledBox> boxes = {{1, {2, 3, 7, 9}}};
  const RotatedSample s = RotateSample(r, boxes, 180.0);
  ASSERT_EQ(s.image.width(), 23);
  ASSERT_EQ(s.image.height(), 11);
  EXPECT_EQ(s.boxes[0].box, (PixelBox{23 - 7, 11 - 9, 23 - 2, 11 - 3}));
  for (int c = 0; c < 3; ++c) EXPECT_EQ(s.image.At(0, 0, c), r.At(22, 10, c));
}

TEST(RotateSample, QuarterTurnSwapsBoxSides) {
  Gen g(85);
  const Raster r = g.RandomRaster(30, 20);
  const std::vector<LabeledBox> boxes = {{0, {2, 3, 12, 7}}};
  const RotatedSample s = RotateSample(r, boxes, 90.0);
  EXPECT_EQ(s.image.width(), 20);
  EXPECT_EQ(s.image.height(), 30);
  EXPECT_DOUBLE_EQ(s.boxes[0].box.Width(), 4.0);
  EXPECT_DOUBLE_EQ(s.boxes[0].box.Height(), 10.0);
}

TEST(RotateSample, FourQuarterTurnsAreExactIdentity) {
  Gen g(86);
  for (int i = 0; i < 20; ++i) {
    const Raster r = g.RandomRaster(g.Int(2, 40), g.Int(2, 40));
    const double x = g.Uniform(0, double(r.width()) - 1);
    const double y = g.Uniform(0, double(r.height()) - 1);
    std::vector<LabeledBox> boxes = {{0, {x, y, x + 1, y + 1}}};
    RotatedSample s{r, boxes};
    for (int k = 0; k < 4; ++k) s = RotateSample(s.image, s.boxes, 90.0);
    EXPECT_EQ(s.image, r);
    EXPECT_NEAR(s.boxes[0].box.xmin, boxes[0].box.xmin, 1e-9);
    EXPECT_NEAR(s.boxes[0].box.ymax, boxes[0].box.ymax, 1e-9);
  }
}

TEST(RotateSample, FullTurnIsIdentity) {
  Gen g(87);
  const Raster r = g.RandomRaster(17, 9);
  const std::vector<LabeledBox> boxes = {{0, {1, 1, 4, 5}}};
  const RotatedSample s = RotateSample(r, boxes, 360.0);
  EXPECT_EQ(s.image, r);
  EXPECT_NEAR(s.boxes[0].box.xmin, 1.0, 1.0);
  EXPECT_NEAR(s.boxes[0].box.ymax, 5.0, 1.0);
}

TEST(RotateSample, ObliqueAngleExpandsCanvasAndContainsBoxes) {
  Gen g(88);
  const Raster r = g.RandomRaster(40, 20);
  const std::vector<LabeledBox> boxes = {{0, {5, 5, 15, 10}}};
  const RotatedSample s = RotateSample(r, boxes, 30.0);
  const double c = std::cos(M_PI / 6), sn = std::sin(M_PI / 6);
  EXPECT_EQ(s.image.width(), int64_t(std::ceil(40 * c + 20 * sn - 1e-9)));
  EXPECT_EQ(s.image.height(), int64_t(std::ceil(40 * sn + 20 * c - 1e-9)));
  const PixelBox& b = s.boxes[0].box;
  EXPECT_GE(b.xmin, 0);
  EXPECT_LE(b.xmax, double(s.image.width()));
  EXPECT_GT(b.Area(), 50.0);
}

TEST(HsvJitter, UnitFactorsPreserveImage) {
  Gen g(89);
  const Raster r = g.RandomRaster(32, 32);
  const Raster out = HsvJitter(r, {1, 1}, {1, 1}, 3);
  for (size_t i = 0; i < r.data().size(); ++i) {
    EXPECT_LE(std::abs(int(out.data()[i]) - int(r.data()[i])), 1);
  }
}

TEST(HsvJitter, RejectsOutOfRangeFactors) {
  const Raster r(2, 2);
  EXPECT_THROW(HsvJitter(r, {1, 1}, {0, 0}, 1), Error);
  EXPECT_THROW(HsvJitter(r, {0.5, 4.5}, {1, 1}, 1), Error);
  EXPECT_THROW(HsvJitter(r, {1.2, 1.1}, {1, 1}, 1), Error);
}

TEST(HsvJitter, SameSeedSameBytes) {
  Gen g(90);
  const Raster r = g.RandomRaster(16, 16);
  EXPECT_EQ(HsvJitter(r, {}, {}, 42), HsvJitter(r, {}, {}, 42));
}

TEST(HsvJitter, ValueScalingDarkensGrey) {
  Raster r(1, 1);
  for (auto& v : r.mutable_data()) v = 200;
  const Raster out = HsvJitter(r, {1, 1}, {0.5, 0.5}, 0);
  EXPECT_EQ(out.At(0, 0, 0), 100);
  EXPECT_EQ(out.At(0, 0, 2), 100);
}

TEST(Labels, NormalizationExample) {
  const double w = 416.0;
  const std::string expect =
      fmt::format("0 {:.6f} {:.6f} {:.6f} {:.6f}\n", 100 / w, 100 / w,
                  10 / w, 10 / w);
  EXPECT_EQ(expect, "0 0.240385 0.240385 0.024038 0.024038\n");
  const std::vector<LabeledBox> boxes = {{0, {95, 95, 105, 105}}};
  EXPECT_EQ(FormatLabels(boxes, 416, 416), expect);
}

TEST(Labels, FullImageBox) {
  const std::vector<LabeledBox> boxes = {{4, {0, 0, 640, 480}}};
  EXPECT_EQ(FormatLabels(boxes, 640, 480),
            "4 0.500000 0.500000 1.000000 1.000000\n");
}

TEST(Labels, EmptyListGivesEmptyFile) {
  TempDir dir("labels");
  EmitLabels({}, 416, 416, dir / "a.txt");
  EXPECT_EQ(std::filesystem::file_size(dir / "a.txt"), 0u);
}

TEST(Labels, OutOfBoundsBoxIsRejected) {
  const std::vector<LabeledBox> boxes = {{0, {400, 400, 420, 410}}};
  EXPECT_THROW(FormatLabels(boxes, 416, 416), Error);
}

TEST(LabelsProperty, RoundTripWithinTolerance) {
  Gen g(91);
  for (int i = 0; i < 500; ++i) {
    const double w = double(g.Int(16, 2000)), h = double(g.Int(16, 2000));
    std::vector<LabeledBox> boxes;
    for (int k = 0; k < 5; ++k) {
      const double x0 = g.Uniform(0, w - 1), y0 = g.Uniform(0, h - 1);
      boxes.push_back({int(g.Int(0, 4)),
                       {x0, y0, g.Uniform(x0, w), g.Uniform(y0, h)}});
    }
    const auto back = ParseLabels(FormatLabels(boxes, w, h), w, h);
    ASSERT_EQ(back.size(), boxes.size());
    for (size_t k = 0; k < boxes.size(); ++k) {
      EXPECT_EQ(back[k].class_id, boxes[k].class_id);
      EXPECT_NEAR(back[k].box.xmin / w, boxes[k].box.xmin / w, 1e-5);
      EXPECT_NEAR(back[k].box.ymin / h, boxes[k].box.ymin / h, 1e-5);
      EXPECT_NEAR(back[k].box.xmax / w, boxes[k].box.xmax / w, 1e-5);
      EXPECT_NEAR(back[k].box.ymax / h, boxes[k].box.ymax / h, 1e-5);
    }
  }
}

TEST(Labels, MalformedLineIsParseError) {
  try {
    ParseLabels("0 0.5 0.5\n", 10, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(SampleRotationAngle, DiscreteSetAndContinuousRange) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    const double a = SampleRotationAngle(seed, false);
    EXPECT_TRUE(a == 0 || a == 90 || a == 180 || a == 270);
    const double c = SampleRotationAngle(seed, true);
    EXPECT_GE(c, 0.0);
    EXPECT_LT(c, 360.0);
    EXPECT_EQ(SampleRotationAngle(seed, true), c);
  }
}

}  // namespace
}  // namespace gigadetect
