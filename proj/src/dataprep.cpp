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

#include "gigadetect/dataprep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "gigadetect/error.hpp"
#include "gigadetect/random.hpp"

namespace gigadetect {

PixelBox PointToBox(const PointLabel& p, double object_size_m, double gsd,
                    double image_width, double image_height) {
  Require(object_size_m > 0.0, "object size must be > 0");
  Require(gsd > 0.0, "gsd must be > 0");
  const double half = object_size_m / gsd / 2.0;
  return ClipBox({p.x - half, p.y - half, p.x + half, p.y + half}, image_width,
                 image_height);
}

namespace {

double Cross(std::pair<double, double> o, std::pair<double, double> a,
             std::pair<double, double> b) {
  return (a.first - o.first) * (b.second - o.second) -
         (a.second - o.second) * (b.first - o.first);
}

bool OnSegment(std::pair<double, double> p, std::pair<double, double> a,
               std::pair<double, double> b) {
  return std::min(a.first, b.first) <= p.first &&
         p.first <= std::max(a.first, b.first) &&
         std::min(a.second, b.second) <= p.second &&
         p.second <= std::max(a.second, b.second);
}

bool SegmentsIntersect(std::pair<double, double> p1, std::pair<double, double> p2,
                       std::pair<double, double> q1, std::pair<double, double> q2) {
  const double d1 = Cross(q1, q2, p1), d2 = Cross(q1, q2, p2);
  const double d3 = Cross(p1, p2, q1), d4 = Cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return (d1 == 0 && OnSegment(p1, q1, q2)) ||
         (d2 == 0 && OnSegment(p2, q1, q2)) ||
         (d3 == 0 && OnSegment(q1, p1, p2)) ||
         (d4 == 0 && OnSegment(q2, p1, p2));
}

}  // namespace

bool PolygonSelfIntersects(std::span<const std::pair<double, double>> poly) {
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (SegmentsIntersect(poly[i], poly[(i + 1) % n], poly[j],
                            poly[(j + 1) % n])) {
        return true;
      }
    }
  }
  return false;
}

PixelBox FootprintToBox(const FootprintLabel& f, double coverage) {
  Require(coverage > 0.0 && coverage <= 1.0, "coverage must be in (0, 1]");
  Require(f.polygon.size() >= 3, "footprint needs at least three vertices");
  double twice_area = 0.0;
  for (size_t i = 0; i < f.polygon.size(); ++i) {
    const auto& a = f.polygon[i];
    const auto& b = f.polygon[(i + 1) % f.polygon.size()];
    twice_area += a.first * b.second - b.first * a.second;
  }
  Require(twice_area != 0.0, "footprint has zero area");
  Require(!PolygonSelfIntersects(f.polygon), "footprint self-intersects");

  PixelBox hull{f.polygon[0].first, f.polygon[0].second, f.polygon[0].first,
                f.polygon[0].second};
  for (const auto& [x, y] : f.polygon) {
    hull.xmin = std::min(hull.xmin, x);
    hull.xmax = std::max(hull.xmax, x);
    hull.ymin = std::min(hull.ymin, y);
    hull.ymax = std::max(hull.ymax, y);
  }
  const double hw = hull.Width() * coverage / 2.0;
  const double hh = hull.Height() * coverage / 2.0;
  const double cx = hull.CenterX(), cy = hull.CenterY();
  return {cx - hw, cy - hh, cx + hw, cy + hh};
}

RotatedSample RotateSample(const Raster& image,
                           std::span<const LabeledBox> boxes,
                           double angle_degrees) {
  double angle = std::fmod(angle_degrees, 360.0);
  if (angle < 0.0) angle += 360.0;
  double c, s;
  if (angle == 0.0) {
    c = 1.0, s = 0.0;
  } else if (angle == 90.0) {
    c = 0.0, s = 1.0;
  } else if (angle == 180.0) {
    c = -1.0, s = 0.0;
  } else if (angle == 270.0) {
    c = 0.0, s = -1.0;
  } else {
    const double rad = angle * std::numbers::pi / 180.0;
    c = std::cos(rad);
    s = std::sin(rad);
  }

  const double w = double(image.width()), h = double(image.height());
  const int64_t out_w = std::max<int64_t>(
      1, int64_t(std::ceil(std::abs(w * c) + std::abs(h * s) - 1e-9)));
  const int64_t out_h = std::max<int64_t>(
      1, int64_t(std::ceil(std::abs(w * s) + std::abs(h * c) - 1e-9)));
  const double cx = w / 2.0, cy = h / 2.0;
  const double ocx = out_w / 2.0, ocy = out_h / 2.0;

  RotatedSample out{Raster(out_w, out_h), {}};
  for (int64_t j = 0; j < out_h; ++j) {
    for (int64_t i = 0; i < out_w; ++i) {
      const double dx = i + 0.5 - ocx, dy = j + 0.5 - ocy;
      const double sx = std::floor(dx * c - dy * s + cx);
      const double sy = std::floor(dx * s + dy * c + cy);
      if (sx < 0 || sy < 0 || sx >= w || sy >= h) continue;
      for (int ch = 0; ch < kRgbChannels; ++ch) {
        out.image.At(i, j, ch) = image.At(int64_t(sx), int64_t(sy), ch);
      }
    }
  }

  const auto map = [&](double x, double y) {
    const double dx = x - cx, dy = y - cy;
    return std::pair{dx * c + dy * s + ocx, -dx * s + dy * c + ocy};
  };
  for (const auto& lb : boxes) {
    const std::pair<double, double> corners[4] = {
        map(lb.box.xmin, lb.box.ymin), map(lb.box.xmax, lb.box.ymin),
        map(lb.box.xmin, lb.box.ymax), map(lb.box.xmax, lb.box.ymax)};
    PixelBox hull{corners[0].first, corners[0].second, corners[0].first,
                  corners[0].second};
    for (const auto& [x, y] : corners) {
      hull.xmin = std::min(hull.xmin, x);
      hull.xmax = std::max(hull.xmax, x);
      hull.ymin = std::min(hull.ymin, y);
      hull.ymax = std::max(hull.ymax, y);
    }
    out.boxes.push_back({lb.class_id, ClipBox(hull, double(out_w),
                                              double(out_h))});
  }
  return out;
}

namespace {

void RgbToHsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  const double delta = mx - mn;
  v = mx;
  s = mx > 0.0 ? delta / mx : 0.0;
  if (delta == 0.0) {
    h = 0.0;
  } else if (mx == r) {
    h = std::fmod((g - b) / delta, 6.0);
  } else if (mx == g) {
    h = (b - r) / delta + 2.0;
  } else {
    h = (r - g) / delta + 4.0;
  }
  if (h < 0.0) h += 6.0;
}

void HsvToRgb(double h, double s, double v, double& r, double& g, double& b) {
  const double chroma = v * s;
  const double x = chroma * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
  const double m = v - chroma;
  double rp = 0, gp = 0, bp = 0;
  switch (static_cast<int>(h) % 6) {
    case 0: rp = chroma, gp = x; break;
    case 1: rp = x, gp = chroma; break;
    case 2: gp = chroma, bp = x; break;
    case 3: gp = x, bp = chroma; break;
    case 4: rp = x, bp = chroma; break;
    default: rp = chroma, bp = x; break;
  }
  r = rp + m, g = gp + m, b = bp + m;
}

void CheckRange(const HsvRange& r, const char* what) {
  if (!(r.lo > 0.0 && r.lo <= r.hi && r.hi <= 4.0)) {
    Fail(ErrorCode::kInvalidArgument,
         fmt::format("{} range [{}, {}] must satisfy 0 < lo <= hi <= 4", what,
                     r.lo, r.hi));
  }
}

uint8_t ToByte(double v) {
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

Raster HsvJitter(const Raster& image, HsvRange saturation, HsvRange value,
                 uint64_t seed) {
  CheckRange(saturation, "saturation");
  CheckRange(value, "value");
  auto rng = MakeStream(seed, {});
  std::uniform_real_distribution<double> sat(saturation.lo, saturation.hi);
  std::uniform_real_distribution<double> val(value.lo, value.hi);
  const double fs = saturation.lo == saturation.hi ? saturation.lo : sat(rng);
  const double fv = value.lo == value.hi ? value.lo : val(rng);

  Raster out(image.width(), image.height());
  const auto src = image.data();
  auto dst = out.mutable_data();
  for (size_t i = 0; i < src.size(); i += kRgbChannels) {
    double h, s, v;
    RgbToHsv(src[i] / 255.0, src[i + 1] / 255.0, src[i + 2] / 255.0, h, s, v);
    s = std::clamp(s * fs, 0.0, 1.0);
    v = std::clamp(v * fv, 0.0, 1.0);
    double r, g, b;
    HsvToRgb(h, s, v, r, g, b);
    dst[i] = ToByte(r);
    dst[i + 1] = ToByte(g);
    dst[i + 2] = ToByte(b);
  }
  return out;
}

std::string FormatLabels(std::span<const LabeledBox> boxes, double image_width,
                         double image_height) {
  Require(image_width > 0.0 && image_height > 0.0,
          "image dimensions must be > 0");
  constexpr double kSlack = 1e-9;
  std::string out;
  for (const auto& lb : boxes) {
    const PixelBox& b = lb.box;
    if (!b.IsValid() || b.xmin < -kSlack || b.ymin < -kSlack ||
        b.xmax > image_width + kSlack || b.ymax > image_height + kSlack) {
      Fail(ErrorCode::kInvalidArgument,
           fmt::format("label box ({}, {}, {}, {}) lies outside the {}x{} "
                       "image",
                       b.xmin, b.ymin, b.xmax, b.ymax, image_width,
                       image_height));
    }
    out += fmt::format("{} {:.6f} {:.6f} {:.6f} {:.6f}\n", lb.class_id,
                       b.CenterX() / image_width, b.CenterY() / image_height,
                       b.Width() / image_width, b.Height() / image_height);
  }
  return out;
}

void EmitLabels(std::span<const LabeledBox> boxes, double image_width,
                double image_height, const std::filesystem::path& path) {
  const std::string text = FormatLabels(boxes, image_width, image_height);
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) Fail(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
}

std::vector<LabeledBox> ParseLabels(const std::string& text,
                                    double image_width, double image_height) {
  std::vector<LabeledBox> boxes;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    int cls;
    double x, y, w, h;
    if (!(fields >> cls >> x >> y >> w >> h)) {
      Fail(ErrorCode::kParse, fmt::format("label line {}: '{}'", line_no, line));
    }
    boxes.push_back({cls,
                     {(x - w / 2) * image_width, (y - h / 2) * image_height,
                      (x + w / 2) * image_width, (y + h / 2) * image_height}});
  }
  return boxes;
}

double SampleRotationAngle(uint64_t seed, bool continuous) {
  auto rng = MakeStream(seed, {0x726f74ull});
  if (continuous) {
    return std::uniform_real_distribution<double>(0.0, 360.0)(rng);
  }
  return 90.0 * double(std::uniform_int_distribution<int>(0, 3)(rng));
}

}  // namespace gigadetect
