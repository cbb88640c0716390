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

#include <fmt/format.h>

#include "gigadetect/error.hpp"
#include "gigadetect/imaging.hpp"

namespace gigadetect {
namespace {

// Decimal GSDs such as 0.45 / 0.15 are not exact in binary; nudge before
// flooring so exact ratios are not lost to rounding.
constexpr double kDimEpsilon = 1e-9;

struct Tap {
  int64_t index;
  float weight;
};

// Sparse resampling operator for one axis: output sample o is the weighted
// sum of the listed input samples.
using AxisOperator = std::vector<std::vector<Tap>>;

int64_t Reflect(int64_t i, int64_t n) {
  const int64_t period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

// Area-average over [o * ratio, (o + 1) * ratio) composed with a Gaussian of
// the given sigma, folded onto valid indices by reflection.
AxisOperator BuildAxisOperator(int64_t in_dim, int64_t out_dim, double ratio,
                               double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> gauss(2 * radius + 1);
  double gsum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    gauss[t + radius] = std::exp(-double(t) * t / (2.0 * sigma * sigma));
    gsum += gauss[t + radius];
  }
  for (auto& g : gauss) g /= gsum;

  AxisOperator op(out_dim);
  for (int64_t o = 0; o < out_dim; ++o) {
    const double lo = o * ratio;
    const double hi = std::min(double(in_dim), (o + 1) * ratio);
    const int64_t first = static_cast<int64_t>(std::floor(lo));
    const int64_t last = std::min<int64_t>(
        in_dim - 1, static_cast<int64_t>(std::ceil(hi)) - 1);

    const int64_t span_lo = first - radius;
    std::vector<double> acc(size_t(last - first + 1 + 2 * radius), 0.0);
    double area_total = 0.0;
    for (int64_t s = first; s <= last; ++s) {
      const double area =
          std::min(hi, double(s + 1)) - std::max(lo, double(s));
      if (area <= 0.0) continue;
      area_total += area;
      for (int t = -radius; t <= radius; ++t) {
        acc[size_t(s + t - span_lo)] += area * gauss[t + radius];
      }
    }
    // Fold out-of-range taps back inside, then merge duplicates.
    std::vector<Tap> taps;
    for (size_t k = 0; k < acc.size(); ++k) {
      if (acc[k] == 0.0) continue;
      const int64_t idx = Reflect(span_lo + int64_t(k), in_dim);
      const float w = static_cast<float>(acc[k] / area_total);
      auto it = std::find_if(taps.begin(), taps.end(),
                             [idx](const Tap& tap) { return tap.index == idx; });
      if (it == taps.end()) {
        taps.push_back({idx, w});
      } else {
        it->weight += w;
      }
    }
    std::sort(taps.begin(), taps.end(),
              [](const Tap& a, const Tap& b) { return a.index < b.index; });
    op[o] = std::move(taps);
  }
  return op;
}

}  // namespace

int64_t DegradedDim(int64_t dim, double src_gsd, double dst_gsd) {
  return static_cast<int64_t>(
      std::floor(double(dim) * src_gsd / dst_gsd + kDimEpsilon));
}

Raster Degrade(RasterView raster, double src_gsd, double dst_gsd,
               kernels::Exec exec) {
  Require(src_gsd > 0.0 && dst_gsd > 0.0, "gsd must be > 0");
  if (dst_gsd < src_gsd) {
    Fail(ErrorCode::kInvalidArgument,
         fmt::format("cannot degrade from {} m to finer {} m", src_gsd,
                     dst_gsd));
  }
  if (dst_gsd == src_gsd) return raster.ToRaster();

  const int64_t in_w = raster.width(), in_h = raster.height();
  const int64_t out_w = DegradedDim(in_w, src_gsd, dst_gsd);
  const int64_t out_h = DegradedDim(in_h, src_gsd, dst_gsd);
  if (out_w < 1 || out_h < 1) {
    Fail(ErrorCode::kInvalidArgument,
         fmt::format("degrading {}x{} from {} m to {} m leaves no pixels",
                     in_w, in_h, src_gsd, dst_gsd));
  }
  const double ratio = dst_gsd / src_gsd;
  const double sigma = ratio / 2.0;
  const AxisOperator horizontal = BuildAxisOperator(in_w, out_w, ratio, sigma);
  const AxisOperator vertical = BuildAxisOperator(in_h, out_h, ratio, sigma);

  constexpr int c = kRgbChannels;
  std::vector<float> rows(size_t(in_h) * out_w * c);
#pragma omp parallel for if (exec == kernels::Exec::kParallel) schedule(static)
  for (int64_t y = 0; y < in_h; ++y) {
    const uint8_t* src = raster.Row(y);
    float* dst = rows.data() + size_t(y) * out_w * c;
    for (int64_t ox = 0; ox < out_w; ++ox) {
      float acc[c] = {0.0f, 0.0f, 0.0f};
      for (const Tap& tap : horizontal[ox]) {
        const uint8_t* px = src + tap.index * c;
        for (int ch = 0; ch < c; ++ch) acc[ch] += tap.weight * px[ch];
      }
      for (int ch = 0; ch < c; ++ch) dst[ox * c + ch] = acc[ch];
    }
  }

  Raster out(out_w, out_h);
#pragma omp parallel for if (exec == kernels::Exec::kParallel) schedule(static)
  for (int64_t oy = 0; oy < out_h; ++oy) {
    std::vector<float> acc(size_t(out_w) * c, 0.0f);
    for (const Tap& tap : vertical[oy]) {
      const float* src = rows.data() + size_t(tap.index) * out_w * c;
      for (size_t k = 0; k < acc.size(); ++k) acc[k] += tap.weight * src[k];
    }
    uint8_t* dst = out.Row(oy);
    for (size_t k = 0; k < acc.size(); ++k) {
      dst[k] = static_cast<uint8_t>(
          std::lround(std::clamp(acc[k], 0.0f, 255.0f)));
    }
  }
  return out;
}

std::vector<double> GsdLadder() {
  return {0.30, 0.45, 0.60, 0.75, 0.90, 1.05, 1.20, 1.50, 1.80, 2.10, 2.40,
          3.00};
}

std::vector<double> FullGsdLadder() {
  std::vector<double> ladder{kNativeCowcGsd};
  const auto rest = GsdLadder();
  ladder.insert(ladder.end(), rest.begin(), rest.end());
  return ladder;
}

double ObjectPixelExtent(double object_size_m, double gsd) {
  Require(gsd > 0.0, "gsd must be > 0");
  return object_size_m / gsd;
}

}  // namespace gigadetect
