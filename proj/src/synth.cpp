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
#include <unordered_map>

#include <fmt/format.h>

#include "gigadetect/error.hpp"
#include "gigadetect/evaluation.hpp"
#include "gigadetect/random.hpp"
#include "gigadetect/tiler.hpp"

namespace gigadetect {
namespace {

constexpr uint64_t kNoiseDomain = 0x6e6f6973ull;
constexpr uint64_t kPlaceDomain = 0x706c6163ull;
constexpr uint8_t kNoiseMask = 0x3f;
constexpr uint8_t kObjectLevel = 255;

// Buckets boxes by their top-left corner in cells of (object_px + 1), so any
// box closer than one pixel lives in a neighbouring cell.
class PlacementGrid {
 public:
  explicit PlacementGrid(double cell) : cell_(cell) {}

  bool Conflicts(const PixelBox& b) const {
    const int64_t cx = Cell(b.xmin), cy = Cell(b.ymin);
    for (int64_t dy = -1; dy <= 1; ++dy) {
      for (int64_t dx = -1; dx <= 1; ++dx) {
        const auto it = cells_.find(Key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (const PixelBox& o : it->second) {
          if (b.xmin < o.xmax + 1.0 && o.xmin < b.xmax + 1.0 &&
              b.ymin < o.ymax + 1.0 && o.ymin < b.ymax + 1.0) {
            return true;
          }
        }
      }
    }
    return false;
  }

  void Insert(const PixelBox& b) {
    cells_[Key(Cell(b.xmin), Cell(b.ymin))].push_back(b);
  }

 private:
  int64_t Cell(double v) const { return int64_t(std::floor(v / cell_)); }
  static uint64_t Key(int64_t x, int64_t y) {
    return (uint64_t(uint32_t(x)) << 32) | uint32_t(y);
  }

  double cell_;
  std::unordered_map<uint64_t, std::vector<PixelBox>> cells_;
};

void FillNoise(Raster& image, uint64_t seed) {
  const int64_t h = image.height();
  const int64_t row_bytes = image.width() * kRgbChannels;
#pragma omp parallel for schedule(static)
  for (int64_t y = 0; y < h; ++y) {
    uint8_t* row = image.Row(y);
    const uint64_t base = StreamSeed(seed, {kNoiseDomain, uint64_t(y)});
    for (int64_t i = 0; i < row_bytes; i += 8) {
      uint64_t bits = SplitMix64(base + uint64_t(i));
      const int64_t n = std::min<int64_t>(8, row_bytes - i);
      for (int64_t k = 0; k < n; ++k, bits >>= 8) {
        row[i + k] = uint8_t(bits) & kNoiseMask;
      }
    }
  }
}

void Paint(Raster& image, const PixelBox& b) {
  const int64_t x0 = std::max<int64_t>(0, int64_t(std::floor(b.xmin)));
  const int64_t y0 = std::max<int64_t>(0, int64_t(std::floor(b.ymin)));
  const int64_t x1 = std::min(image.width(), int64_t(std::ceil(b.xmax)));
  const int64_t y1 = std::min(image.height(), int64_t(std::ceil(b.ymax)));
  for (int64_t y = y0; y < y1; ++y) {
    std::fill(image.Row(y) + x0 * kRgbChannels, image.Row(y) + x1 * kRgbChannels,
              kObjectLevel);
  }
}

}  // namespace

SynthScene MakeSynthScene(const SynthOptions& o) {
  Require(o.width >= 1 && o.height >= 1, "scene dimensions must be >= 1");
  Require(o.object_px >= 1, "object size must be >= 1 px");
  Require(o.max_attempts_per_object >= 1, "attempt budget must be >= 1");
  const double px = double(o.object_px);

  SynthScene scene{Raster(o.width, o.height), {}};
  FillNoise(scene.image, o.seed);

  PlacementGrid grid(px + 1.0);
  const auto add = [&](const PixelBox& b) {
    grid.Insert(b);
    Detection d;
    d.class_id = o.class_id;
    d.confidence = 1.0;
    d.box = b;
    scene.truth.push_back(std::move(d));
  };

  for (const PixelBox& b : o.fixed_boxes) {
    if (b.Width() != px || b.Height() != px || b.xmin < 0 || b.ymin < 0 ||
        b.xmax > double(o.width) || b.ymax > double(o.height)) {
      Fail(ErrorCode::kInvalidArgument,
           fmt::format("fixed box ({}, {}, {}, {}) is not a {} px square "
                       "inside the scene",
                       b.xmin, b.ymin, b.xmax, b.ymax, o.object_px));
    }
    if (grid.Conflicts(b)) {
      Fail(ErrorCode::kInfeasible,
           fmt::format("fixed box ({}, {}) collides with another", b.xmin,
                       b.ymin));
    }
    add(b);
  }

  if (o.n_objects > 0 && (o.object_px > o.width || o.object_px > o.height)) {
    Fail(ErrorCode::kInfeasible,
         fmt::format("{} px objects do not fit a {}x{} scene", o.object_px,
                     o.width, o.height));
  }
  auto rng = MakeStream(o.seed, {kPlaceDomain});
  std::uniform_int_distribution<int64_t> ux(0, o.width - o.object_px);
  std::uniform_int_distribution<int64_t> uy(0, o.height - o.object_px);
  for (size_t i = 0; i < o.n_objects; ++i) {
    bool placed = false;
    for (size_t attempt = 0; attempt < o.max_attempts_per_object; ++attempt) {
      const double x = double(ux(rng)), y = double(uy(rng));
      const PixelBox b{x, y, x + px, y + px};
      if (grid.Conflicts(b)) continue;
      add(b);
      placed = true;
      break;
    }
    if (!placed) {
      Fail(ErrorCode::kInfeasible,
           fmt::format("could not place object {} of {} after {} attempts",
                       i + 1, o.n_objects, o.max_attempts_per_object));
    }
  }

  for (const auto& d : scene.truth) Paint(scene.image, d.box);
  return scene;
}

std::vector<PixelBox> StraddlingBoxes(int64_t width, int64_t height,
                                      int64_t window, double overlap,
                                      int object_px, size_t count) {
  Require(object_px >= 1, "object size must be >= 1 px");
  const auto edges = [&](int64_t dim) {
    std::vector<int64_t> out;
    for (int64_t s : AxisStarts(dim, window, overlap)) {
      const int64_t e = s + window;
      if (e - object_px / 2 >= 0 && e - object_px / 2 + object_px <= dim &&
          e < dim) {
        out.push_back(e);
      }
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  const auto xs = edges(width), ys = edges(height);
  const size_t total = xs.size() * ys.size();
  if (count > total) {
    Fail(ErrorCode::kInfeasible,
         fmt::format("{} straddling objects requested but the tile plan has "
                     "only {} interior corners",
                     count, total));
  }
  std::vector<PixelBox> out;
  out.reserve(count);
  const int64_t half = object_px / 2;
  for (size_t i = 0; i < count; ++i) {
    const size_t k = i * total / count;
    const double x = double(xs[k % xs.size()] - half);
    const double y = double(ys[k / xs.size()] - half);
    out.push_back({x, y, x + object_px, y + object_px});
  }
  return out;
}

}  // namespace gigadetect
