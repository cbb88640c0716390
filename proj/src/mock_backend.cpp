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
#include <numeric>

#include "gigadetect/ensemble.hpp"
#include "gigadetect/error.hpp"
#include "gigadetect/random.hpp"

namespace gigadetect {
namespace {

// Distinguishes the per-object drop stream from the per-tile streams.
constexpr uint64_t kDropDomain = 0x64726f70ull;

}  // namespace

MockOracle::MockOracle(MockOracleConfig config) : config_(std::move(config)) {
  Require(config_.drop_prob >= 0.0 && config_.drop_prob <= 1.0,
          "mock drop_prob must be in [0, 1]");
  Require(config_.false_positives_per_tile >= 0.0,
          "mock false_positives_per_tile must be >= 0");
  Require(config_.jitter_sigma_px >= 0.0, "mock jitter must be >= 0");
  Require(config_.spurious_size_px > 0.0, "mock spurious size must be > 0");
  by_center_y_.resize(config_.planted_truth.size());
  std::iota(by_center_y_.begin(), by_center_y_.end(), size_t{0});
  const auto& planted = config_.planted_truth;
  std::stable_sort(by_center_y_.begin(), by_center_y_.end(),
                   [&](size_t a, size_t b) {
                     return planted[a].box.CenterY() < planted[b].box.CenterY();
                   });
}

bool MockOracle::Dropped(size_t object_index) const {
  if (config_.drop_prob <= 0.0) return false;
  const double u =
      UnitFromHash(StreamSeed(config_.seed, {kDropDomain, object_index}));
  return u < config_.drop_prob;
}

std::vector<Detection> MockOracle::DetectTile(
    const TileSpec& tile, int downsample_factor,
    std::span<const int> class_ids) const {
  const double f = downsample_factor;
  const auto& planted = config_.planted_truth;
  const auto class_allowed = [&](int id) {
    return class_ids.empty() ||
           std::find(class_ids.begin(), class_ids.end(), id) != class_ids.end();
  };

  // Candidates whose native center y lies strictly inside the tile band.
  const double y_lo = tile.row * f, y_hi = (tile.row + tile.height) * f;
  auto first = std::upper_bound(
      by_center_y_.begin(), by_center_y_.end(), y_lo,
      [&](double v, size_t i) { return v < planted[i].box.CenterY(); });
  std::vector<size_t> hits;
  for (auto it = first; it != by_center_y_.end(); ++it) {
    const Detection& p = planted[*it];
    const double cy = p.box.CenterY() / f;
    if (p.box.CenterY() >= y_hi) break;
    const double cx = p.box.CenterX() / f;
    if (!(cy > tile.row && cy < tile.row + tile.height)) continue;
    if (!(cx > tile.col && cx < tile.col + tile.width)) continue;
    if (!class_allowed(p.class_id) || Dropped(*it)) continue;
    hits.push_back(*it);
  }
  std::sort(hits.begin(), hits.end());

  auto rng = MakeStream(config_.seed, {uint64_t(tile.row), uint64_t(tile.col)});
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::vector<Detection> out;
  out.reserve(hits.size());
  for (size_t idx : hits) {
    const Detection& p = planted[idx];
    Detection d;
    d.class_id = p.class_id;
    d.confidence = kMockTrueConfidence;
    d.box = {p.box.xmin / f - tile.col, p.box.ymin / f - tile.row,
             p.box.xmax / f - tile.col, p.box.ymax / f - tile.row};
    if (config_.jitter_sigma_px > 0.0) {
      const double s = config_.jitter_sigma_px;
      double xs[2] = {d.box.xmin + s * jitter(rng), d.box.xmax + s * jitter(rng)};
      double ys[2] = {d.box.ymin + s * jitter(rng), d.box.ymax + s * jitter(rng)};
      d.box = {std::min(xs[0], xs[1]), std::min(ys[0], ys[1]),
               std::max(xs[0], xs[1]), std::max(ys[0], ys[1])};
    }
    out.push_back(std::move(d));
  }

  if (config_.false_positives_per_tile > 0.0) {
    std::poisson_distribution<int> count(config_.false_positives_per_tile);
    const int n = count(rng);
    const double bw = std::min<double>(config_.spurious_size_px, tile.width);
    const double bh = std::min<double>(config_.spurious_size_px, tile.height);
    std::uniform_real_distribution<double> ux(0.0, double(tile.width) - bw);
    std::uniform_real_distribution<double> uy(0.0, double(tile.height) - bh);
    for (int k = 0; k < n; ++k) {
      Detection d;
      if (class_ids.empty()) {
        d.class_id = 0;
      } else {
        std::uniform_int_distribution<size_t> pick(0, class_ids.size() - 1);
        d.class_id = class_ids[pick(rng)];
      }
      d.confidence = kMockSpuriousConfidence;
      const double x = ux(rng), y = uy(rng);
      d.box = {x, y, x + bw, y + bh};
      out.push_back(std::move(d));
    }
  }
  return out;
}

std::vector<Detection> MockOracle::Detect(const RasterView& /*chip*/,
                                          const ScaleProfile& profile,
                                          const ChipContext& context) const {
  return DetectTile(context.tile, context.downsample_factor, profile.class_ids);
}

std::vector<Detection> MockDetect(const TileSpec& chip_spec,
                                  const MockOracleConfig& cfg) {
  return MockOracle(cfg).DetectTile(chip_spec, 1, {});
}

}  // namespace gigadetect
