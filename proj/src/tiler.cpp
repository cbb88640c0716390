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

#include "gigadetect/tiler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "gigadetect/error.hpp"

namespace gigadetect {

int64_t TileStride(int64_t window, double overlap_frac) {
  const double exact = double(window) * (1.0 - overlap_frac);
  return std::max<int64_t>(1, static_cast<int64_t>(std::floor(exact + 1e-9)));
}

std::vector<int64_t> AxisStarts(int64_t dim, int64_t window,
                                double overlap_frac) {
  if (dim <= window) return {0};
  const int64_t stride = TileStride(window, overlap_frac);
  std::vector<int64_t> starts;
  int64_t start = 0;
  for (; start + window <= dim; start += stride) starts.push_back(start);
  if (starts.back() + window < dim) starts.push_back(dim - window);
  return starts;
}

TilePlan PlanTiles(int64_t image_width, int64_t image_height, int64_t window,
                   double overlap_frac, std::string image_name) {
  Require(window >= 1, "tile window must be >= 1");
  Require(overlap_frac >= 0.0 && overlap_frac < 1.0,
          "tile overlap must be in [0, 1)");
  Require(image_width >= 1 && image_height >= 1,
          "image dimensions must be >= 1");

  TilePlan plan{std::move(image_name), image_width, image_height, window,
                overlap_frac, {}};
  const auto rows = AxisStarts(image_height, window, overlap_frac);
  const auto cols = AxisStarts(image_width, window, overlap_frac);
  const int64_t tile_h = std::min(window, image_height);
  const int64_t tile_w = std::min(window, image_width);
  plan.tiles.reserve(rows.size() * cols.size());
  for (int64_t r : rows) {
    for (int64_t c : cols) plan.tiles.push_back({r, c, tile_h, tile_w});
  }
  return plan;
}

std::string FormatTileName(std::string_view image_name, const TileSpec& spec,
                           std::string_view ext) {
  Require(image_name.find('|') == std::string_view::npos,
          "image name must not contain '|'");
  return fmt::format("{}|{}_{}_{}_{}.{}", image_name, spec.row, spec.col,
                     spec.height, spec.width, ext);
}

namespace {

int64_t ParseField(std::string_view text, std::string_view field,
                   std::string_view whole) {
  int64_t value = 0;
  const bool leading_zero = text.size() > 1 && text.front() == '0';
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || leading_zero || text.front() == '-' ||
      ec != std::errc() || ptr != text.data() + text.size()) {
    Fail(ErrorCode::kParse,
         fmt::format("tile name '{}': bad {} segment '{}'", whole, field,
                     text));
  }
  return value;
}

}  // namespace

TileName ParseTileName(std::string_view name) {
  const size_t bar = name.find('|');
  if (bar == std::string_view::npos) {
    Fail(ErrorCode::kParse,
         fmt::format("tile name '{}': missing '|' separator", name));
  }
  if (name.find('|', bar + 1) != std::string_view::npos) {
    Fail(ErrorCode::kParse,
         fmt::format("tile name '{}': more than one '|'", name));
  }
  TileName out;
  out.image_name = std::string(name.substr(0, bar));

  const std::string_view rest = name.substr(bar + 1);
  const size_t dot = rest.find('.');
  if (dot == std::string_view::npos || dot + 1 == rest.size()) {
    Fail(ErrorCode::kParse,
         fmt::format("tile name '{}': missing extension", name));
  }
  out.ext = std::string(rest.substr(dot + 1));

  const std::string_view geometry = rest.substr(0, dot);
  static constexpr std::string_view kFields[] = {"row", "column", "height",
                                                 "width"};
  int64_t values[4] = {};
  size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    const size_t next = i < 3 ? geometry.find('_', pos) : geometry.size();
    if (next == std::string_view::npos) {
      Fail(ErrorCode::kParse,
           fmt::format("tile name '{}': missing {} segment", name,
                       kFields[i]));
    }
    values[i] = ParseField(geometry.substr(pos, next - pos), kFields[i], name);
    pos = next + 1;
  }
  out.spec = {values[0], values[1], values[2], values[3]};
  return out;
}

Raster Extract(const Raster& raster, const TileSpec& spec) {
  return raster.View()
      .Sub(spec.col, spec.row, spec.width, spec.height)
      .ToRaster();
}

void Embed(Raster& dst, const Raster& tile, const TileSpec& spec) {
  Require(spec.width == tile.width() && spec.height == tile.height(),
          "tile dimensions must match the spec");
  Require(spec.row >= 0 && spec.col >= 0 &&
              spec.row + spec.height <= dst.height() &&
              spec.col + spec.width <= dst.width(),
          "embed target out of raster bounds");
  for (int64_t y = 0; y < spec.height; ++y) {
    std::copy_n(tile.Row(y), spec.width * kRgbChannels,
                dst.Row(spec.row + y) + spec.col * kRgbChannels);
  }
}

nlohmann::json TilePlanToJson(const TilePlan& plan) {
  nlohmann::json tiles = nlohmann::json::array();
  for (const auto& t : plan.tiles) {
    tiles.push_back({{"row", t.row},
                     {"col", t.col},
                     {"height", t.height},
                     {"width", t.width}});
  }
  return {{"image", plan.image_name},
          {"image_width", plan.image_width},
          {"image_height", plan.image_height},
          {"window", plan.window},
          {"overlap", plan.overlap_frac},
          {"tiles", std::move(tiles)}};
}

TilePlan TilePlanFromJson(const nlohmann::json& j) {
  try {
    TilePlan plan;
    plan.image_name = j.at("image").get<std::string>();
    plan.image_width = j.at("image_width").get<int64_t>();
    plan.image_height = j.at("image_height").get<int64_t>();
    plan.window = j.at("window").get<int64_t>();
    plan.overlap_frac = j.at("overlap").get<double>();
    for (const auto& t : j.at("tiles")) {
      plan.tiles.push_back({t.at("row").get<int64_t>(),
                            t.at("col").get<int64_t>(),
                            t.at("height").get<int64_t>(),
                            t.at("width").get<int64_t>()});
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kSchema, fmt::format("tile plan: {}", e.what()));
  }
}

}  // namespace gigadetect
