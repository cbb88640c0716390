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

#include "gigadetect/geometry.hpp"

#include <algorithm>
#include <tuple>

#include "gigadetect/error.hpp"

namespace gigadetect {

double Iou(const PixelBox& a, const PixelBox& b) {
  const double iw = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  const double ih = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.Area() + b.Area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

bool CanonicalLess(const Detection& a, const Detection& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  const auto key = [](const Detection& d) {
    return std::tie(d.class_id, d.box.xmin, d.box.ymin, d.box.xmax,
                    d.box.ymax, d.scale_id);
  };
  if (key(a) != key(b)) return key(a) < key(b);
  // Detections without provenance sort first.
  if (a.tile_origin.has_value() != b.tile_origin.has_value()) {
    return !a.tile_origin.has_value();
  }
  if (!a.tile_origin) return false;
  return std::tie(a.tile_origin->row, a.tile_origin->col) <
         std::tie(b.tile_origin->row, b.tile_origin->col);
}

void CanonicalSort(std::vector<Detection>& dets) {
  std::sort(dets.begin(), dets.end(), CanonicalLess);
}

std::vector<Detection> Nms(std::span<const Detection> dets,
                           double iou_threshold, bool per_class) {
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "nms iou_threshold must be in [0, 1]");
  }
  std::vector<Detection> sorted(dets.begin(), dets.end());
  CanonicalSort(sorted);

  std::vector<Detection> kept;
  kept.reserve(sorted.size());
  for (auto& candidate : sorted) {
    bool suppressed = false;
    for (const auto& k : kept) {
      if (per_class && k.class_id != candidate.class_id) continue;
      if (Iou(k.box, candidate.box) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(std::move(candidate));
  }
  return kept;
}

GeoBox PixelToGeo(const PixelBox& box, const GeoTransform& t) {
  return GeoBox{t.origin_x + box.xmin * t.gsd, t.origin_y - box.ymin * t.gsd,
                t.origin_x + box.xmax * t.gsd, t.origin_y - box.ymax * t.gsd};
}

PixelBox GeoToPixel(const GeoBox& box, const GeoTransform& t) {
  return PixelBox{(box.xmin - t.origin_x) / t.gsd,
                  (t.origin_y - box.ymin) / t.gsd,
                  (box.xmax - t.origin_x) / t.gsd,
                  (t.origin_y - box.ymax) / t.gsd};
}

PixelBox ClipBox(const PixelBox& box, double width, double height) {
  PixelBox out{std::clamp(box.xmin, 0.0, width),
               std::clamp(box.ymin, 0.0, height),
               std::clamp(box.xmax, 0.0, width),
               std::clamp(box.ymax, 0.0, height)};
  return out;
}

}  // namespace gigadetect
