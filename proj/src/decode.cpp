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
#include "gigadetect/network.hpp"

namespace gigadetect {
namespace {

double Sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

std::vector<Detection> DecodeGrid(const Tensor& y,
                                  const std::vector<Anchor>& anchors,
                                  double conf_threshold, double chip_size) {
  const int n_boxes = static_cast<int>(anchors.size());
  Require(n_boxes >= 1, "decode needs at least one anchor");
  if (y.c() % n_boxes != 0 || y.c() / n_boxes < 6) {
    Fail(ErrorCode::kInvalidArgument,
         fmt::format("decode: {} channels do not split into {} anchors of "
                     "(classes + 5)",
                     y.c(), n_boxes));
  }
  Require(y.h() == y.w() && y.h() >= 1, "decode needs a square grid");
  const int per_box = y.c() / n_boxes;
  const int n_classes = per_box - 5;
  const int grid = y.h();
  const double cell = chip_size / grid;

  std::vector<Detection> out;
  std::vector<double> probs(n_classes);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const float* px = y.Pixel(i, j);
      for (int b = 0; b < n_boxes; ++b) {
        const float* t = px + b * per_box;
        const double objectness = Sigmoid(t[4]);

        const float* logits = t + 5;
        const double max_logit = *std::max_element(logits, logits + n_classes);
        double total = 0.0;
        for (int k = 0; k < n_classes; ++k) {
          probs[k] = std::exp(double(logits[k]) - max_logit);
          total += probs[k];
        }
        const int best = static_cast<int>(
            std::max_element(probs.begin(), probs.end()) - probs.begin());
        const double score = objectness * probs[best] / total;
        if (!(score >= conf_threshold)) continue;

        const double cx = (j + Sigmoid(t[0])) * cell;
        const double cy = (i + Sigmoid(t[1])) * cell;
        const double w = anchors[b].w * std::exp(double(t[2])) * cell;
        const double h = anchors[b].h * std::exp(double(t[3])) * cell;
        Detection det;
        det.class_id = best;
        det.confidence = std::clamp(score, 0.0, 1.0);
        det.box = ClipBox({cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2},
                          chip_size, chip_size);
        out.push_back(std::move(det));
      }
    }
  }
  return out;
}

}  // namespace gigadetect
