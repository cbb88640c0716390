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

#include <omp.h>

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gigadetect/ensemble.hpp"
#include "gigadetect/error.hpp"

namespace gigadetect {

Tensor ChipToTensor(const RasterView& chip, int size) {
  Tensor t({size, size, kRgbChannels});
  const double sx = double(chip.width()) / size;
  const double sy = double(chip.height()) / size;
  for (int y = 0; y < size; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0,
                                 double(chip.height() - 1));
    const int64_t y0 = int64_t(fy);
    const int64_t y1 = std::min<int64_t>(y0 + 1, chip.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < size; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0,
                                   double(chip.width() - 1));
      const int64_t x0 = int64_t(fx);
      const int64_t x1 = std::min<int64_t>(x0 + 1, chip.width() - 1);
      const double wx = fx - x0;
      for (int c = 0; c < kRgbChannels; ++c) {
        const double top = (1 - wx) * chip.At(x0, y0, c) + wx * chip.At(x1, y0, c);
        const double bot = (1 - wx) * chip.At(x0, y1, c) + wx * chip.At(x1, y1, c);
        t.At(y, x, c) = float(((1 - wy) * top + wy * bot) / 255.0);
      }
    }
  }
  return t;
}

NetworkBackend::NetworkBackend(NetworkSpec net, WeightStore weights,
                               std::vector<Anchor> anchors,
                               double decode_threshold)
    : net_(std::move(net)),
      weights_(std::move(weights)),
      anchors_(std::move(anchors)),
      decode_threshold_(decode_threshold) {
  if (anchors_.size() != size_t(net_.n_boxes)) {
    Fail(ErrorCode::kInvalidArgument,
         fmt::format("network has {} boxes per cell but {} anchors",
                     net_.n_boxes, anchors_.size()));
  }
}

std::unique_ptr<NetworkBackend> NetworkBackend::FromProfile(
    const ScaleProfile& profile, uint64_t seed, int input_size) {
  const int n_classes = int(profile.class_ids.size());
  Require(n_classes >= 1, "network profile needs at least one class");
  if (profile.weights_path.empty()) {
    NetworkSpec net = BuildYoltSpec(n_classes, 5, input_size);
    WeightStore weights = RandomWeights(net, seed);
    auto anchors = DefaultAnchors(net.n_boxes);
    return std::make_unique<NetworkBackend>(std::move(net), std::move(weights),
                                            std::move(anchors));
  }
  NetworkSpec net = SpecFromWeights(profile.weights_path);
  if (net.n_classes != n_classes) {
    Fail(ErrorCode::kShape,
         fmt::format("profile '{}' has {} classes, weights have {}",
                     profile.scale_id, n_classes, net.n_classes));
  }
  WeightStore weights = LoadWeights(net, profile.weights_path);
  auto anchors = DefaultAnchors(net.n_boxes);
  return std::make_unique<NetworkBackend>(std::move(net), std::move(weights),
                                          std::move(anchors));
}

std::vector<Detection> NetworkBackend::Detect(
    const RasterView& chip, const ScaleProfile& profile,
    const ChipContext& /*context*/) const {
  if (profile.class_ids.size() != size_t(net_.n_classes)) {
    Fail(ErrorCode::kShape,
         fmt::format("profile '{}' has {} classes, network has {}",
                     profile.scale_id, profile.class_ids.size(),
                     net_.n_classes));
  }
  const Tensor input = ChipToTensor(chip, net_.input_size);
  // Inside the runner's chip loop the layers run single-threaded.
  const Tensor head =
      Forward(net_, weights_, input,
              omp_in_parallel() ? kernels::Exec::kSerial
                                : kernels::Exec::kParallel);
  auto dets = DecodeGrid(head, anchors_, decode_threshold_, net_.input_size);
  const double sx = double(chip.width()) / net_.input_size;
  const double sy = double(chip.height()) / net_.input_size;
  for (auto& d : dets) {
    d.class_id = profile.class_ids[size_t(d.class_id)];
    d.box = {d.box.xmin * sx, d.box.ymin * sy, d.box.xmax * sx,
             d.box.ymax * sy};
  }
  return dets;
}

}  // namespace gigadetect
