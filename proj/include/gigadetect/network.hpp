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

#ifndef GIGADETECT_NETWORK_HPP_
#define GIGADETECT_NETWORK_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gigadetect/geometry.hpp"
#include "gigadetect/kernels.hpp"
#include "gigadetect/tensor.hpp"

namespace gigadetect {

enum class LayerKind { kConv, kMaxpool, kPassthrough };
enum class Activation { kLeaky, kLinear };

struct LayerSpec {
  LayerKind kind = LayerKind::kConv;
  int filters = 0;
  int size = 0;
  int stride = 0;
  int source_layer = -1;  // passthrough only
  Activation activation = Activation::kLinear;
  bool batch_norm = false;
};

// The 22-layer, stride-16 single-shot detector: four 2x2 maxpools, a reorg
// passthrough from the 52x52 stage at layer 19 and a final 1x1 linear conv
// with N_f = n_boxes * (n_classes + 5) filters.
struct NetworkSpec {
  std::vector<LayerSpec> layers;
  int n_classes = 0;
  int n_boxes = 0;
  int input_size = 0;

  int OutputFilters() const { return n_boxes * (n_classes + 5); }
  int GridSize() const { return input_size / kDownsample; }

  static constexpr int kDownsample = 16;
  static constexpr int kInputChannels = 3;
};

struct TrainingHyperparams {
  double learning_rate = 1e-3;
  double weight_decay = 0.0005;
  double momentum = 0.9;
  int boxes_per_grid = 5;
};

// Throws kInvalidArgument for n_classes < 1, n_boxes < 1 or an input size
// not divisible by 32.
NetworkSpec BuildYoltSpec(int n_classes, int n_boxes, int input_size = 416);

// Output shape of every layer, replayed symbolically from the spec.
std::vector<Shape3> ShapeChain(const NetworkSpec& net);

// Rows in the Layer / Type / Filters / Size/Stride / Output Size layout.
std::string FormatLayerTable(const NetworkSpec& net);

struct LayerWeights {
  std::optional<kernels::BatchNormParams> batch_norm;
  kernels::ConvParams conv;
};

// Immutable once built. Holds one entry per layer; non-conv layers have an
// empty entry.
class WeightStore {
 public:
  WeightStore() = default;
  // Validates every conv layer against the spec; throws kShape naming the
  // layer index on mismatch and kNumeric on non-finite values.
  WeightStore(const NetworkSpec& net, std::vector<LayerWeights> layers);

  const std::vector<LayerWeights>& layers() const { return layers_; }
  const kernels::PackedConv& packed(size_t layer) const {
    return packed_[layer];
  }

 private:
  std::vector<LayerWeights> layers_;
  std::vector<kernels::PackedConv> packed_;
};

// He-scaled normal conv weights, identity batch norms, zero biases.
WeightStore RandomWeights(const NetworkSpec& net, uint64_t seed);

// JSON manifest plus a little-endian float32 blob stored next to it. Per conv
// layer the blob holds [bn scale, bn bias, bn mean, bn var, conv weights,
// conv bias (only without bn)], conv weights in [filter][channel][ky][kx]
// order.
void SaveWeights(const NetworkSpec& net, const WeightStore& weights,
                 const std::filesystem::path& manifest_path);
WeightStore LoadWeights(const NetworkSpec& net,
                        const std::filesystem::path& manifest_path);
// Reads n_classes / n_boxes / input_size from a manifest.
NetworkSpec SpecFromWeights(const std::filesystem::path& manifest_path);

// Full forward pass. Throws kShape when x is not input_size^2 x 3.
Tensor Forward(const NetworkSpec& net, const WeightStore& weights,
               const Tensor& x,
               kernels::Exec exec = kernels::Exec::kParallel,
               std::vector<Shape3>* layer_shapes = nullptr);

// Space-to-depth on `fine` appended after the channels of `coarse`.
Tensor Passthrough(const Tensor& fine, const Tensor& coarse);

struct Anchor {
  double w = 1.0;  // grid cells
  double h = 1.0;
};

// n square priors spaced linearly from 0.5 to 8 grid cells.
std::vector<Anchor> DefaultAnchors(int n_boxes = 5);

// Decodes a G x G x N_f head into detections in chip pixels. class_id is the
// network's class index (argmax of the class softmax); confidence is
// sigmoid(objectness) * softmax(class). Boxes are clipped to [0, chip_size]^2.
std::vector<Detection> DecodeGrid(const Tensor& y,
                                  const std::vector<Anchor>& anchors,
                                  double conf_threshold, double chip_size);

}  // namespace gigadetect

#endif  // GIGADETECT_NETWORK_HPP_
