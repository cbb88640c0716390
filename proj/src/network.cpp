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

#include "gigadetect/network.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "gigadetect/error.hpp"

namespace gigadetect {
namespace {

LayerSpec Conv(int filters, int size) {
  return {LayerKind::kConv, filters, size, 1, -1, Activation::kLeaky, true};
}

LayerSpec Pool() {
  return {LayerKind::kMaxpool, 0, 2, 2, -1, Activation::kLinear, false};
}

}  // namespace

NetworkSpec BuildYoltSpec(int n_classes, int n_boxes, int input_size) {
  Require(n_classes >= 1, "n_classes must be >= 1");
  Require(n_boxes >= 1, "n_boxes must be >= 1");
  Require(input_size >= 32 && input_size % 32 == 0,
          fmt::format("input size {} must be a positive multiple of 32",
                      input_size));

  NetworkSpec net;
  net.n_classes = n_classes;
  net.n_boxes = n_boxes;
  net.input_size = input_size;
  net.layers = {
      Conv(32, 3),   Pool(),         Conv(64, 3),   Pool(),
      Conv(128, 3),  Conv(64, 1),    Conv(128, 3),  Pool(),
      Conv(256, 3),  Conv(128, 1),   Conv(256, 3),  Pool(),
      Conv(512, 3),  Conv(256, 1),   Conv(512, 3),  Conv(256, 1),
      Conv(512, 3),  Conv(1024, 3),  Conv(1024, 3),
      LayerSpec{LayerKind::kPassthrough, 0, 0, 0, 10, Activation::kLinear,
                false},
      Conv(1024, 3),
      LayerSpec{LayerKind::kConv, net.OutputFilters(), 1, 1, -1,
                Activation::kLinear, false},
  };
  return net;
}

std::vector<Shape3> ShapeChain(const NetworkSpec& net) {
  std::vector<Shape3> shapes;
  shapes.reserve(net.layers.size());
  Shape3 current{net.input_size, net.input_size, NetworkSpec::kInputChannels};
  for (size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& layer = net.layers[i];
    switch (layer.kind) {
      case LayerKind::kConv:
        current = {current.h, current.w, layer.filters};
        break;
      case LayerKind::kMaxpool:
        current = {current.h / 2, current.w / 2, current.c};
        break;
      case LayerKind::kPassthrough: {
        if (layer.source_layer < 0 || size_t(layer.source_layer) >= i) {
          Fail(ErrorCode::kShape,
               fmt::format("layer {}: passthrough source {} must precede it",
                           i, layer.source_layer));
        }
        const Shape3 fine = shapes[layer.source_layer];
        if (fine.h != 2 * current.h || fine.w != 2 * current.w) {
          Fail(ErrorCode::kShape,
               fmt::format("layer {}: passthrough source {} is {}, expected "
                           "twice {}",
                           i, layer.source_layer, fine.ToString(),
                           current.ToString()));
        }
        current = {current.h, current.w, current.c + 4 * fine.c};
        break;
      }
    }
    shapes.push_back(current);
  }
  return shapes;
}

std::string FormatLayerTable(const NetworkSpec& net) {
  const auto shapes = ShapeChain(net);
  std::string out = fmt::format("{:<6}{:<16}{:>8}  {:<12}{}\n", "Layer",
                                "Type", "Filters", "Size/Stride",
                                "Output Size");
  for (size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& l = net.layers[i];
    const Shape3& s = shapes[i];
    const std::string size =
        fmt::format("{}x{}x{}", s.h, s.w, s.c);
    switch (l.kind) {
      case LayerKind::kConv:
        out += fmt::format("{:<6}{:<16}{:>8}  {:<12}{}\n", i, "Convolutional",
                           l.filters,
                           fmt::format("{}x{} / {}", l.size, l.size, l.stride),
                           size);
        break;
      case LayerKind::kMaxpool:
        out += fmt::format("{:<6}{:<16}{:>8}  {:<12}{}\n", i, "Maxpool", "",
                           fmt::format("{}x{} / {}", l.size, l.size, l.stride),
                           size);
        break;
      case LayerKind::kPassthrough:
        out += fmt::format("{:<6}{:<16}{:>8}  {:<12}{}\n", i, "Passthrough",
                           "", fmt::format("{} -> {}", l.source_layer, i + 1),
                           size);
        break;
    }
  }
  return out;
}

WeightStore::WeightStore(const NetworkSpec& net,
                         std::vector<LayerWeights> layers)
    : layers_(std::move(layers)) {
  if (layers_.size() != net.layers.size()) {
    Fail(ErrorCode::kShape,
         fmt::format("weight store has {} layers, network has {}",
                     layers_.size(), net.layers.size()));
  }
  const auto shapes = ShapeChain(net);
  packed_.resize(layers_.size());
  for (size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& spec = net.layers[i];
    if (spec.kind != LayerKind::kConv) continue;
    const int in_c =
        i == 0 ? NetworkSpec::kInputChannels : shapes[i - 1].c;
    const LayerWeights& lw = layers_[i];
    if (lw.conv.filters != spec.filters || lw.conv.size != spec.size ||
        lw.conv.in_channels != in_c) {
      Fail(ErrorCode::kShape,
           fmt::format("layer {}: weights are {} filters {}x{} over {} "
                       "channels, expected {} filters {}x{} over {}",
                       i, lw.conv.filters, lw.conv.size, lw.conv.size,
                       lw.conv.in_channels, spec.filters, spec.size,
                       spec.size, in_c));
    }
    if (spec.batch_norm != lw.batch_norm.has_value()) {
      Fail(ErrorCode::kShape,
           fmt::format("layer {}: batch norm parameters {}", i,
                       spec.batch_norm ? "missing" : "unexpected"));
    }
    if (lw.batch_norm) {
      const auto& bn = *lw.batch_norm;
      const size_t f = size_t(spec.filters);
      if (bn.scale.size() != f || bn.bias.size() != f ||
          bn.mean.size() != f || bn.variance.size() != f) {
        Fail(ErrorCode::kShape,
             fmt::format("layer {}: batch norm needs {} values per vector", i,
                         f));
      }
      for (const auto* v : {&bn.scale, &bn.bias, &bn.mean, &bn.variance}) {
        for (float x : *v) {
          if (!std::isfinite(x)) {
            Fail(ErrorCode::kNumeric,
                 fmt::format("layer {}: non-finite batch norm value", i));
          }
        }
      }
    }
    try {
      packed_[i] = kernels::Pack(lw.conv);
    } catch (const Error& e) {
      Fail(e.code(), fmt::format("layer {}: {}", i, e.what()));
    }
  }
}

WeightStore RandomWeights(const NetworkSpec& net, uint64_t seed) {
  const auto shapes = ShapeChain(net);
  std::mt19937_64 rng(seed);
  std::vector<LayerWeights> layers(net.layers.size());
  for (size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& spec = net.layers[i];
    if (spec.kind != LayerKind::kConv) continue;
    const int in_c = i == 0 ? NetworkSpec::kInputChannels : shapes[i - 1].c;
    const double fan_in = double(in_c) * spec.size * spec.size;
    // Leaky layers get He scaling; the linear head stays near unit variance.
    const double stddev =
        std::sqrt((spec.activation == Activation::kLeaky ? 2.0 : 1.0) / fan_in);
    std::normal_distribution<float> dist(0.0f, float(stddev));

    kernels::ConvParams conv;
    conv.filters = spec.filters;
    conv.size = spec.size;
    conv.in_channels = in_c;
    conv.weights.resize(size_t(spec.filters) * in_c * spec.size * spec.size);
    for (auto& w : conv.weights) w = dist(rng);
    conv.bias.assign(size_t(spec.filters), 0.0f);
    layers[i].conv = std::move(conv);
    if (spec.batch_norm) {
      const size_t f = size_t(spec.filters);
      layers[i].batch_norm = kernels::BatchNormParams{
          std::vector<float>(f, 1.0f), std::vector<float>(f, 0.0f),
          std::vector<float>(f, 0.0f), std::vector<float>(f, 1.0f)};
    }
  }
  return WeightStore(net, std::move(layers));
}

Tensor Passthrough(const Tensor& fine, const Tensor& coarse) {
  if (fine.h() != 2 * coarse.h() || fine.w() != 2 * coarse.w()) {
    Fail(ErrorCode::kShape,
         fmt::format("passthrough: fine {} must be twice coarse {} spatially",
                     fine.shape().ToString(), coarse.shape().ToString()));
  }
  return kernels::ConcatChannels(coarse, kernels::SpaceToDepth(fine));
}

Tensor Forward(const NetworkSpec& net, const WeightStore& weights,
               const Tensor& x, kernels::Exec exec,
               std::vector<Shape3>* layer_shapes) {
  const Shape3 expected{net.input_size, net.input_size,
                        NetworkSpec::kInputChannels};
  if (x.shape() != expected) {
    Fail(ErrorCode::kShape,
         fmt::format("network input must be {}, got {}", expected.ToString(),
                     x.shape().ToString()));
  }
  if (weights.layers().size() != net.layers.size()) {
    Fail(ErrorCode::kShape,
         fmt::format("weight store has {} layers, network has {}",
                     weights.layers().size(), net.layers.size()));
  }

  std::vector<bool> keep(net.layers.size(), false);
  for (const auto& l : net.layers) {
    if (l.kind == LayerKind::kPassthrough) keep[size_t(l.source_layer)] = true;
  }
  std::vector<Tensor> saved(net.layers.size());
  if (layer_shapes) layer_shapes->clear();

  Tensor current = x;
  for (size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& layer = net.layers[i];
    switch (layer.kind) {
      case LayerKind::kConv: {
        try {
          current = kernels::Conv2d(current, weights.packed(i), exec);
        } catch (const Error& e) {
          Fail(e.code(), fmt::format("layer {}: {}", i, e.what()));
        }
        const auto& bn = weights.layers()[i].batch_norm;
        if (bn) kernels::BatchNormLeaky(current, *bn, exec);
        break;
      }
      case LayerKind::kMaxpool:
        current = kernels::Maxpool2x2(current, exec);
        break;
      case LayerKind::kPassthrough:
        try {
          current = Passthrough(saved[size_t(layer.source_layer)], current);
        } catch (const Error& e) {
          Fail(e.code(), fmt::format("layer {}: {}", i, e.what()));
        }
        break;
    }
    if (layer_shapes) layer_shapes->push_back(current.shape());
    if (keep[i]) saved[i] = current;
  }
  return current;
}

std::vector<Anchor> DefaultAnchors(int n_boxes) {
  Require(n_boxes >= 1, "n_boxes must be >= 1");
  std::vector<Anchor> anchors;
  for (int b = 0; b < n_boxes; ++b) {
    const double s =
        n_boxes == 1 ? 0.5 : 0.5 + (8.0 - 0.5) * b / double(n_boxes - 1);
    anchors.push_back({s, s});
  }
  return anchors;
}

}  // namespace gigadetect
