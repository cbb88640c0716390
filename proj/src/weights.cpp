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

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>

#include "gigadetect/error.hpp"
#include "gigadetect/network.hpp"
#include "json.hpp"

namespace gigadetect {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kFormatTag = "gigadetect-weights";
constexpr int kFormatVersion = 1;

uint32_t ByteSwap(uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

void AppendLittleEndian(std::vector<char>& blob, const std::vector<float>& v) {
  for (float f : v) {
    uint32_t bits = std::bit_cast<uint32_t>(f);
    if constexpr (std::endian::native == std::endian::big) bits = ByteSwap(bits);
    char bytes[4];
    std::memcpy(bytes, &bits, 4);
    blob.insert(blob.end(), bytes, bytes + 4);
  }
}

std::vector<float> ReadLittleEndian(const std::vector<char>& blob,
                                    size_t& offset, size_t count,
                                    size_t layer) {
  if (offset + count * 4 > blob.size()) {
    Fail(ErrorCode::kShape,
         fmt::format("layer {}: weight blob ends after {} bytes, need {}",
                     layer, blob.size(), offset + count * 4));
  }
  std::vector<float> out(count);
  for (size_t i = 0; i < count; ++i) {
    uint32_t bits;
    std::memcpy(&bits, blob.data() + offset + 4 * i, 4);
    if constexpr (std::endian::native == std::endian::big) bits = ByteSwap(bits);
    out[i] = std::bit_cast<float>(bits);
  }
  offset += count * 4;
  return out;
}

fs::path BlobPath(const fs::path& manifest_path) {
  fs::path blob = manifest_path;
  blob.replace_extension(".bin");
  return blob;
}

json ReadManifest(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    Fail(ErrorCode::kIo,
         fmt::format("cannot open weight manifest {}", manifest_path.string()));
  }
  try {
    json j = json::parse(in);
    if (j.at("format").get<std::string>() != kFormatTag ||
        j.at("version").get<int>() != kFormatVersion) {
      Fail(ErrorCode::kSchema,
           fmt::format("{}: not a version {} {} manifest",
                       manifest_path.string(), kFormatVersion, kFormatTag));
    }
    return j;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kSchema,
         fmt::format("{}: {}", manifest_path.string(), e.what()));
  }
}

}  // namespace

void SaveWeights(const NetworkSpec& net, const WeightStore& weights,
                 const fs::path& manifest_path) {
  std::vector<char> blob;
  json layers = json::array();
  for (size_t i = 0; i < net.layers.size(); ++i) {
    if (net.layers[i].kind != LayerKind::kConv) continue;
    const LayerWeights& lw = weights.layers()[i];
    const size_t offset = blob.size();
    if (lw.batch_norm) {
      AppendLittleEndian(blob, lw.batch_norm->scale);
      AppendLittleEndian(blob, lw.batch_norm->bias);
      AppendLittleEndian(blob, lw.batch_norm->mean);
      AppendLittleEndian(blob, lw.batch_norm->variance);
    }
    AppendLittleEndian(blob, lw.conv.weights);
    if (!lw.batch_norm) AppendLittleEndian(blob, lw.conv.bias);
    layers.push_back({{"index", i},
                      {"kind", "conv"},
                      {"filters", lw.conv.filters},
                      {"size", lw.conv.size},
                      {"in_channels", lw.conv.in_channels},
                      {"batch_norm", lw.batch_norm.has_value()},
                      {"offset", offset},
                      {"count", (blob.size() - offset) / 4}});
  }
  const fs::path blob_path = BlobPath(manifest_path);
  json manifest = {{"format", kFormatTag},
                   {"version", kFormatVersion},
                   {"n_classes", net.n_classes},
                   {"n_boxes", net.n_boxes},
                   {"input_size", net.input_size},
                   {"blob", blob_path.filename().string()},
                   {"layers", std::move(layers)}};

  std::ofstream bin(blob_path, std::ios::binary);
  bin.write(blob.data(), std::streamsize(blob.size()));
  std::ofstream out(manifest_path);
  out << manifest.dump(2) << '\n';
  if (!bin || !out) {
    Fail(ErrorCode::kIo,
         fmt::format("cannot write weights to {}", manifest_path.string()));
  }
}

NetworkSpec SpecFromWeights(const fs::path& manifest_path) {
  const json j = ReadManifest(manifest_path);
  try {
    return BuildYoltSpec(j.at("n_classes").get<int>(),
                         j.at("n_boxes").get<int>(),
                         j.at("input_size").get<int>());
  } catch (const json::exception& e) {
    Fail(ErrorCode::kSchema,
         fmt::format("{}: {}", manifest_path.string(), e.what()));
  }
}

WeightStore LoadWeights(const NetworkSpec& net,
                        const fs::path& manifest_path) {
  const json manifest = ReadManifest(manifest_path);
  const fs::path blob_path =
      manifest_path.parent_path() / manifest.value("blob", "");
  std::ifstream bin(blob_path, std::ios::binary);
  if (!bin) {
    Fail(ErrorCode::kIo,
         fmt::format("cannot open weight blob {}", blob_path.string()));
  }
  const std::vector<char> blob((std::istreambuf_iterator<char>(bin)),
                               std::istreambuf_iterator<char>());

  const auto shapes = ShapeChain(net);
  std::vector<LayerWeights> layers(net.layers.size());
  try {
    for (const auto& entry : manifest.at("layers")) {
      const size_t i = entry.at("index").get<size_t>();
      if (i >= net.layers.size() || net.layers[i].kind != LayerKind::kConv) {
        Fail(ErrorCode::kShape,
             fmt::format("layer {}: manifest has conv weights for a non-conv "
                         "layer",
                         i));
      }
      const LayerSpec& spec = net.layers[i];
      LayerWeights& lw = layers[i];
      lw.conv.filters = entry.at("filters").get<int>();
      lw.conv.size = entry.at("size").get<int>();
      lw.conv.in_channels = entry.at("in_channels").get<int>();
      const int expected_c =
          i == 0 ? NetworkSpec::kInputChannels : shapes[i - 1].c;
      if (lw.conv.filters != spec.filters || lw.conv.size != spec.size ||
          lw.conv.in_channels != expected_c) {
        Fail(ErrorCode::kShape,
             fmt::format("layer {}: manifest declares {} filters {}x{} over {} "
                         "channels, network needs {} filters {}x{} over {}",
                         i, lw.conv.filters, lw.conv.size, lw.conv.size,
                         lw.conv.in_channels, spec.filters, spec.size,
                         spec.size, expected_c));
      }
      const size_t f = size_t(lw.conv.filters);
      size_t offset = entry.at("offset").get<size_t>();
      if (entry.at("batch_norm").get<bool>()) {
        kernels::BatchNormParams bn;
        bn.scale = ReadLittleEndian(blob, offset, f, i);
        bn.bias = ReadLittleEndian(blob, offset, f, i);
        bn.mean = ReadLittleEndian(blob, offset, f, i);
        bn.variance = ReadLittleEndian(blob, offset, f, i);
        lw.batch_norm = std::move(bn);
      }
      lw.conv.weights = ReadLittleEndian(
          blob, offset,
          f * size_t(lw.conv.in_channels) * lw.conv.size * lw.conv.size, i);
      lw.conv.bias = lw.batch_norm ? std::vector<float>(f, 0.0f)
                                   : ReadLittleEndian(blob, offset, f, i);
    }
  } catch (const json::exception& e) {
    Fail(ErrorCode::kSchema,
         fmt::format("{}: {}", manifest_path.string(), e.what()));
  }
  for (size_t i = 0; i < net.layers.size(); ++i) {
    if (net.layers[i].kind == LayerKind::kConv && layers[i].conv.filters == 0) {
      Fail(ErrorCode::kShape,
           fmt::format("layer {}: no weights in manifest", i));
    }
  }
  return WeightStore(net, std::move(layers));
}

}  // namespace gigadetect
