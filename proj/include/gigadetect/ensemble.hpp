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

#ifndef GIGADETECT_ENSEMBLE_HPP_
#define GIGADETECT_ENSEMBLE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gigadetect/network.hpp"
#include "gigadetect/raster.hpp"
#include "gigadetect/stitcher.hpp"
#include "gigadetect/tiler.hpp"
#include "json.hpp"

namespace gigadetect {

inline constexpr double kDefaultConfThreshold = 0.35;

// One ensemble member: how much ground a chip covers, how much the image is
// downsampled first, and which classes this member may report.
struct ScaleProfile {
  std::string scale_id;
  double chip_size_m = 200.0;
  int downsample_factor = 1;
  std::vector<int> class_ids;
  std::string backend = "mock";
  std::string weights_path;
  // Forces the chip window in pixels of the (downsampled) raster.
  std::optional<int64_t> window_px;

  // chip_size_m / (gsd * downsample_factor), rounded to the nearest pixel,
  // unless overridden.
  int64_t WindowPx(double gsd) const;
  bool HasClass(int class_id) const;
};

// 200 m vehicles+buildings at native resolution and 2500 m airports on a
// 4x-downsampled raster, over DefaultClasses() ids.
std::vector<ScaleProfile> DefaultProfiles();

std::vector<ScaleProfile> ProfilesFromJson(const nlohmann::json& j);
nlohmann::json ProfilesToJson(std::span<const ScaleProfile> profiles);
std::vector<ScaleProfile> LoadProfiles(const std::filesystem::path& path);

struct ChipContext {
  TileSpec tile;              // in the frame of the raster being tiled
  int downsample_factor = 1;  // that raster's factor relative to native
};

// Contract: Detect returns boxes in chip pixels with confidences in [0, 1],
// restricted to profile.class_ids and deterministic for a given chip.
class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;
  virtual std::vector<Detection> Detect(const RasterView& chip,
                                        const ScaleProfile& profile,
                                        const ChipContext& context) const = 0;
  // False forces the runner to process chips one at a time.
  virtual bool ConcurrentSafe() const { return true; }
};

struct MockOracleConfig {
  std::vector<Detection> planted_truth;  // native image pixels
  double drop_prob = 0.0;
  double false_positives_per_tile = 0.0;
  double jitter_sigma_px = 0.0;
  uint64_t seed = 0;
  double spurious_size_px = 10.0;
};

inline constexpr double kMockTrueConfidence = 0.9;
inline constexpr double kMockSpuriousConfidence = 0.5;

// Test double that "detects" planted objects. An object is reported by every
// tile whose interior strictly contains its center. The drop decision is made
// once per planted object (seed, object index) so overlapping tiles agree;
// jitter and spurious boxes come from a stream keyed by (seed, tile row,
// tile col).
class MockOracle : public DetectorBackend {
 public:
  explicit MockOracle(MockOracleConfig config);

  std::vector<Detection> Detect(const RasterView& chip,
                                const ScaleProfile& profile,
                                const ChipContext& context) const override;

  // class_ids empty: every planted class passes and spurious boxes are
  // class 0.
  std::vector<Detection> DetectTile(const TileSpec& tile,
                                    int downsample_factor,
                                    std::span<const int> class_ids) const;

  const MockOracleConfig& config() const { return config_; }
  bool Dropped(size_t object_index) const;

 private:
  MockOracleConfig config_;
  std::vector<size_t> by_center_y_;  // planted indices sorted by center y
};

// Convenience wrapper: MockOracle(cfg).DetectTile(chip_spec, 1, {}).
std::vector<Detection> MockDetect(const TileSpec& chip_spec,
                                  const MockOracleConfig& cfg);

// Runs the from-scratch network on each chip, resized to the network input.
class NetworkBackend : public DetectorBackend {
 public:
  NetworkBackend(NetworkSpec net, WeightStore weights,
                 std::vector<Anchor> anchors, double decode_threshold = 0.01);

  // Weights from a manifest, or seeded random weights when path is empty.
  static std::unique_ptr<NetworkBackend> FromProfile(
      const ScaleProfile& profile, uint64_t seed, int input_size = 416);

  std::vector<Detection> Detect(const RasterView& chip,
                                const ScaleProfile& profile,
                                const ChipContext& context) const override;

 private:
  NetworkSpec net_;
  WeightStore weights_;
  std::vector<Anchor> anchors_;
  double decode_threshold_;
};

// Bilinear resize of a chip into a normalized [0, 1] network input tensor.
Tensor ChipToTensor(const RasterView& chip, int size);

struct RunOptions {
  double conf_threshold = kDefaultConfThreshold;
  double overlap = kDefaultOverlap;
  int workers = 0;  // 0: OpenMP default; 1: serial
};

struct ChipFailure {
  TileSpec tile;
  std::string message;
};

struct ScaleRun {
  std::string scale_id;
  int64_t window_px = 0;
  size_t tiles = 0;
  std::vector<Detection> detections;  // native frame, tagged with scale_id
  std::vector<ChipFailure> failures;
  size_t rejected_out_of_profile = 0;
};

// Optionally degrades the image by the profile's factor, tiles it, runs the
// backend per chip and globalizes what passes conf_threshold. A chip whose
// backend throws is recorded in `failures` and the run continues.
ScaleRun RunScale(const Raster& image, const ImageMeta& meta,
                  const ScaleProfile& profile, const DetectorBackend& backend,
                  const RunOptions& options = {});

struct EnsembleRun {
  GlobalDetectionSet merged;
  std::vector<ScaleRun> scales;  // detections left empty after merging
};

// Throws kInvalidArgument without profiles or when backends and profiles
// differ in count.
EnsembleRun RunEnsemble(const Raster& image, const ImageMeta& meta,
                        std::span<const ScaleProfile> profiles,
                        std::span<const DetectorBackend* const> backends,
                        const RunOptions& options = {},
                        double nms_iou = kDefaultMergeIou);

// Ground area of a w x h raster in square kilometres.
double AreaKm2(int64_t width, int64_t height, double gsd);
double Km2PerMinute(double area_km2, double seconds);

}  // namespace gigadetect

#endif  // GIGADETECT_ENSEMBLE_HPP_
