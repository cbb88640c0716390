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

#ifndef GIGADETECT_EVALUATION_HPP_
#define GIGADETECT_EVALUATION_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gigadetect/geometry.hpp"
#include "gigadetect/raster.hpp"

namespace gigadetect {

struct MatchPair {
  size_t det_index = 0;
  size_t gt_index = 0;
  double iou = 0.0;
};

struct MatchResult {
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
  std::vector<MatchPair> pairs;
};

// Vehicles are commonly scored at 0.25, everything else at 0.5.
struct IouThresholds {
  double default_iou = 0.5;
  std::map<int, double> per_class;

  double For(int class_id) const;
};

// Greedy matching. Detections are visited in canonical order (confidence
// descending); each takes the unmatched truth with the highest IOU at or above
// the threshold, lowest truth index on ties. With class_aware, only equal class
// ids can match. Indices in `pairs` refer to the input spans.
MatchResult Match(std::span<const Detection> dets,
                  std::span<const Detection> gts, double iou_threshold,
                  bool class_aware = true);
MatchResult Match(std::span<const Detection> dets,
                  std::span<const Detection> gts,
                  const IouThresholds& thresholds, bool class_aware = true);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Undefined ratios count as 0.
PrecisionRecall F1FromCounts(size_t tp, size_t fp, size_t fn);

struct SceneCount {
  size_t predicted = 0;
  size_t truth = 0;
};

struct CountMetrics {
  std::vector<double> fc;
  double total_count_error = 0.0;
};

// F_c = predicted / truth per scene; total error = |sum pred - sum truth| /
// sum truth. Throws kInvalidArgument for a scene with no truth.
CountMetrics ComputeCountMetrics(std::span<const SceneCount> scenes);

struct WeightedStats {
  double mean = 0.0;
  double std = 0.0;
};

// Population statistics. Throws kInvalidArgument when empty, on size mismatch
// or a non-positive weight.
WeightedStats ComputeWeightedStats(std::span<const double> values,
                                   std::span<const double> weights);

struct SceneInput {
  std::string scene_id;
  std::vector<Detection> detections;
  std::vector<Detection> truth;
  // Carried into the report for resolution curves.
  std::optional<double> gsd;
};

struct SceneResult {
  std::string scene_id;
  std::optional<double> gsd;
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fc = 0.0;
  size_t n_truth = 0;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Pooled over every scene.
  double fc = 0.0;
  double total_count_error = 0.0;
  std::vector<SceneResult> per_scene;
  double weighted_mean_f1 = 0.0;
  double weighted_std_f1 = 0.0;
};

// Scenes are scored independently and in parallel; totals pool the counts.
// Weighted statistics weight each scene by its truth count. Throws
// kInvalidArgument when no scene has truth.
EvalReport Evaluate(std::span<const SceneInput> scenes,
                    const IouThresholds& thresholds, bool class_aware = true);

struct PiecewiseFit {
  double breakpoint = 0.0;
  double slope_left = 0.0;
  double slope_right = 0.0;
  double value_at_breakpoint = 0.0;
  double sse = 0.0;

  double operator()(double x) const;
};

inline constexpr double kBreakpointStep = 0.01;

// Continuous two-segment least squares with the breakpoint searched on a grid
// of `step` over [min x, max x]; the smallest breakpoint wins ties. Throws
// kInvalidArgument for fewer than four points, mismatched sizes or x not
// strictly increasing.
PiecewiseFit FitPiecewise(std::span<const double> xs, std::span<const double> ys,
                          double step = kBreakpointStep);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double sse = 0.0;
};

LineFit FitLine(std::span<const double> xs, std::span<const double> ys);

struct SynthScene {
  Raster image;
  // Global pixel frame, confidence 1.
  std::vector<Detection> truth;
};

struct SynthOptions {
  int64_t width = 0;
  int64_t height = 0;
  size_t n_objects = 0;
  int64_t object_px = 10;
  uint64_t seed = 0;
  int class_id = 0;
  // Placed first and kept verbatim; must be object_px squares inside the image.
  std::vector<PixelBox> fixed_boxes;
  size_t max_attempts_per_object = 1000;
};

// Dark noise background with bright squares at pairwise disjoint planted
// boxes, at least one pixel apart. Throws kInfeasible when a box cannot be
// placed within the attempt budget.
SynthScene MakeSynthScene(const SynthOptions& options);

// `count` object_px squares centred on interior tile corners of the plan for
// (window, overlap), so each one crosses both a column and a row boundary.
// Throws kInfeasible when the plan has fewer than `count` interior corners.
std::vector<PixelBox> StraddlingBoxes(int64_t width, int64_t height,
                                      int64_t window, double overlap,
                                      int object_px, size_t count);

}  // namespace gigadetect

#endif  // GIGADETECT_EVALUATION_HPP_
