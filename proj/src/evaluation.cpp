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

#include "gigadetect/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "gigadetect/error.hpp"

namespace gigadetect {

double IouThresholds::For(int class_id) const {
  const auto it = per_class.find(class_id);
  return it == per_class.end() ? default_iou : it->second;
}

namespace {

void CheckThreshold(double t) {
  if (!(t > 0.0 && t <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument,
         fmt::format("IOU threshold {} must be in (0, 1]", t));
  }
}

}  // namespace

MatchResult Match(std::span<const Detection> dets,
                  std::span<const Detection> gts,
                  const IouThresholds& thresholds, bool class_aware) {
  CheckThreshold(thresholds.default_iou);
  for (const auto& [cls, t] : thresholds.per_class) CheckThreshold(t);

  std::vector<size_t> order(dets.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return CanonicalLess(dets[a], dets[b]);
  });

  MatchResult result;
  std::vector<bool> taken(gts.size(), false);
  for (size_t di : order) {
    const Detection& d = dets[di];
    const double thr = thresholds.For(d.class_id);
    size_t best = gts.size();
    double best_iou = -1.0;
    for (size_t gi = 0; gi < gts.size(); ++gi) {
      if (taken[gi]) continue;
      if (class_aware && gts[gi].class_id != d.class_id) continue;
      const double iou = Iou(d.box, gts[gi].box);
      if (iou >= thr && iou > best_iou) {
        best = gi;
        best_iou = iou;
      }
    }
    if (best == gts.size()) {
      ++result.fp;
      continue;
    }
    taken[best] = true;
    result.pairs.push_back({di, best, best_iou});
  }
  result.tp = result.pairs.size();
  result.fn = gts.size() - result.tp;
  return result;
}

MatchResult Match(std::span<const Detection> dets,
                  std::span<const Detection> gts, double iou_threshold,
                  bool class_aware) {
  IouThresholds t;
  t.default_iou = iou_threshold;
  return Match(dets, gts, t, class_aware);
}

PrecisionRecall F1FromCounts(size_t tp, size_t fp, size_t fn) {
  PrecisionRecall out;
  if (tp + fp > 0) out.precision = double(tp) / double(tp + fp);
  if (tp + fn > 0) out.recall = double(tp) / double(tp + fn);
  if (out.precision + out.recall > 0.0) {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

CountMetrics ComputeCountMetrics(std::span<const SceneCount> scenes) {
  Require(!scenes.empty(), "count metrics need at least one scene");
  CountMetrics out;
  double pred = 0.0, truth = 0.0;
  for (size_t i = 0; i < scenes.size(); ++i) {
    if (scenes[i].truth == 0) {
      Fail(ErrorCode::kInvalidArgument,
           fmt::format("scene {} has no truth; F_c is undefined", i));
    }
    out.fc.push_back(double(scenes[i].predicted) / double(scenes[i].truth));
    pred += double(scenes[i].predicted);
    truth += double(scenes[i].truth);
  }
  out.total_count_error = std::abs(pred - truth) / truth;
  return out;
}

WeightedStats ComputeWeightedStats(std::span<const double> values,
                                   std::span<const double> weights) {
  Require(!values.empty(), "weighted statistics need at least one value");
  Require(values.size() == weights.size(), "values and weights differ in size");
  double wsum = 0.0, acc = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    Require(weights[i] > 0.0, "weights must be > 0");
    wsum += weights[i];
    acc += weights[i] * values[i];
  }
  WeightedStats out;
  out.mean = acc / wsum;
  double var = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - out.mean;
    var += weights[i] * d * d;
  }
  out.std = std::sqrt(var / wsum);
  return out;
}

EvalReport Evaluate(std::span<const SceneInput> scenes,
                    const IouThresholds& thresholds, bool class_aware) {
  Require(!scenes.empty(), "evaluation needs at least one scene");
  CheckThreshold(thresholds.default_iou);
  EvalReport report;
  report.per_scene.resize(scenes.size());
  const int64_t n = int64_t(scenes.size());
  std::vector<std::string> errors(scenes.size());

#pragma omp parallel for schedule(dynamic)
  for (int64_t i = 0; i < n; ++i) {
    try {
      const SceneInput& s = scenes[size_t(i)];
      const MatchResult m =
          Match(s.detections, s.truth, thresholds, class_aware);
      const PrecisionRecall pr = F1FromCounts(m.tp, m.fp, m.fn);
      SceneResult& r = report.per_scene[size_t(i)];
      r.scene_id = s.scene_id;
      r.gsd = s.gsd;
      r.tp = m.tp;
      r.fp = m.fp;
      r.fn = m.fn;
      r.precision = pr.precision;
      r.recall = pr.recall;
      r.f1 = pr.f1;
      r.n_truth = s.truth.size();
      r.fc = r.n_truth > 0 ? double(s.detections.size()) / double(r.n_truth)
                           : 0.0;
    } catch (const std::exception& e) {
      errors[size_t(i)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) Fail(ErrorCode::kInvalidArgument, e);
  }

  size_t tp = 0, fp = 0, fn = 0, n_pred = 0, n_truth = 0;
  std::vector<double> f1s, weights;
  for (size_t i = 0; i < scenes.size(); ++i) {
    const SceneResult& r = report.per_scene[i];
    tp += r.tp;
    fp += r.fp;
    fn += r.fn;
    n_pred += scenes[i].detections.size();
    n_truth += r.n_truth;
    if (r.n_truth > 0) {
      f1s.push_back(r.f1);
      weights.push_back(double(r.n_truth));
    }
  }
  if (n_truth == 0) {
    Fail(ErrorCode::kInvalidArgument, "no scene has any truth objects");
  }
  const PrecisionRecall pr = F1FromCounts(tp, fp, fn);
  report.precision = pr.precision;
  report.recall = pr.recall;
  report.f1 = pr.f1;
  report.fc = double(n_pred) / double(n_truth);
  report.total_count_error =
      std::abs(double(n_pred) - double(n_truth)) / double(n_truth);
  const WeightedStats ws = ComputeWeightedStats(f1s, weights);
  report.weighted_mean_f1 = ws.mean;
  report.weighted_std_f1 = ws.std;
  return report;
}

}  // namespace gigadetect
