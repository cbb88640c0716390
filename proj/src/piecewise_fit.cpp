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

#include <Eigen/Dense>
#include <fmt/format.h>

#include "gigadetect/error.hpp"
#include "gigadetect/evaluation.hpp"

namespace gigadetect {
namespace {

void CheckSeries(std::span<const double> xs, std::span<const double> ys,
                 size_t min_points) {
  if (xs.size() != ys.size()) {
    Fail(ErrorCode::kInvalidArgument,
         fmt::format("{} x values but {} y values", xs.size(), ys.size()));
  }
  if (xs.size() < min_points) {
    Fail(ErrorCode::kInvalidArgument,
         fmt::format("fit needs at least {} points, got {}", min_points,
                     xs.size()));
  }
  for (size_t i = 0; i < xs.size(); ++i) {
    Require(std::isfinite(xs[i]) && std::isfinite(ys[i]),
            "fit data must be finite");
    if (i > 0 && !(xs[i] > xs[i - 1])) {
      Fail(ErrorCode::kInvalidArgument,
           fmt::format("x values must be strictly increasing (index {})", i));
    }
  }
}

LineFit FitLineUnchecked(std::span<const double> xs,
                         std::span<const double> ys) {
  const Eigen::Index n = Eigen::Index(xs.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = xs[size_t(i)];
    b(i) = ys[size_t(i)];
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  return {coef(0), coef(1), (a * coef - b).squaredNorm()};
}

}  // namespace

double PiecewiseFit::operator()(double x) const {
  const double d = x - breakpoint;
  return value_at_breakpoint + (d < 0.0 ? slope_left : slope_right) * d;
}

LineFit FitLine(std::span<const double> xs, std::span<const double> ys) {
  CheckSeries(xs, ys, 2);
  return FitLineUnchecked(xs, ys);
}

PiecewiseFit FitPiecewise(std::span<const double> xs,
                          std::span<const double> ys, double step) {
  CheckSeries(xs, ys, 4);
  Require(step > 0.0, "breakpoint step must be > 0");
  const double lo = xs.front(), hi = xs.back();
  const int64_t n_steps = int64_t(std::floor((hi - lo) / step + 1e-9));
  const Eigen::Index n = Eigen::Index(xs.size());

  PiecewiseFit best;
  for (int64_t k = 0; k <= n_steps; ++k) {
    const double b = std::min(lo + double(k) * step, hi);
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd y(n);
    bool left_used = false, right_used = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = xs[size_t(i)] - b;
      a(i, 0) = 1.0;
      a(i, 1) = std::min(d, 0.0);
      a(i, 2) = std::max(d, 0.0);
      left_used |= d < 0.0;
      right_used |= d > 0.0;
      y(i) = ys[size_t(i)];
    }
    PiecewiseFit cand;
    cand.breakpoint = b;
    if (left_used && right_used) {
      const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
      cand.value_at_breakpoint = coef(0);
      cand.slope_left = coef(1);
      cand.slope_right = coef(2);
      cand.sse = (a * coef - y).squaredNorm();
    } else {
      // One segment is empty: a single line through the data.
      const LineFit line = FitLineUnchecked(xs, ys);
      cand.value_at_breakpoint = line.intercept + line.slope * b;
      cand.slope_left = cand.slope_right = line.slope;
      cand.sse = line.sse;
    }
    if (k == 0 || cand.sse < best.sse - (1e-9 * best.sse + 1e-12)) {
      best = cand;
    }
  }
  return best;
}

}  // namespace gigadetect
