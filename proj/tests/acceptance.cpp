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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "gigadetect/ensemble.hpp"
#include "gigadetect/evaluation.hpp"
#include "gigadetect/imaging.hpp"
#include "gigadetect/kernels.hpp"
#include "gigadetect/network.hpp"
#include "gigadetect/stitcher.hpp"
#include "gigadetect/tiler.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using namespace gigadetect;
using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failed checks of a criterion.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_.push_back(what);
  }
  Outcome Finish(const std::string& summary) const {
    Outcome o;
    o.pass = failures_ == 0;
    o.detail = summary;
    if (!o.pass) {
      o.detail += fmt::format("; {} failed check(s): ", failures_);
      for (size_t i = 0; i < notes_.size(); ++i) {
        o.detail += (i ? " | " : "") + notes_[i];
      }
    }
    return o;
  }

 private:
  size_t failures_ = 0;
  std::vector<std::string> notes_;
};

fs::path ScratchDir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() /
                     fmt::format("gigadetect_accept_{}_{}", tag,
                                 std::random_device{}());
  fs::create_directories(p);
  return p;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int RunCli(const std::string& args, const fs::path& log) {
  const std::string cmd = fmt::format("\"{}\" {} > \"{}\" 2>&1",
                                      GIGADETECT_CLI_PATH, args, log.string());
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 1 -----------------------------------------------------------------------
Outcome ShapeChainCriterion() {
  Checker c;
  const NetworkSpec net = BuildYoltSpec(5, 5, 416);
  c.Expect(net.layers.size() == 22, "22 layers");
  c.Expect(net.OutputFilters() == 50, "N_f = 50");
  const std::vector<Shape3> expected = {
      {416, 416, 32}, {208, 208, 32}, {208, 208, 64}, {104, 104, 64},
      {104, 104, 128}, {104, 104, 64}, {104, 104, 128}, {52, 52, 128},
      {52, 52, 256},  {52, 52, 128},  {52, 52, 256},  {26, 26, 256},
      {26, 26, 512},  {26, 26, 256},  {26, 26, 512},  {26, 26, 256},
      {26, 26, 512},  {26, 26, 1024}, {26, 26, 1024}, {26, 26, 2048},
      {26, 26, 1024}, {26, 26, 50}};
  const auto chain = ShapeChain(net);
  for (size_t i = 0; i < expected.size() && i < chain.size(); ++i) {
    c.Expect(chain[i] == expected[i],
             fmt::format("layer {} is {}", i, chain[i].ToString()));
  }

  const WeightStore weights = RandomWeights(net, 2024);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  std::vector<float> values(size_t(416) * 416 * 3);
  for (float& v : values) v = u(rng);
  const Tensor x(Shape3{416, 416, 3}, std::move(values));
  const auto start = Clock::now();
  std::vector<Shape3> seen;
  const Tensor y = Forward(net, weights, x, kernels::Exec::kParallel, &seen);
  const double secs = Since(start);
  c.Expect(y.shape() == (Shape3{26, 26, 50}), "output " + y.shape().ToString());
  c.Expect(seen == chain, "forward shapes differ from the static chain");
  bool finite = true;
  for (float v : y.values()) finite &= std::isfinite(v);
  c.Expect(finite, "non-finite output");
  c.Expect(secs < 30.0, fmt::format("forward took {:.1f} s", secs));
  return c.Finish(fmt::format("26x26x50 head, forward {:.2f} s on {} thread(s)",
                              secs, omp_get_max_threads()));
}

// 2 -----------------------------------------------------------------------
double OracleConv(const Tensor& x, const kernels::ConvParams& p, int y0,
                  int x0, int f) {
  const int r = p.size / 2;
  double acc = p.bias[size_t(f)];
  for (int c = 0; c < p.in_channels; ++c) {
    for (int ky = 0; ky < p.size; ++ky) {
      for (int kx = 0; kx < p.size; ++kx) {
        const int yy = y0 + ky - r, xx = x0 + kx - r;
        if (yy < 0 || xx < 0 || yy >= x.h() || xx >= x.w()) continue;
        const size_t wi =
            ((size_t(f) * p.in_channels + c) * p.size + ky) * p.size + kx;
        acc += double(p.weights[wi]) * double(x.At(yy, xx, c));
      }
    }
  }
  return acc;
}

Outcome ConvOracleCriterion() {
  Checker c;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    kernels::ConvParams p;
    p.filters = 1 + int(rng() % 40);
    p.size = (t % 2 == 0) ? 3 : 1;
    p.in_channels = 3;
    p.weights.resize(size_t(p.filters) * 3 * p.size * p.size);
    for (float& w : p.weights) w = u(rng);
    p.bias.resize(size_t(p.filters));
    for (float& b : p.bias) b = u(rng);
    std::vector<float> v(8 * 8 * 3);
    for (float& e : v) e = u(rng);
    const Tensor x(Shape3{8, 8, 3}, std::move(v));
    for (auto exec : {kernels::Exec::kParallel, kernels::Exec::kSerial}) {
      const Tensor y = kernels::Conv2d(x, p, exec);
      for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
          for (int f = 0; f < p.filters; ++f) {
            worst = std::max(worst,
                             std::abs(OracleConv(x, p, i, j, f) - y.At(i, j, f)));
          }
        }
      }
    }
  }
  c.Expect(worst <= 1e-5, fmt::format("max abs error {:.3g}", worst));
  return c.Finish(fmt::format("100 cases, max abs error {:.2e}", worst));
}

// 3 -----------------------------------------------------------------------
Outcome TilerCriterion() {
  Checker c;
  std::mt19937_64 rng(3);
  size_t tiles_checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const int64_t w = 1 + int64_t(rng() % 600), h = 1 + int64_t(rng() % 600);
    const int64_t window = 1 + int64_t(rng() % 300);
    const double overlap = double(rng() % 95) / 100.0;
    const TilePlan plan = PlanTiles(w, h, window, overlap, "scene");
    std::vector<uint8_t> covered(size_t(w * h), 0);
    for (const TileSpec& s : plan.tiles) {
      ++tiles_checked;
      const bool inside = s.row >= 0 && s.col >= 0 && s.width >= 1 &&
                          s.height >= 1 && s.col + s.width <= w &&
                          s.row + s.height <= h;
      c.Expect(inside, fmt::format("case {}: tile out of bounds", t));
      if (!inside) continue;
      for (int64_t y = s.row; y < s.row + s.height; ++y) {
        std::fill_n(covered.begin() + y * w + s.col, s.width, uint8_t(1));
      }
      const std::string name = FormatTileName("scene", s, "tif");
      const TileName parsed = ParseTileName(name);
      c.Expect(parsed.spec == s && parsed.image_name == "scene" &&
                   FormatTileName(parsed.image_name, parsed.spec,
                                  parsed.ext) == name,
               fmt::format("case {}: name round trip of {}", t, name));
    }
    c.Expect(std::all_of(covered.begin(), covered.end(),
                         [](uint8_t v) { return v == 1; }),
             fmt::format("case {}: {}x{} window {} overlap {} leaves a gap", t,
                         w, h, window, overlap));
  }
  const std::string example = "panama50cm|1370_1180_416_416.tif";
  const TileName tn = ParseTileName(example);
  c.Expect(tn.image_name == "panama50cm" && tn.spec.row == 1370 &&
               tn.spec.col == 1180 && tn.spec.height == 416 &&
               tn.spec.width == 416 && tn.ext == "tif",
           "example fields");
  c.Expect(FormatTileName(tn.image_name, tn.spec, tn.ext) == example,
           "example re-emits");
  return c.Finish(
      fmt::format("1000 plans, {} tiles covered and named", tiles_checked));
}

// 4 -----------------------------------------------------------------------
Outcome EndToEndCriterion() {
  Checker c;
  const int64_t dim = 16000, window = 416;
  const double overlap = 0.15;
  const size_t n_straddle = 100;
  const auto start = Clock::now();

  SynthOptions so;
  so.width = so.height = dim;
  so.n_objects = 500 - n_straddle;
  so.object_px = 10;
  so.seed = 4;
  so.fixed_boxes =
      StraddlingBoxes(dim, dim, window, overlap, so.object_px, n_straddle);
  SynthScene scene = MakeSynthScene(so);
  c.Expect(scene.truth.size() == 500, "500 planted objects");

  // Every straddler is cut by at least one tile edge.
  const TilePlan plan = PlanTiles(dim, dim, window, overlap);
  size_t cut = 0;
  for (const PixelBox& b : so.fixed_boxes) {
    bool any = false;
    for (const TileSpec& t : plan.tiles) {
      const double ix = std::min(b.xmax, double(t.col + t.width)) -
                        std::max(b.xmin, double(t.col));
      const double iy = std::min(b.ymax, double(t.row + t.height)) -
                        std::max(b.ymin, double(t.row));
      if (ix > 0 && iy > 0 && (ix < b.Width() || iy < b.Height())) any = true;
    }
    cut += any;
  }
  c.Expect(cut == n_straddle,
           fmt::format("{} of {} straddlers are cut by a tile", cut,
                       n_straddle));

  ImageMeta meta{"synth16k", {0.0, 0.0, 0.5}};
  MockOracleConfig cfg;
  cfg.planted_truth = scene.truth;
  const MockOracle mock(cfg);
  ScaleProfile profile;
  profile.scale_id = "cars";
  profile.window_px = window;
  profile.class_ids = {so.class_id};
  const DetectorBackend* backend = &mock;
  RunOptions options;
  options.overlap = overlap;
  const EnsembleRun run = RunEnsemble(scene.image, meta, {&profile, 1},
                                      {&backend, 1}, options, 0.5);
  const MatchResult m = Match(run.merged.detections, scene.truth, 0.5);
  const double f1 = F1FromCounts(m.tp, m.fp, m.fn).f1;
  const double secs = Since(start);
  c.Expect(f1 == 1.0, fmt::format("F1 {} (tp {} fp {} fn {})", f1, m.tp, m.fp,
                                   m.fn));
  c.Expect(run.scales.front().tiles == plan.tiles.size(), "tile count");
  c.Expect(secs <= 120.0, fmt::format("took {:.1f} s", secs));
  return c.Finish(fmt::format("{} tiles, {} straddlers, F1 {}, {:.1f} s",
                              plan.tiles.size(), n_straddle, f1, secs));
}

// 5 -----------------------------------------------------------------------
Outcome NoisyBackendCriterion() {
  Checker c;
  const double p = 0.1, lambda = 0.5;
  SynthOptions so;
  so.width = so.height = 8000;
  so.n_objects = 5000;
  so.seed = 5;
  const SynthScene scene = MakeSynthScene(so);

  ImageMeta meta{"noisy", {0.0, 0.0, 0.5}};
  MockOracleConfig cfg;
  cfg.planted_truth = scene.truth;
  cfg.drop_prob = p;
  cfg.false_positives_per_tile = lambda;
  cfg.seed = 55;
  const MockOracle mock(cfg);
  ScaleProfile profile;
  profile.scale_id = "cars";
  profile.window_px = 416;
  profile.class_ids = {so.class_id};
  const DetectorBackend* backend = &mock;
  const EnsembleRun run =
      RunEnsemble(scene.image, meta, {&profile, 1}, {&backend, 1}, {}, 0.5);
  const MatchResult m = Match(run.merged.detections, scene.truth, 0.5);
  const PrecisionRecall pr = F1FromCounts(m.tp, m.fp, m.fn);

  const double n = double(scene.truth.size());
  const double sigma = std::sqrt(n * p * (1 - p)) / n;
  const double tiles = double(run.scales.front().tiles);
  const double expected_tp = (1 - p) * n;
  const double expected_precision =
      expected_tp / (expected_tp + lambda * tiles);
  c.Expect(pr.recall >= 0.9 - 3 * sigma && pr.recall <= 0.9 + 3 * sigma,
           fmt::format("recall {:.4f}", pr.recall));
  c.Expect(pr.recall >= 0.887 && pr.recall <= 0.913,
           fmt::format("recall {:.4f} outside [0.887, 0.913]", pr.recall));
  c.Expect(std::abs(pr.precision - expected_precision) <= 0.02,
           fmt::format("precision {:.4f} vs expected {:.4f}", pr.precision,
                       expected_precision));
  return c.Finish(fmt::format(
      "recall {:.4f}, precision {:.4f} (expected {:.4f}) over {} tiles",
      pr.recall, pr.precision, expected_precision, tiles));
}

// 6 -----------------------------------------------------------------------
Outcome MetricArithmeticCriterion() {
  Checker c;
  // A 1389-car scene: 1320 found, 69 missed, 70 spurious.
  const size_t tp = 1320, fn = 69, fp = 70;
  SceneInput scene;
  scene.scene_id = "cars1389";
  for (size_t i = 0; i < tp + fn; ++i) {
    const double x = double(i % 100) * 20.0, y = double(i / 100) * 20.0;
    Detection d;
    d.class_id = 3;
    d.confidence = 1.0;
    d.box = {x, y, x + 10, y + 10};
    scene.truth.push_back(d);
    if (i < tp) {
      d.confidence = 0.9;
      scene.detections.push_back(d);
    }
  }
  for (size_t i = 0; i < fp; ++i) {
    Detection d;
    d.class_id = 3;
    d.confidence = 0.5;
    d.box = {5000.0 + 20.0 * double(i), 5000.0, 5010.0 + 20.0 * double(i),
             5010.0};
    scene.detections.push_back(d);
  }
  const EvalReport report = Evaluate({&scene, 1}, {}, true);
  const double oracle = 2.0 * tp / double(2 * tp + fp + fn);
  c.Expect(report.per_scene[0].tp == tp && report.per_scene[0].fp == fp &&
               report.per_scene[0].fn == fn,
           "match counts");
  c.Expect(std::abs(report.f1 - oracle) < 1e-12, "F1 differs from 2TP/(2TP+FP+FN)");
  c.Expect(std::abs(report.f1 - 0.95) <= 0.005,
           fmt::format("F1 {:.4f}", report.f1));

  // Three scenes, 1009 predicted against 1000 present.
  const std::vector<SceneCount> counts = {{402, 400}, {351, 350}, {256, 250}};
  const CountMetrics cm = ComputeCountMetrics(counts);
  c.Expect(std::abs(cm.total_count_error - 9.0 / 1000.0) < 1e-12,
           "count error oracle");
  c.Expect(std::abs(cm.total_count_error - 0.009) <= 0.005,
           fmt::format("count error {:.4f}", cm.total_count_error));
  return c.Finish(fmt::format("F1 {:.4f}, total count error {:.2f}%",
                              report.f1, 100.0 * cm.total_count_error));
}

// 7 -----------------------------------------------------------------------
Outcome ResolutionCriterion() {
  Checker c;
  const auto ladder = FullGsdLadder();
  c.Expect(ladder.size() == 13, "13 rungs");
  std::mt19937_64 rng(7);
  Raster img(613, 457);
  for (auto& v : img.mutable_data()) v = uint8_t(rng());
  size_t checked = 0;
  for (double g : ladder) {
    const int64_t g_cm = std::lround(g * 100.0);
    const Raster out = Degrade(img.View(), 0.15, g);
    c.Expect(out.width() == 613 * 15 / g_cm && out.height() == 457 * 15 / g_cm,
             fmt::format("gsd {}: {}x{}", g, out.width(), out.height()));
    for (int64_t dim = 1; dim <= 20000; dim += 37) {
      const int64_t want = dim * 15 / g_cm;
      if (want < 1) continue;
      c.Expect(DegradedDim(dim, 0.15, g) == want,
               fmt::format("DegradedDim({}, {})", dim, g));
      ++checked;
    }
  }
  c.Expect(ObjectPixelExtent(3.0, 0.15) == 20.0, "3 m at 0.15 m");
  c.Expect(ObjectPixelExtent(3.0, 0.60) == 5.0, "3 m at 0.60 m");
  c.Expect(ObjectPixelExtent(3.0, 3.00) == 1.0, "3 m at 3.00 m");
  return c.Finish(fmt::format(
      "13 rungs, {} dimension cases, extents 20/5/1 px", checked));
}

// 8 -----------------------------------------------------------------------
Outcome PiecewiseCriterion() {
  Checker c;
  const double bp = 0.61, left = -0.10, right = -0.26, level = 0.87;
  std::vector<double> xs, ys;
  for (int k = 15; k <= 300; k += 5) {
    const double x = k / 100.0;
    xs.push_back(x);
    ys.push_back(level + (x < bp ? left : right) * (x - bp));
  }
  const PiecewiseFit fit = FitPiecewise(xs, ys);
  c.Expect(std::abs(fit.breakpoint - bp) <= 0.01,
           fmt::format("breakpoint {}", fit.breakpoint));
  c.Expect(std::abs(fit.slope_left - left) <= 1e-3,
           fmt::format("left slope {}", fit.slope_left));
  c.Expect(std::abs(fit.slope_right - right) <= 1e-3,
           fmt::format("right slope {}", fit.slope_right));

  const double s1 = (0.87 - 0.92) / (0.60 - 0.15);
  const double s2 = (0.27 - 0.87) / (3.0 - 0.60);
  c.Expect(std::abs(s1 - -0.111) < 5e-4, fmt::format("secant 1 {}", s1));
  c.Expect(std::abs(s2 - -0.25) < 5e-4, fmt::format("secant 2 {}", s2));
  c.Expect(std::abs(s1 - -0.10) <= 0.02 && std::abs(s2 - -0.26) <= 0.02,
           "secants vs quoted slopes");
  return c.Finish(fmt::format(
      "breakpoint {:.2f}, slopes {:.4f}/{:.4f}, secants {:.3f}/{:.3f}",
      fit.breakpoint, fit.slope_left, fit.slope_right, s1, s2));
}

// 9 -----------------------------------------------------------------------
Outcome NmsCriterion() {
  Checker c;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10000; ++t) {
    const size_t n = size_t(rng() % 40);
    const double thr = (t % 5 == 0) ? 0.5 : u(rng);
    std::vector<Detection> dets(n);
    for (auto& d : dets) {
      d.class_id = int(rng() % 3);
      d.confidence = double(rng() % 21) / 20.0;
      const double x = u(rng) * 60, y = u(rng) * 60;
      d.box = {x, y, x + 1 + u(rng) * 25, y + 1 + u(rng) * 25};
    }
    const auto kept = Nms(dets, thr);
    c.Expect(Nms(kept, thr) == kept, fmt::format("set {}: idempotence", t));
    auto shuffled = dets;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    c.Expect(Nms(shuffled, thr) == kept,
             fmt::format("set {}: order dependence", t));
    for (size_t i = 0; i < kept.size(); ++i) {
      for (size_t j = i + 1; j < kept.size(); ++j) {
        if (kept[i].class_id != kept[j].class_id) continue;
        c.Expect(Iou(kept[i].box, kept[j].box) <= thr,
                 fmt::format("set {}: retained pair above threshold", t));
      }
    }
    for (int cls = 0; cls < 3; ++cls) {
      const Detection* top = nullptr;
      for (const auto& d : dets) {
        if (d.class_id == cls && (!top || CanonicalLess(d, *top))) top = &d;
      }
      if (!top) continue;
      c.Expect(std::find(kept.begin(), kept.end(), *top) != kept.end(),
               fmt::format("set {}: class {} top detection dropped", t, cls));
    }
  }
  return c.Finish("10000 sets, four properties each");
}

// 10 ----------------------------------------------------------------------
Outcome DeterminismCriterion() {
  Checker c;
  const fs::path dir = ScratchDir("determinism");
  const fs::path log = dir / "cli.log";
  int rc = RunCli(fmt::format("synth --out \"{}\" --width 3000 --height 2400 "
                              "--objects 800 --straddle 30 --seed 10",
                              (dir / "scene").string()),
                  log);
  c.Expect(rc == 0, "synth failed: " + Slurp(log));

  {
    std::ofstream prof(dir / "profiles.json");
    prof << R"([{"scale_id":"cars","chip_size_m":208,"class_ids":[3]},)"
         << R"({"scale_id":"coarse","chip_size_m":624,"downsample_factor":2,)"
         << R"("class_ids":[3,4]}])";
  }
  const std::string common = fmt::format(
      "detect --image \"{}\" --profiles \"{}\" --mock-truth \"{}\" "
      "--mock-drop 0.2 --mock-fp 1.5 --mock-jitter 1.0 --seed 99",
      (dir / "scene" / "synth.png").string(),
      (dir / "profiles.json").string(),
      (dir / "scene" / "truth.jsonl").string());
  std::vector<std::string> outputs;
  for (int workers : {1, 4, 2, 4}) {
    const fs::path out = dir / fmt::format("mock_w{}_{}", workers,
                                           outputs.size());
    rc = RunCli(fmt::format("{} --workers {} --out \"{}\"", common, workers,
                            out.string()),
                log);
    c.Expect(rc == 0, "detect failed: " + Slurp(log));
    outputs.push_back(Slurp(out / "detections.jsonl"));
  }

  // Seeded random network on a small raster.
  rc = RunCli(fmt::format("synth --out \"{}\" --width 320 --height 320 "
                          "--objects 20 --seed 11",
                          (dir / "small").string()),
              log);
  c.Expect(rc == 0, "small synth failed: " + Slurp(log));
  {
    std::ofstream prof(dir / "net.json");
    prof << R"([{"scale_id":"net","chip_size_m":64,"class_ids":[2,3],)"
         << R"("backend":"network","window_px":128}])";
  }
  std::vector<std::string> net_outputs;
  for (int workers : {1, 3}) {
    const fs::path out = dir / fmt::format("net_w{}", workers);
    rc = RunCli(fmt::format("detect --image \"{}\" --profiles \"{}\" "
                            "--net-input 64 --conf 0.2 --seed 5 --workers {} "
                            "--out \"{}\"",
                            (dir / "small" / "synth.png").string(),
                            (dir / "net.json").string(), workers,
                            out.string()),
                log);
    c.Expect(rc == 0, "network detect failed: " + Slurp(log));
    net_outputs.push_back(Slurp(out / "detections.jsonl"));
  }

  const size_t lines =
      size_t(std::count(outputs[0].begin(), outputs[0].end(), '\n'));
  const size_t net_lines =
      size_t(std::count(net_outputs[0].begin(), net_outputs[0].end(), '\n'));
  c.Expect(lines > 0 && net_lines > 0, "empty detection files");
  for (size_t i = 1; i < outputs.size(); ++i) {
    c.Expect(outputs[i] == outputs[0],
             fmt::format("mock run {} differs from run 0", i));
  }
  c.Expect(net_outputs[1] == net_outputs[0], "network runs differ");
  std::error_code ec;
  fs::remove_all(dir, ec);
  return c.Finish(fmt::format(
      "mock: 4 runs (workers 1/4/2/4), {} lines; network: 2 runs, {} lines; "
      "byte-identical",
      lines, net_lines));
}

// 11 ----------------------------------------------------------------------
Outcome ThroughputCriterion() {
  Checker c;
  c.Expect(std::abs(AreaKm2(16000, 16000, 0.5) - 64.0) < 1e-9, "64 km2");
  c.Expect(std::abs(Km2PerMinute(64.0, 30.0) - 128.0) < 1e-9,
           "64 km2 in 30 s is 128 km2/min");

  const fs::path dir = ScratchDir("throughput");
  const fs::path log = dir / "cli.log";
  const int rc = RunCli(
      fmt::format("bench --synthetic --width 16000 --height 16000 --gsd 0.5 "
                  "--objects 500 --seed 11 --out \"{}\"",
                  dir.string()),
      log);
  c.Expect(rc == 0, "bench failed: " + Slurp(log));
  double secs = -1, rate = -1, area = -1, f1 = -1;
  size_t tiles = 0;
  try {
    const auto j = nlohmann::json::parse(Slurp(dir / "bench.json"));
    secs = j.at("wall_seconds").get<double>();
    rate = j.at("km2_per_min").get<double>();
    area = j.at("area_km2").get<double>();
    f1 = j.at("f1").get<double>();
    tiles = j.at("tiles").get<size_t>();
  } catch (const std::exception& e) {
    c.Expect(false, std::string("bench.json: ") + e.what());
  }
  c.Expect(tiles == 2116, fmt::format("{} tiles", tiles));
  c.Expect(std::abs(area - 64.0) < 1e-9, fmt::format("area {}", area));
  c.Expect(secs > 0 && std::abs(rate - area / (secs / 60.0)) <=
                           1e-9 * std::max(1.0, rate),
           "km2/min is not area / minutes");
  c.Expect(secs <= 120.0, fmt::format("pipeline took {:.1f} s", secs));
  c.Expect(f1 == 1.0, fmt::format("bench F1 {}", f1));
  std::error_code ec;
  fs::remove_all(dir, ec);
  return c.Finish(fmt::format(
      "{} tiles in {:.4f} s on {} thread(s), {:.0f} km2, {:.0f} km2/min",
      tiles, secs, omp_get_max_threads(), area, rate));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> all = {
      {"architecture shape chain", ShapeChainCriterion},
      {"conv matches direct-summation oracle", ConvOracleCriterion},
      {"tiler coverage, bounds and names", TilerCriterion},
      {"end-to-end oracle equivalence", EndToEndCriterion},
      {"noisy backend calibration", NoisyBackendCriterion},
      {"metric arithmetic", MetricArithmeticCriterion},
      {"resolution pipeline", ResolutionCriterion},
      {"piecewise fit", PiecewiseCriterion},
      {"NMS property suite", NmsCriterion},
      {"CLI determinism across worker counts", DeterminismCriterion},
      {"throughput and km2/min", ThroughputCriterion},
  };
  int failed = 0;
  for (size_t i = 0; i < all.size(); ++i) {
    const int id = int(i) + 1;
    if (!only.empty() &&
        std::find(only.begin(), only.end(), id) == only.end()) {
      continue;
    }
    Outcome o;
    const auto start = Clock::now();
    try {
      o = all[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << fmt::format("{} [{:2d}] {} ({}) [{:.1f} s]\n",
                             o.pass ? "PASS" : "FAIL", id, all[i].first,
                             o.detail, Since(start))
              << std::flush;
  }
  return failed == 0 ? 0 : 1;
}
