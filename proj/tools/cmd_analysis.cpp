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
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "gigadetect/evaluation.hpp"
#include "gigadetect/network.hpp"
#include "gigadetect/stitcher.hpp"

namespace gigadetect::cli {
namespace {

namespace fs = std::filesystem;

struct Scene {
  std::string id;
  std::vector<Detection> truth;
  std::vector<Detection> pred;
  std::optional<double> gsd;
};

// Ground metres per pixel implied by a record's geo and pixel extents.
std::optional<double> GsdFromRecord(const DetectionRecord& r) {
  const double w = r.detection.box.Width();
  if (!(w > 0.0)) return std::nullopt;
  const double g = (r.geo.xmax - r.geo.xmin) / w;
  if (!(g > 0.0) || !std::isfinite(g)) return std::nullopt;
  return g;
}

class EvalCommand : public Command {
 public:
  void Register(CLI::App& app) override {
    auto* s = Add(app, "eval", "Score predictions against truth per scene");
    s->add_option("--truth", truth_, "Truth JSONL")->required();
    s->add_option("--pred", pred_, "Prediction JSONL")->required();
    s->add_option("--iou", iou_, "Match IOU threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    s->add_option("--class-iou", class_iou_,
                  "Per-class thresholds as <class_id>=<iou>");
    s->add_flag("--class-agnostic", class_agnostic_,
                "Match regardless of class");
    s->add_option("--gsd", gsd_, "GSD for every scene in the curve")
        ->check(CLI::PositiveNumber);
  }

  void Validate() override {
    RequireFile(truth_, "--truth");
    RequireFile(pred_, "--pred");
    if (!(iou_ > 0.0)) throw UsageError("--iou must be in (0, 1]");
    thresholds_.default_iou = iou_;
    for (const auto& item : class_iou_) {
      const auto eq = item.find('=');
      try {
        if (eq == std::string::npos) throw std::invalid_argument(item);
        const int id = std::stoi(item.substr(0, eq));
        const double t = std::stod(item.substr(eq + 1));
        if (!(t > 0.0 && t <= 1.0)) throw std::out_of_range(item);
        thresholds_.per_class[id] = t;
      } catch (const std::exception&) {
        throw UsageError(fmt::format(
            "--class-iou: '{}' is not <class_id>=<iou in (0, 1]>", item));
      }
    }
  }

  void Run() override {
    PrepareOutDir(common_);
    WriteRunJson(sub_, common_);
    std::vector<Scene> scenes;
    const auto scene_for = [&](const std::string& id) -> Scene& {
      for (auto& s : scenes) {
        if (s.id == id) return s;
      }
      scenes.push_back({id, {}, {}, std::nullopt});
      return scenes.back();
    };
    for (auto& r : ReadDetectionRecords(truth_)) {
      Scene& s = scene_for(r.image);
      if (!s.gsd) s.gsd = GsdFromRecord(r);
      s.truth.push_back(std::move(r.detection));
    }
    for (auto& r : ReadDetectionRecords(pred_)) {
      Scene& s = scene_for(r.image);
      if (!s.gsd) s.gsd = GsdFromRecord(r);
      s.pred.push_back(std::move(r.detection));
    }

    std::vector<SceneInput> inputs;
    for (auto& s : scenes) {
      inputs.push_back({s.id, std::move(s.pred), std::move(s.truth),
                        gsd_ ? gsd_ : s.gsd});
    }
    const EvalReport report =
        Evaluate(inputs, thresholds_, !class_agnostic_);

    nlohmann::ordered_json j;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f1"] = report.f1;
    j["fc"] = report.fc;
    j["total_count_error"] = report.total_count_error;
    j["weighted_mean_f1"] = report.weighted_mean_f1;
    j["weighted_std_f1"] = report.weighted_std_f1;
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    for (const SceneResult& r : report.per_scene) {
      per.push_back({{"scene", r.scene_id},
                     {"gsd", r.gsd ? nlohmann::ordered_json(*r.gsd)
                                   : nlohmann::ordered_json(nullptr)},
                     {"tp", r.tp},
                     {"fp", r.fp},
                     {"fn", r.fn},
                     {"n_truth", r.n_truth},
                     {"precision", r.precision},
                     {"recall", r.recall},
                     {"f1", r.f1},
                     {"fc", r.fc}});
    }
    j["per_scene"] = per;
    WriteJson(common_.out_dir / "metrics.json", j);

    std::vector<const SceneResult*> curve;
    for (const auto& r : report.per_scene) {
      if (r.gsd && r.n_truth > 0) curve.push_back(&r);
    }
    std::stable_sort(curve.begin(), curve.end(), [](auto* a, auto* b) {
      return *a->gsd < *b->gsd;
    });
    std::ofstream csv(common_.out_dir / "curve.csv");
    csv << "gsd,f1,fc,scene\n";
    for (const auto* r : curve) {
      csv << fmt::format("{},{:.6f},{:.6f},{}\n", *r->gsd, r->f1, r->fc,
                         r->scene_id);
    }
    fmt::print("precision {:.4f} recall {:.4f} f1 {:.4f} count error {:.4f}\n",
               report.precision, report.recall, report.f1,
               report.total_count_error);
  }

 private:
  fs::path truth_, pred_;
  double iou_ = 0.5;
  std::vector<std::string> class_iou_;
  bool class_agnostic_ = false;
  std::optional<double> gsd_;
  IouThresholds thresholds_;
};

class FitCurveCommand : public Command {
 public:
  void Register(CLI::App& app) override {
    auto* s = Add(app, "fit-curve",
                  "Fit a two-segment line to a performance curve");
    s->add_option("--csv", csv_, "CSV whose first two columns are x, y");
    s->add_option("--x", x_text_, "Comma-separated x values");
    s->add_option("--y", y_text_, "Comma-separated y values");
    s->add_option("--step", step_, "Breakpoint search step")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  void Validate() override {
    std::vector<double> xs, ys;
    if (!csv_.empty()) {
      if (!x_text_.empty() || !y_text_.empty()) {
        throw UsageError("give either --csv or --x/--y, not both");
      }
      RequireFile(csv_, "--csv");
      ReadCsv(xs, ys);
    } else {
      if (x_text_.empty() || y_text_.empty()) {
        throw UsageError("--csv or both --x and --y are required");
      }
      xs = ParseDoubleList(x_text_, "--x");
      ys = ParseDoubleList(y_text_, "--y");
      if (xs.size() != ys.size()) {
        throw UsageError("--x and --y differ in length");
      }
    }
    // Repeated x values (several scenes at one GSD) are averaged.
    std::map<double, std::pair<double, int>> acc;
    for (size_t i = 0; i < xs.size(); ++i) {
      auto& a = acc[xs[i]];
      a.first += ys[i];
      ++a.second;
    }
    for (const auto& [x, a] : acc) {
      xs_.push_back(x);
      ys_.push_back(a.first / a.second);
    }
    if (xs_.size() < 4) {
      throw UsageError(fmt::format(
          "need at least 4 distinct x values, got {}", xs_.size()));
    }
  }

  void Run() override {
    PrepareOutDir(common_);
    WriteRunJson(sub_, common_, {{"points", xs_.size()}});
    const PiecewiseFit fit = FitPiecewise(xs_, ys_, step_);
    const LineFit line = FitLine(xs_, ys_);
    nlohmann::ordered_json j;
    j["breakpoint"] = fit.breakpoint;
    j["slope_left"] = fit.slope_left;
    j["slope_right"] = fit.slope_right;
    j["value_at_breakpoint"] = fit.value_at_breakpoint;
    j["sse"] = fit.sse;
    j["single_line"] = {{"intercept", line.intercept},
                        {"slope", line.slope},
                        {"sse", line.sse}};
    j["points"] = xs_.size();
    WriteJson(common_.out_dir / "fit.json", j);
    fmt::print("breakpoint {:.2f}, slopes {:.4f} / {:.4f}, sse {:.6g}\n",
               fit.breakpoint, fit.slope_left, fit.slope_right, fit.sse);
  }

 private:
  void ReadCsv(std::vector<double>& xs, std::vector<double>& ys) const {
    std::ifstream in(csv_);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string a, b;
      std::getline(ss, a, ',');
      std::getline(ss, b, ',');
      try {
        size_t ua = 0, ub = 0;
        const double x = std::stod(a, &ua);
        const double y = std::stod(b, &ub);
        xs.push_back(x);
        ys.push_back(y);
      } catch (const std::exception&) {
        if (line_no == 1) continue;  // header
        throw UsageError(
            fmt::format("{}:{}: not a numeric row", csv_.string(), line_no));
      }
    }
  }

  fs::path csv_;
  std::string x_text_, y_text_;
  double step_ = kBreakpointStep;
  std::vector<double> xs_, ys_;
};

class NetinfoCommand : public Command {
 public:
  void Register(CLI::App& app) override {
    auto* s = Add(app, "netinfo", "Print the detection network's layer table");
    s->add_option("--classes", classes_)->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--boxes", boxes_)->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--input", input_, "Input size (multiple of 32)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_flag("--forward", forward_,
                "Run one forward pass with seeded random weights");
  }

  void Validate() override {
    net_ = BuildYoltSpec(classes_, boxes_, input_);
  }

  void Run() override {
    PrepareOutDir(common_);
    WriteRunJson(sub_, common_);
    const std::string table = FormatLayerTable(net_);
    fmt::print("{}", table);
    std::ofstream(common_.out_dir / "layers.txt") << table;
    nlohmann::ordered_json j;
    j["layers"] = net_.layers.size();
    j["output_filters"] = net_.OutputFilters();
    j["input"] = input_;
    if (forward_) {
      const WeightStore weights = RandomWeights(net_, common_.ResolvedSeed());
      const Shape3 shape{input_, input_, NetworkSpec::kInputChannels};
      const Tensor x(shape, std::vector<float>(
                                size_t(input_) * input_ * shape.c, 0.5f));
      const auto start = std::chrono::steady_clock::now();
      const Tensor y = Forward(net_, weights, x);
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
      j["output_shape"] = y.shape().ToString();
      j["forward_seconds"] = secs;
      fmt::print("forward: {} in {:.2f} s\n", y.shape().ToString(), secs);
    }
    WriteJson(common_.out_dir / "netinfo.json", j);
  }

 private:
  int classes_ = 5;
  int boxes_ = 5;
  int input_ = 416;
  bool forward_ = false;
  NetworkSpec net_;
};

}  // namespace

std::unique_ptr<Command> MakeEvalCommand() {
  return std::make_unique<EvalCommand>();
}
std::unique_ptr<Command> MakeFitCurveCommand() {
  return std::make_unique<FitCurveCommand>();
}
std::unique_ptr<Command> MakeNetinfoCommand() {
  return std::make_unique<NetinfoCommand>();
}

}  // namespace gigadetect::cli
