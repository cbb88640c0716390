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

#include <chrono>
#include <fstream>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "gigadetect/ensemble.hpp"
#include "gigadetect/error.hpp"
#include "gigadetect/evaluation.hpp"
#include "gigadetect/imaging.hpp"
#include "gigadetect/random.hpp"
#include "gigadetect/stitcher.hpp"
#include "gigadetect/tiler.hpp"

namespace gigadetect::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string ExtOf(const fs::path& p) {
  std::string ext = p.extension().string();
  return ext.empty() ? "png" : ext.substr(1);
}

class TileCommand : public Command {
 public:
  void Register(CLI::App& app) override {
    auto* s = Add(app, "tile", "Cut an image into overlapping chips");
    s->add_option("--image", image_, "Input raster")->required();
    s->add_option("--window", window_, "Chip size in pixels")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--overlap", overlap_, "Fractional overlap of neighbours")
        ->check(CLI::Range(0.0, 0.999))
        ->capture_default_str();
    s->add_option("--ext", ext_, "Chip file extension (png, tif)");
    s->add_flag("--plan-only", plan_only_, "Write plan.json without chips");
  }

  void Validate() override {
    RequireFile(image_, "--image");
    if (!ext_.empty() && ext_ != "png" && ext_ != "tif" && ext_ != "tiff") {
      throw UsageError(fmt::format("--ext: unsupported extension '{}'", ext_));
    }
  }

  void Run() override {
    PrepareOutDir(common_);
    const LoadedImage img = LoadImage(image_);
    const std::string ext = ext_.empty() ? ExtOf(image_) : ext_;
    const TilePlan plan =
        PlanTiles(img.raster.width(), img.raster.height(), window_, overlap_,
                  img.meta.name);
    WriteRunJson(sub_, common_, {{"ext", ext}, {"tiles", plan.tiles.size()}});
    WriteJson(common_.out_dir / "plan.json", TilePlanToJson(plan));
    spdlog::info("{}: {} tiles of {} px", img.meta.name, plan.tiles.size(),
                 window_);
    if (plan_only_) return;

    const int64_t n = int64_t(plan.tiles.size());
    std::vector<std::string> errors(plan.tiles.size());
#pragma omp parallel for schedule(dynamic)
    for (int64_t i = 0; i < n; ++i) {
      try {
        const TileSpec& t = plan.tiles[size_t(i)];
        const std::string name = FormatTileName(img.meta.name, t, ext);
        ImageMeta meta;
        meta.name = name;
        meta.transform = img.meta.transform;
        meta.transform.origin_x += double(t.col) * img.meta.gsd();
        meta.transform.origin_y -= double(t.row) * img.meta.gsd();
        SaveImage(Extract(img.raster, t), meta, common_.out_dir / name);
      } catch (const std::exception& e) {
        errors[size_t(i)] = e.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw std::runtime_error(e);
    }
  }

 private:
  fs::path image_;
  int64_t window_ = 416;
  double overlap_ = kDefaultOverlap;
  std::string ext_;
  bool plan_only_ = false;
};

std::vector<Detection> LoadTruth(const fs::path& path) {
  std::vector<Detection> out;
  for (auto& r : ReadDetectionRecords(path)) {
    r.detection.tile_origin.reset();
    out.push_back(std::move(r.detection));
  }
  return out;
}

class DetectCommand : public Command {
 public:
  void Register(CLI::App& app) override {
    auto* s = Add(app, "detect",
                  "Run the scale ensemble over an image and merge detections");
    s->add_option("--image", image_, "Input raster")->required();
    s->add_option("--profiles", profiles_path_,
                  "JSON array of scale profiles (default: built-in pair)");
    s->add_option("--conf", conf_, "Per-chip confidence threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    s->add_option("--nms-iou", nms_iou_, "Merge NMS IOU threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    s->add_option("--overlap", overlap_, "Fractional chip overlap")
        ->check(CLI::Range(0.0, 0.999))
        ->capture_default_str();
    s->add_option("--window", window_,
                  "Chip window in pixels for every profile")
        ->check(CLI::PositiveNumber);
    s->add_option("--net-input", net_input_, "Network input size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--mock-truth", mock_truth_,
                  "JSONL of planted objects for mock profiles");
    s->add_option("--mock-drop", mock_drop_, "Mock miss probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    s->add_option("--mock-fp", mock_fp_, "Mock spurious boxes per tile")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    s->add_option("--mock-jitter", mock_jitter_, "Mock box jitter sigma (px)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    s->add_flag("--csv", csv_, "Also write detections.csv");
  }

  void Validate() override {
    RequireFile(image_, "--image");
    if (net_input_ % 32 != 0) {
      throw UsageError(
          fmt::format("--net-input {} is not a multiple of 32", net_input_));
    }
    if (profiles_path_.empty()) {
      profiles_ = DefaultProfiles();
    } else {
      RequireFile(profiles_path_, "--profiles");
      profiles_ = LoadProfiles(profiles_path_);
      if (profiles_.empty()) throw UsageError("--profiles: no profiles");
    }
    if (window_) {
      for (auto& p : profiles_) p.window_px = *window_;
    }
    if (!mock_truth_.empty()) {
      RequireFile(mock_truth_, "--mock-truth");
      truth_ = LoadTruth(mock_truth_);
    }
  }

  void Run() override {
    PrepareOutDir(common_);
    const uint64_t seed = common_.ResolvedSeed();
    const LoadedImage img = LoadImage(image_);
    const ImageMeta& meta = img.meta;

    std::vector<std::unique_ptr<DetectorBackend>> owned;
    std::vector<const DetectorBackend*> backends;
    for (size_t i = 0; i < profiles_.size(); ++i) {
      const ScaleProfile& p = profiles_[i];
      const uint64_t member_seed = StreamSeed(seed, {uint64_t(i)});
      if (p.backend == "network") {
        owned.push_back(NetworkBackend::FromProfile(p, member_seed, net_input_));
      } else {
        MockOracleConfig cfg;
        cfg.planted_truth = truth_;
        cfg.drop_prob = mock_drop_;
        cfg.false_positives_per_tile = mock_fp_;
        cfg.jitter_sigma_px = mock_jitter_;
        cfg.seed = member_seed;
        owned.push_back(std::make_unique<MockOracle>(std::move(cfg)));
      }
      backends.push_back(owned.back().get());
    }

    nlohmann::ordered_json resolved;
    resolved["profiles"] = ProfilesToJson(profiles_);
    for (auto& p : resolved["profiles"]) {
      const auto it = std::find_if(
          profiles_.begin(), profiles_.end(),
          [&](const ScaleProfile& q) { return q.scale_id == p["scale_id"]; });
      p["effective_window_px"] = it->WindowPx(meta.gsd());
    }
    resolved["gsd"] = meta.gsd();
    WriteRunJson(sub_, common_, resolved);

    RunOptions options;
    options.conf_threshold = conf_;
    options.overlap = overlap_;
    options.workers = common_.workers;
    const auto start = Clock::now();
    const EnsembleRun run =
        RunEnsemble(img.raster, meta, profiles_, backends, options, nms_iou_);
    const double seconds = SecondsSince(start);

    const ClassCatalog classes = DefaultClasses();
    WriteDetections(run.merged, meta, classes,
                    common_.out_dir / "detections.jsonl");
    if (csv_) {
      WriteDetectionsCsv(run.merged, meta, classes,
                         common_.out_dir / "detections.csv");
    }

    nlohmann::ordered_json summary;
    summary["image"] = meta.name;
    summary["width"] = img.raster.width();
    summary["height"] = img.raster.height();
    summary["gsd"] = meta.gsd();
    size_t tiles = 0, failures = 0;
    nlohmann::ordered_json scales = nlohmann::ordered_json::array();
    for (const ScaleRun& s : run.scales) {
      tiles += s.tiles;
      failures += s.failures.size();
      nlohmann::ordered_json f = nlohmann::ordered_json::array();
      for (const auto& c : s.failures) {
        f.push_back({{"row", c.tile.row},
                     {"col", c.tile.col},
                     {"message", c.message}});
      }
      scales.push_back({{"scale_id", s.scale_id},
                        {"window_px", s.window_px},
                        {"tiles", s.tiles},
                        {"rejected_out_of_profile", s.rejected_out_of_profile},
                        {"failures", f}});
    }
    summary["tiles"] = tiles;
    summary["failed_tiles"] = failures;
    summary["scales"] = scales;
    std::map<std::string, size_t> per_class;
    for (const auto& d : run.merged.detections) {
      ++per_class[classes.Name(d.class_id)];
    }
    summary["detections"] = run.merged.detections.size();
    summary["per_class"] = per_class;
    const double area = AreaKm2(img.raster.width(), img.raster.height(),
                                meta.gsd());
    summary["wall_seconds"] = seconds;
    summary["area_km2"] = area;
    summary["km2_per_min"] =
        seconds > 0.0 ? nlohmann::ordered_json(Km2PerMinute(area, seconds))
                      : nlohmann::ordered_json(nullptr);
    WriteJson(common_.out_dir / "summary.json", summary);
    spdlog::info("{}: {} tiles, {} detections, {} failed tiles in {:.2f} s",
                 meta.name, tiles, run.merged.detections.size(), failures,
                 seconds);
  }

 private:
  fs::path image_;
  fs::path profiles_path_;
  double conf_ = kDefaultConfThreshold;
  double nms_iou_ = kDefaultMergeIou;
  double overlap_ = kDefaultOverlap;
  std::optional<int64_t> window_;
  int net_input_ = 416;
  fs::path mock_truth_;
  double mock_drop_ = 0.0;
  double mock_fp_ = 0.0;
  double mock_jitter_ = 0.0;
  bool csv_ = false;

  std::vector<ScaleProfile> profiles_;
  std::vector<Detection> truth_;
};

class StitchCommand : public Command {
 public:
  void Register(CLI::App& app) override {
    auto* s = Add(app, "stitch",
                  "Map per-chip detections to the image frame and merge them");
    s->add_option("--inputs", inputs_, "Detection JSONL files")
        ->required()
        ->expected(1, -1);
    s->add_option("--image", image_, "Parent image (dimensions and geo)");
    s->add_option("--width", width_, "Parent width in native pixels")
        ->check(CLI::PositiveNumber);
    s->add_option("--height", height_, "Parent height in native pixels")
        ->check(CLI::PositiveNumber);
    s->add_option("--gsd", gsd_, "Ground sample distance without --image")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--origin-x", origin_x_, "Geo origin x without --image")
        ->capture_default_str();
    s->add_option("--origin-y", origin_y_, "Geo origin y without --image")
        ->capture_default_str();
    s->add_option("--downsample-factor", factor_,
                  "Factor of the raster the chips were cut from")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--nms-iou", nms_iou_, "Merge NMS IOU threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }

  void Validate() override {
    for (const auto& p : inputs_) RequireFile(p, "--inputs");
    if (!image_.empty()) {
      RequireFile(image_, "--image");
    } else if (!width_ || !height_) {
      throw UsageError("either --image or both --width and --height required");
    }
  }

  void Run() override {
    PrepareOutDir(common_);
    ImageMeta meta;
    meta.transform = {origin_x_, origin_y_, gsd_};
    double w = width_ ? double(*width_) : 0.0;
    double h = height_ ? double(*height_) : 0.0;
    if (!image_.empty()) {
      const LoadedImage img = LoadImage(image_);
      meta = img.meta;
      w = double(img.raster.width());
      h = double(img.raster.height());
    }

    std::vector<DetectionList> lists;
    const auto list_for = [&](const std::string& name) -> DetectionList& {
      for (auto& l : lists) {
        if (l.image_name == name) return l;
      }
      lists.push_back({name, {}});
      return lists.back();
    };
    size_t from_tiles = 0, records = 0;
    for (const auto& path : inputs_) {
      for (auto& r : ReadDetectionRecords(path)) {
        ++records;
        if (r.image.find('|') != std::string::npos) {
          const TileName tn = ParseTileName(r.image);
          const Detection d = r.detection;
          auto g = Globalize({&d, 1}, tn.spec, factor_, w, h);
          auto& l = list_for(tn.image_name);
          l.detections.insert(l.detections.end(), g.begin(), g.end());
          ++from_tiles;
        } else {
          list_for(r.image).detections.push_back(
              std::move(r.detection));
        }
      }
    }
    if (lists.empty()) lists.push_back({meta.name, {}});
    if (image_.empty()) meta.name = lists.front().image_name;
    WriteRunJson(sub_, common_,
                 {{"width", w}, {"height", h}, {"gsd", meta.gsd()}});
    const GlobalDetectionSet merged = Merge(lists, nms_iou_);
    WriteDetections(merged, meta, DefaultClasses(),
                    common_.out_dir / "detections.jsonl");
    spdlog::info("{} records ({} tile-framed) merged into {} detections",
                 records, from_tiles, merged.detections.size());
  }

 private:
  std::vector<fs::path> inputs_;
  fs::path image_;
  std::optional<int64_t> width_, height_;
  double gsd_ = 1.0, origin_x_ = 0.0, origin_y_ = 0.0;
  int factor_ = 1;
  double nms_iou_ = kDefaultMergeIou;
};

class BenchCommand : public Command {
 public:
  void Register(CLI::App& app) override {
    auto* s = Add(app, "bench",
                  "Time tile + mock detect + stitch and report km2/min");
    s->add_option("--width", width_, "Synthetic width")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--height", height_, "Synthetic height")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_flag("--synthetic", synthetic_, "Use a generated scene");
    s->add_option("--image", image_, "Benchmark on a real raster instead");
    s->add_option("--objects", objects_, "Planted objects (synthetic)")
        ->capture_default_str();
    s->add_option("--object-px", object_px_, "Planted object size (px)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--window", window_, "Chip window (px)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--overlap", overlap_, "Fractional chip overlap")
        ->check(CLI::Range(0.0, 0.999))
        ->capture_default_str();
    s->add_option("--gsd", gsd_, "Ground sample distance (synthetic)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--nms-iou", nms_iou_, "Merge NMS IOU threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  }

  void Validate() override {
    if (synthetic_ == !image_.empty()) {
      throw UsageError("give exactly one of --synthetic or --image");
    }
    if (!image_.empty()) RequireFile(image_, "--image");
  }

  void Run() override {
    PrepareOutDir(common_);
    WriteRunJson(sub_, common_);
    const uint64_t seed = common_.ResolvedSeed();
    Raster raster;
    ImageMeta meta;
    MockOracleConfig cfg;
    cfg.seed = seed;
    int class_id = 3;
    if (synthetic_) {
      SynthOptions so;
      so.width = width_;
      so.height = height_;
      so.n_objects = objects_;
      so.object_px = object_px_;
      so.seed = seed;
      so.class_id = class_id;
      SynthScene scene = MakeSynthScene(so);
      raster = std::move(scene.image);
      cfg.planted_truth = std::move(scene.truth);
      meta.name = "bench";
      meta.transform.gsd = gsd_;
    } else {
      LoadedImage img = LoadImage(image_);
      raster = std::move(img.raster);
      meta = img.meta;
    }

    ScaleProfile profile;
    profile.scale_id = "bench";
    profile.window_px = window_;
    profile.class_ids = {class_id};
    const MockOracle mock(cfg);
    const DetectorBackend* backend = &mock;
    RunOptions options;
    options.overlap = overlap_;
    options.workers = common_.workers;

    const auto start = Clock::now();
    const EnsembleRun run = RunEnsemble(raster, meta, {&profile, 1},
                                        {&backend, 1}, options, nms_iou_);
    const double seconds = SecondsSince(start);

    const double area = AreaKm2(raster.width(), raster.height(), meta.gsd());
    nlohmann::ordered_json report;
    report["width"] = raster.width();
    report["height"] = raster.height();
    report["gsd"] = meta.gsd();
    report["tiles"] = run.scales.front().tiles;
    report["detections"] = run.merged.detections.size();
    report["threads"] =
        common_.workers > 0 ? common_.workers : omp_get_max_threads();
    report["wall_seconds"] = seconds;
    report["area_km2"] = area;
    report["km2_per_min"] = Km2PerMinute(area, std::max(seconds, 1e-9));
    if (synthetic_) {
      const MatchResult m = Match(run.merged.detections, cfg.planted_truth, 0.5);
      report["f1"] = F1FromCounts(m.tp, m.fp, m.fn).f1;
    }
    WriteJson(common_.out_dir / "bench.json", report);
    fmt::print("{}x{} px at {} m: {} tiles, {} detections, {:.3f} s, "
               "{:.4f} km2, {:.2f} km2/min\n",
               raster.width(), raster.height(), meta.gsd(),
               run.scales.front().tiles, run.merged.detections.size(), seconds,
               area, report["km2_per_min"].get<double>());
  }

 private:
  int64_t width_ = 16000;
  int64_t height_ = 16000;
  bool synthetic_ = false;
  fs::path image_;
  size_t objects_ = 500;
  int object_px_ = 10;
  int64_t window_ = 416;
  double overlap_ = kDefaultOverlap;
  double gsd_ = 0.5;
  double nms_iou_ = kDefaultMergeIou;
};

}  // namespace

std::unique_ptr<Command> MakeTileCommand() {
  return std::make_unique<TileCommand>();
}
std::unique_ptr<Command> MakeDetectCommand() {
  return std::make_unique<DetectCommand>();
}
std::unique_ptr<Command> MakeStitchCommand() {
  return std::make_unique<StitchCommand>();
}
std::unique_ptr<Command> MakeBenchCommand() {
  return std::make_unique<BenchCommand>();
}

}  // namespace gigadetect::cli
