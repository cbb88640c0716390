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

#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "gigadetect/dataprep.hpp"
#include "gigadetect/error.hpp"
#include "gigadetect/evaluation.hpp"
#include "gigadetect/imaging.hpp"
#include "gigadetect/stitcher.hpp"
#include "gigadetect/tiler.hpp"

namespace gigadetect::cli {
namespace {

namespace fs = std::filesystem;

std::string JoinLadder() {
  std::string out;
  for (double g : GsdLadder()) {
    out += (out.empty() ? "" : ",") + fmt::format("{:.2f}", g);
  }
  return out;
}

class DegradeCommand : public Command {
 public:
  void Register(CLI::App& app) override {
    auto* s = Add(app, "degrade",
                  "Blur and resample a raster to coarser ground sample "
                  "distances");
    s->add_option("--in", in_, "Input raster")->required();
    s->add_option("--gsd-list", gsd_list_, "Comma-separated target GSDs (m)")
        ->capture_default_str();
    s->add_option("--src-gsd", src_gsd_, "Source GSD (default: sidecar)")
        ->check(CLI::PositiveNumber);
    s->add_option("--ext", ext_, "Output extension (png, tif)");
  }

  void Validate() override {
    RequireFile(in_, "--in");
    targets_ = ParseDoubleList(gsd_list_, "--gsd-list");
    ImageMeta meta;
    ReadSidecar(SidecarPath(in_), meta);
    src_ = src_gsd_.value_or(meta.gsd());
    for (double g : targets_) {
      if (!(g >= src_)) {
        throw UsageError(fmt::format(
            "--gsd-list: {} m is finer than the {} m source", g, src_));
      }
    }
    if (!ext_.empty() && ext_ != "png" && ext_ != "tif" && ext_ != "tiff") {
      throw UsageError(fmt::format("--ext: unsupported extension '{}'", ext_));
    }
  }

  void Run() override {
    PrepareOutDir(common_);
    const LoadedImage img = LoadImage(in_);
    const std::string ext =
        ext_.empty() ? in_.extension().string().substr(1) : ext_;
    WriteRunJson(sub_, common_, {{"src_gsd", src_}, {"targets", targets_}});
    const std::string stem = in_.stem().string();
    for (double g : targets_) {
      Raster out = Degrade(img.raster.View(), src_, g);
      ImageMeta meta = img.meta;
      meta.name = fmt::format("{}_{:.2f}m", stem, g);
      meta.transform.gsd = g;
      const fs::path path = common_.out_dir / (meta.name + "." + ext);
      SaveImage(out, meta, path);
      spdlog::info("{}: {}x{} px", path.string(), out.width(), out.height());
    }
  }

 private:
  fs::path in_;
  std::string gsd_list_ = JoinLadder();
  std::optional<double> src_gsd_;
  std::string ext_;
  std::vector<double> targets_;
  double src_ = 0.0;
};

class AugmentCommand : public Command {
 public:
  void Register(CLI::App& app) override {
    auto* s = Add(app, "augment",
                  "Write rotated and colour-jittered copies of a sample");
    s->add_option("--image", image_, "Input raster")->required();
    s->add_option("--labels", labels_, "Label file for the input");
    s->add_option("--count", count_, "Number of samples")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_flag("--continuous", continuous_,
                "Draw angles from [0, 360) instead of right angles");
    s->add_option("--sat-lo", sat_.lo, "Saturation factor low")
        ->capture_default_str();
    s->add_option("--sat-hi", sat_.hi, "Saturation factor high")
        ->capture_default_str();
    s->add_option("--val-lo", val_.lo, "Value factor low")
        ->capture_default_str();
    s->add_option("--val-hi", val_.hi, "Value factor high")
        ->capture_default_str();
  }

  void Validate() override {
    RequireFile(image_, "--image");
    for (const HsvRange& r : {sat_, val_}) {
      if (!(r.lo > 0.0 && r.lo <= r.hi && r.hi <= 4.0)) {
        throw UsageError(fmt::format(
            "colour range [{}, {}] must satisfy 0 < lo <= hi <= 4", r.lo,
            r.hi));
      }
    }
    if (!labels_.empty()) RequireFile(labels_, "--labels");
  }

  void Run() override {
    PrepareOutDir(common_);
    const uint64_t base = common_.ResolvedSeed();
    const LoadedImage img = LoadImage(image_);
    std::vector<LabeledBox> boxes;
    if (!labels_.empty()) {
      std::ifstream in(labels_);
      const std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
      boxes = ParseLabels(text, double(img.raster.width()),
                          double(img.raster.height()));
    }
    WriteRunJson(sub_, common_);
    const std::string stem = image_.stem().string();
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    for (size_t i = 0; i < count_; ++i) {
      const uint64_t seed = base + i;
      const double angle = SampleRotationAngle(seed, continuous_);
      RotatedSample rs = RotateSample(img.raster, boxes, angle);
      const Raster jittered = HsvJitter(rs.image, sat_, val_, seed);
      ImageMeta meta = img.meta;
      meta.name = fmt::format("{}_aug{:04d}", stem, i);
      SaveImage(jittered, meta, common_.out_dir / (meta.name + ".png"));
      EmitLabels(rs.boxes, double(jittered.width()), double(jittered.height()),
                 common_.out_dir / (meta.name + ".txt"));
      samples.push_back({{"index", i},
                         {"seed", seed},
                         {"angle_degrees", angle},
                         {"image", meta.name + ".png"},
                         {"labels", meta.name + ".txt"},
                         {"width", jittered.width()},
                         {"height", jittered.height()},
                         {"boxes", rs.boxes.size()}});
    }
    WriteJson(common_.out_dir / "manifest.json",
              {{"source", image_.string()}, {"samples", samples}});
  }

 private:
  fs::path image_;
  fs::path labels_;
  size_t count_ = 4;
  bool continuous_ = false;
  HsvRange sat_, val_;
};

class PrepLabelsCommand : public Command {
 public:
  void Register(CLI::App& app) override {
    auto* s = Add(app, "prep-labels",
                  "Turn point and footprint annotations into box labels");
    s->add_option("--in", in_, "Annotation JSON")->required();
    s->add_option("--object-size", object_size_m_,
                  "Square side for point labels (m)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--coverage", coverage_, "Footprint hull scale per axis")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    s->add_option("--gsd", gsd_, "Override the annotation GSD")
        ->check(CLI::PositiveNumber);
  }

  void Validate() override {
    RequireFile(in_, "--in");
    std::ifstream in(in_);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
      width_ = j.at("image_width").get<double>();
      height_ = j.at("image_height").get<double>();
      if (!gsd_) gsd_ = j.value("gsd", 1.0);
      for (const auto& p : j.value("points", nlohmann::json::array())) {
        points_.push_back({p.at("x").get<double>(), p.at("y").get<double>(),
                           p.at("class_id").get<int>()});
      }
      for (const auto& f : j.value("footprints", nlohmann::json::array())) {
        FootprintLabel fl;
        fl.class_id = f.at("class_id").get<int>();
        for (const auto& v : f.at("polygon")) {
          fl.polygon.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
        }
        footprints_.push_back(std::move(fl));
      }
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(fmt::format("{}: {}", in_.string(), e.what()));
    }
    if (!(width_ > 0.0 && height_ > 0.0 && *gsd_ > 0.0)) {
      throw UsageError("image_width, image_height and gsd must be > 0");
    }
    if (!(coverage_ > 0.0)) throw UsageError("--coverage must be in (0, 1]");
  }

  void Run() override {
    PrepareOutDir(common_);
    WriteRunJson(sub_, common_,
                 {{"gsd", *gsd_}, {"points", points_.size()},
                  {"footprints", footprints_.size()}});
    std::vector<LabeledBox> boxes;
    for (const auto& p : points_) {
      boxes.push_back(
          {p.class_id, PointToBox(p, object_size_m_, *gsd_, width_, height_)});
    }
    for (size_t i = 0; i < footprints_.size(); ++i) {
      try {
        const PixelBox b = ClipBox(FootprintToBox(footprints_[i], coverage_),
                                   width_, height_);
        boxes.push_back({footprints_[i].class_id, b});
      } catch (const Error& e) {
        Fail(e.code(), fmt::format("footprint {}: {}", i, e.what()));
      }
    }
    EmitLabels(boxes, width_, height_, common_.out_dir / "labels.txt");
    spdlog::info("{} labels written", boxes.size());
  }

 private:
  fs::path in_;
  double object_size_m_ = kCarSizeMeters;
  double coverage_ = kFootprintCoverage;
  std::optional<double> gsd_;
  double width_ = 0.0, height_ = 0.0;
  std::vector<PointLabel> points_;
  std::vector<FootprintLabel> footprints_;
};

class SynthCommand : public Command {
 public:
  void Register(CLI::App& app) override {
    auto* s = Add(app, "synth", "Generate a scene with planted objects");
    s->add_option("--width", width_)->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--height", height_)->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--objects", objects_, "Randomly placed objects")
        ->capture_default_str();
    s->add_option("--object-px", object_px_)->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--class-id", class_id_)->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    s->add_option("--straddle", straddle_,
                  "Extra objects centred on interior tile corners")
        ->capture_default_str();
    s->add_option("--window", window_, "Tile window used for --straddle")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--overlap", overlap_, "Tile overlap used for --straddle")
        ->check(CLI::Range(0.0, 0.999))
        ->capture_default_str();
    s->add_option("--gsd", gsd_)->check(CLI::PositiveNumber)
        ->capture_default_str();
    s->add_option("--origin-x", origin_x_)->capture_default_str();
    s->add_option("--origin-y", origin_y_)->capture_default_str();
    s->add_option("--name", name_, "Scene name")->capture_default_str();
    s->add_option("--ext", ext_, "png or tif")->capture_default_str();
  }

  void Validate() override {
    if (ext_ != "png" && ext_ != "tif" && ext_ != "tiff") {
      throw UsageError(fmt::format("--ext: unsupported extension '{}'", ext_));
    }
    if (name_.empty() || name_.find('|') != std::string::npos) {
      throw UsageError("--name must be non-empty and free of '|'");
    }
  }

  void Run() override {
    PrepareOutDir(common_);
    SynthOptions o;
    o.width = width_;
    o.height = height_;
    o.n_objects = objects_;
    o.object_px = object_px_;
    o.seed = common_.ResolvedSeed();
    o.class_id = class_id_;
    if (straddle_ > 0) {
      o.fixed_boxes = StraddlingBoxes(width_, height_, window_, overlap_,
                                      object_px_, straddle_);
    }
    WriteRunJson(sub_, common_);
    const SynthScene scene = MakeSynthScene(o);
    ImageMeta meta;
    meta.name = name_;
    meta.transform = {origin_x_, origin_y_, gsd_};
    SaveImage(scene.image, meta, common_.out_dir / (name_ + "." + ext_));
    GlobalDetectionSet truth{name_, scene.truth};
    CanonicalSort(truth.detections);
    WriteDetections(truth, meta, DefaultClasses(),
                    common_.out_dir / "truth.jsonl");
    spdlog::info("{}: {}x{} px, {} objects", name_, width_, height_,
                 scene.truth.size());
  }

 private:
  int64_t width_ = 2000;
  int64_t height_ = 2000;
  size_t objects_ = 100;
  int object_px_ = 10;
  int class_id_ = 3;
  size_t straddle_ = 0;
  int64_t window_ = 416;
  double overlap_ = kDefaultOverlap;
  double gsd_ = 0.3;
  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  std::string name_ = "synth";
  std::string ext_ = "png";
};

}  // namespace

std::unique_ptr<Command> MakeDegradeCommand() {
  return std::make_unique<DegradeCommand>();
}
std::unique_ptr<Command> MakeAugmentCommand() {
  return std::make_unique<AugmentCommand>();
}
std::unique_ptr<Command> MakePrepLabelsCommand() {
  return std::make_unique<PrepLabelsCommand>();
}
std::unique_ptr<Command> MakeSynthCommand() {
  return std::make_unique<SynthCommand>();
}

}  // namespace gigadetect::cli
