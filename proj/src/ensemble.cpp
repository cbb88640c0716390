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

#include "gigadetect/ensemble.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "gigadetect/error.hpp"
#include "gigadetect/imaging.hpp"

namespace gigadetect {

int64_t ScaleProfile::WindowPx(double gsd) const {
  if (window_px) return *window_px;
  Require(gsd > 0.0, "gsd must be > 0");
  return std::llround(chip_size_m / (gsd * downsample_factor));
}

bool ScaleProfile::HasClass(int class_id) const {
  return std::find(class_ids.begin(), class_ids.end(), class_id) !=
         class_ids.end();
}

std::vector<ScaleProfile> DefaultProfiles() {
  const ClassCatalog classes = DefaultClasses();
  ScaleProfile vehicles;
  vehicles.scale_id = "vehicles_buildings";
  vehicles.chip_size_m = 200.0;
  vehicles.downsample_factor = 1;
  vehicles.class_ids = {classes.Id("airplane"), classes.Id("boat"),
                        classes.Id("building"), classes.Id("car")};
  ScaleProfile airports;
  airports.scale_id = "airports";
  airports.chip_size_m = 2500.0;
  airports.downsample_factor = 4;
  airports.class_ids = {classes.Id("airport")};
  return {vehicles, airports};
}

std::vector<ScaleProfile> ProfilesFromJson(const nlohmann::json& j) {
  if (!j.is_array()) {
    Fail(ErrorCode::kSchema, "profile config must be a JSON array");
  }
  std::vector<ScaleProfile> profiles;
  try {
    for (const auto& item : j) {
      ScaleProfile p;
      p.scale_id = item.at("scale_id").get<std::string>();
      p.chip_size_m = item.at("chip_size_m").get<double>();
      p.downsample_factor = item.value("downsample_factor", 1);
      p.class_ids = item.at("class_ids").get<std::vector<int>>();
      p.backend = item.value("backend", std::string("mock"));
      p.weights_path = item.value("weights_path", std::string());
      if (item.contains("window_px")) {
        p.window_px = item.at("window_px").get<int64_t>();
      }
      if (p.scale_id.empty() || !(p.chip_size_m > 0.0) ||
          p.downsample_factor < 1 || p.class_ids.empty() ||
          (p.backend != "mock" && p.backend != "network") ||
          (p.window_px && *p.window_px < 1)) {
        Fail(ErrorCode::kSchema,
             fmt::format("profile '{}': invalid field values", p.scale_id));
      }
      profiles.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kSchema, fmt::format("profile config: {}", e.what()));
  }
  return profiles;
}

nlohmann::json ProfilesToJson(std::span<const ScaleProfile> profiles) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : profiles) {
    nlohmann::json item = {{"scale_id", p.scale_id},
                           {"chip_size_m", p.chip_size_m},
                           {"downsample_factor", p.downsample_factor},
                           {"class_ids", p.class_ids},
                           {"backend", p.backend}};
    if (!p.weights_path.empty()) item["weights_path"] = p.weights_path;
    if (p.window_px) item["window_px"] = *p.window_px;
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<ScaleProfile> LoadProfiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, fmt::format("cannot read {}", path.string()));
  try {
    return ProfilesFromJson(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kSchema, fmt::format("{}: {}", path.string(), e.what()));
  }
}

ScaleRun RunScale(const Raster& image, const ImageMeta& meta,
                  const ScaleProfile& profile, const DetectorBackend& backend,
                  const RunOptions& options) {
  Require(options.conf_threshold >= 0.0 && options.conf_threshold <= 1.0,
          "confidence threshold must be in [0, 1]");
  Require(profile.downsample_factor >= 1, "downsample factor must be >= 1");
  ValidateMeta(meta);

  ScaleRun run;
  run.scale_id = profile.scale_id;
  run.window_px = profile.WindowPx(meta.gsd());
  if (run.window_px < 1) {
    Fail(ErrorCode::kInvalidArgument,
         fmt::format("profile '{}' gives a {} px window at gsd {}",
                     profile.scale_id, run.window_px, meta.gsd()));
  }

  Raster degraded;
  const Raster* work = &image;
  if (profile.downsample_factor > 1) {
    degraded = Degrade(image.View(), meta.gsd(),
                       meta.gsd() * profile.downsample_factor);
    work = &degraded;
  }
  const TilePlan plan = PlanTiles(work->width(), work->height(), run.window_px,
                                  options.overlap, meta.name);
  run.tiles = plan.tiles.size();

  const RasterView view = work->View();
  const double native_w = double(image.width());
  const double native_h = double(image.height());
  const int64_t n_tiles = int64_t(plan.tiles.size());
  std::vector<std::vector<Detection>> per_tile(plan.tiles.size());
  std::vector<std::string> errors(plan.tiles.size());
  std::vector<size_t> rejected(plan.tiles.size(), 0);

  const bool parallel = options.workers != 1 && backend.ConcurrentSafe();
  const int threads =
      options.workers > 0 ? options.workers : omp_get_max_threads();

#pragma omp parallel for if (parallel) num_threads(threads) schedule(dynamic, 4)
  for (int64_t t = 0; t < n_tiles; ++t) {
    const TileSpec& tile = plan.tiles[size_t(t)];
    try {
      const RasterView chip = view.Sub(tile.col, tile.row, tile.width,
                                       tile.height);
      auto raw = backend.Detect(chip, profile,
                                {tile, profile.downsample_factor});
      std::vector<Detection> kept;
      kept.reserve(raw.size());
      for (auto& d : raw) {
        if (!(d.confidence >= 0.0 && d.confidence <= 1.0) ||
            !d.box.IsValid()) {
          Fail(ErrorCode::kNumeric,
               "backend returned an invalid confidence or box");
        }
        if (!profile.HasClass(d.class_id)) {
          ++rejected[size_t(t)];
          continue;
        }
        if (d.confidence < options.conf_threshold) continue;
        d.scale_id = profile.scale_id;
        kept.push_back(std::move(d));
      }
      per_tile[size_t(t)] = Globalize(kept, tile, profile.downsample_factor,
                                      native_w, native_h);
    } catch (const std::exception& e) {
      errors[size_t(t)] = e.what();
      if (errors[size_t(t)].empty()) errors[size_t(t)] = "backend failure";
    }
  }

  for (size_t t = 0; t < per_tile.size(); ++t) {
    if (!errors[t].empty()) {
      run.failures.push_back({plan.tiles[t], errors[t]});
      continue;
    }
    run.rejected_out_of_profile += rejected[t];
    run.detections.insert(run.detections.end(), per_tile[t].begin(),
                          per_tile[t].end());
  }
  return run;
}

EnsembleRun RunEnsemble(const Raster& image, const ImageMeta& meta,
                        std::span<const ScaleProfile> profiles,
                        std::span<const DetectorBackend* const> backends,
                        const RunOptions& options, double nms_iou) {
  Require(!profiles.empty(), "an ensemble needs at least one profile");
  Require(profiles.size() == backends.size(),
          "one backend is required per profile");
  EnsembleRun out;
  std::vector<DetectionList> lists;
  for (size_t i = 0; i < profiles.size(); ++i) {
    Require(backends[i] != nullptr, "null detector backend");
    ScaleRun run = RunScale(image, meta, profiles[i], *backends[i], options);
    lists.push_back({meta.name, std::move(run.detections)});
    run.detections.clear();
    out.scales.push_back(std::move(run));
  }
  out.merged = Merge(lists, nms_iou);
  return out;
}

double AreaKm2(int64_t width, int64_t height, double gsd) {
  Require(width >= 0 && height >= 0 && gsd > 0.0,
          "area needs non-negative dimensions and gsd > 0");
  return double(width) * double(height) * gsd * gsd / 1e6;
}

double Km2PerMinute(double area_km2, double seconds) {
  Require(seconds > 0.0, "elapsed time must be > 0");
  return area_km2 / (seconds / 60.0);
}

}  // namespace gigadetect
