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

#include "gigadetect/stitcher.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "gigadetect/error.hpp"
#include "json.hpp"

namespace gigadetect {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::vector<Detection> Globalize(std::span<const Detection> dets,
                                 const TileSpec& tile, int downsample_factor,
                                 double image_width, double image_height) {
  Require(downsample_factor >= 1, "downsample factor must be >= 1");
  const double f = downsample_factor;
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (const Detection& d : dets) {
    Detection g = d;
    g.box = ClipBox({(d.box.xmin + tile.col) * f, (d.box.ymin + tile.row) * f,
                     (d.box.xmax + tile.col) * f, (d.box.ymax + tile.row) * f},
                    image_width, image_height);
    g.tile_origin = TileOrigin{tile.row, tile.col};
    out.push_back(std::move(g));
  }
  return out;
}

GlobalDetectionSet Merge(std::span<const DetectionList> sets, double nms_iou) {
  GlobalDetectionSet merged;
  std::vector<Detection> all;
  for (const auto& s : sets) {
    if (merged.image_name.empty()) {
      merged.image_name = s.image_name;
    } else if (!s.image_name.empty() && s.image_name != merged.image_name) {
      Fail(ErrorCode::kInvalidArgument,
           fmt::format("cannot merge detections of '{}' and '{}'",
                       merged.image_name, s.image_name));
    }
    all.insert(all.end(), s.detections.begin(), s.detections.end());
  }
  CanonicalSort(all);
  merged.detections = Nms(all, nms_iou, /*per_class=*/true);
  return merged;
}

std::string ClassCatalog::Name(int class_id) const {
  if (class_id >= 0 && size_t(class_id) < names.size()) return names[class_id];
  return fmt::format("class_{}", class_id);
}

int ClassCatalog::Id(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : int(it - names.begin());
}

ClassCatalog DefaultClasses() {
  return {{"airplane", "boat", "building", "car", "airport"}};
}

std::string FormatDetectionLine(const std::string& image, const Detection& det,
                                const GeoTransform& transform,
                                const ClassCatalog& classes) {
  const GeoBox geo = PixelToGeo(det.box, transform);
  ordered_json j;
  j["image"] = image;
  j["class_id"] = det.class_id;
  j["class_name"] = classes.Name(det.class_id);
  j["confidence"] = det.confidence;
  j["xmin"] = det.box.xmin;
  j["ymin"] = det.box.ymin;
  j["xmax"] = det.box.xmax;
  j["ymax"] = det.box.ymax;
  j["geo_xmin"] = geo.xmin;
  j["geo_ymin"] = geo.ymin;
  j["geo_xmax"] = geo.xmax;
  j["geo_ymax"] = geo.ymax;
  j["scale_id"] = det.scale_id;
  return j.dump();
}

void WriteDetections(const GlobalDetectionSet& set, const ImageMeta& meta,
                     const ClassCatalog& classes, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  for (const auto& det : set.detections) {
    out << FormatDetectionLine(set.image_name, det, meta.transform, classes)
        << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, fmt::format("write failed: {}", path.string()));
}

std::vector<DetectionRecord> ReadDetectionRecords(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, fmt::format("cannot read {}", path.string()));
  std::vector<DetectionRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      DetectionRecord r;
      r.image = j.at("image").get<std::string>();
      r.class_name = j.value("class_name", std::string());
      r.detection.class_id = j.at("class_id").get<int>();
      r.detection.confidence = j.at("confidence").get<double>();
      r.detection.box = {j.at("xmin").get<double>(), j.at("ymin").get<double>(),
                         j.at("xmax").get<double>(), j.at("ymax").get<double>()};
      r.detection.scale_id = j.value("scale_id", std::string());
      r.geo = {j.value("geo_xmin", 0.0), j.value("geo_ymin", 0.0),
               j.value("geo_xmax", 0.0), j.value("geo_ymax", 0.0)};
      if (!r.detection.box.IsValid() || r.detection.confidence < 0.0 ||
          r.detection.confidence > 1.0) {
        Fail(ErrorCode::kSchema,
             fmt::format("{}:{}: invalid box or confidence", path.string(),
                         line_no));
      }
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kSchema,
           fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return records;
}

std::vector<DetectionList> ReadDetectionLists(const fs::path& path) {
  std::vector<DetectionList> lists;
  for (auto& r : ReadDetectionRecords(path)) {
    auto it = std::find_if(lists.begin(), lists.end(), [&](const auto& l) {
      return l.image_name == r.image;
    });
    if (it == lists.end()) {
      lists.push_back({r.image, {}});
      it = lists.end() - 1;
    }
    it->detections.push_back(std::move(r.detection));
  }
  return lists;
}

GlobalDetectionSet ReadDetections(const fs::path& path) {
  auto lists = ReadDetectionLists(path);
  if (lists.size() > 1) {
    Fail(ErrorCode::kSchema,
         fmt::format("{}: records name {} different images", path.string(),
                     lists.size()));
  }
  if (lists.empty()) return {};
  return {std::move(lists[0].image_name), std::move(lists[0].detections)};
}

void WriteDetectionsCsv(const GlobalDetectionSet& set, const ImageMeta& meta,
                        const ClassCatalog& classes, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  out << "image,class_id,class_name,confidence,xmin,ymin,xmax,ymax,geo_xmin,"
         "geo_ymin,geo_xmax,geo_ymax,scale_id\n";
  for (const auto& d : set.detections) {
    const GeoBox g = PixelToGeo(d.box, meta.transform);
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                       set.image_name, d.class_id, classes.Name(d.class_id),
                       d.confidence, d.box.xmin, d.box.ymin, d.box.xmax,
                       d.box.ymax, g.xmin, g.ymin, g.xmax, g.ymax, d.scale_id);
  }
}

}  // namespace gigadetect
