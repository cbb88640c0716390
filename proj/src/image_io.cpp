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

#include <png.h>
#include <tiffio.h>

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gigadetect/error.hpp"
#include "gigadetect/imaging.hpp"
#include "json.hpp"

namespace gigadetect {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum class FileFormat { kPng, kTiff, kUnknown };

FileFormat SniffFormat(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, fmt::format("cannot open {}", path.string()));
  std::array<unsigned char, 8> magic{};
  in.read(reinterpret_cast<char*>(magic.data()), magic.size());
  if (in.gcount() >= 8 && png_sig_cmp(magic.data(), 0, 8) == 0) {
    return FileFormat::kPng;
  }
  if (in.gcount() >= 4 &&
      ((magic[0] == 'I' && magic[1] == 'I' && magic[2] == 42 &&
        magic[3] == 0) ||
       (magic[0] == 'M' && magic[1] == 'M' && magic[2] == 0 &&
        magic[3] == 42))) {
    return FileFormat::kTiff;
  }
  return FileFormat::kUnknown;
}

FileFormat FormatFromExtension(const fs::path& path) {
  std::string ext = path.extension().string();
  for (auto& ch : ext) ch = char(std::tolower(static_cast<unsigned char>(ch)));
  if (ext == ".png") return FileFormat::kPng;
  if (ext == ".tif" || ext == ".tiff") return FileFormat::kTiff;
  return FileFormat::kUnknown;
}

Raster ReadPng(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    Fail(ErrorCode::kIo,
         fmt::format("cannot read PNG {}: {}", path.string(), image.message));
  }
  struct Finisher {
    png_image* img;
    ~Finisher() { png_image_free(img); }
  } finisher{&image};

  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    Fail(ErrorCode::kUnsupportedBitDepth,
         fmt::format("{}: only 8-bit PNG is supported", path.string()));
  }
  if (image.format != PNG_FORMAT_RGB) {
    Fail(ErrorCode::kUnsupportedFormat,
         fmt::format("{}: only RGB PNG (no alpha, no palette) is supported",
                     path.string()));
  }
  std::vector<uint8_t> data(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
    Fail(ErrorCode::kIo,
         fmt::format("cannot decode PNG {}: {}", path.string(),
                     image.message));
  }
  return Raster(image.width, image.height, std::move(data));
}

void WritePng(const Raster& raster, const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raster.width());
  image.height = static_cast<png_uint_32>(raster.height());
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, raster.data().data(),
                               0, nullptr)) {
    Fail(ErrorCode::kIo,
         fmt::format("cannot write PNG {}: {}", path.string(), image.message));
  }
}

struct TiffCloser {
  void operator()(TIFF* t) const { TIFFClose(t); }
};
using TiffHandle = std::unique_ptr<TIFF, TiffCloser>;

void SilenceLibtiff() {
  static const bool once = [] {
    TIFFSetWarningHandler(nullptr);
    TIFFSetErrorHandler(nullptr);
    return true;
  }();
  (void)once;
}

Raster ReadTiff(const fs::path& path) {
  SilenceLibtiff();
  TiffHandle tif(TIFFOpen(path.c_str(), "r"));
  if (!tif) Fail(ErrorCode::kIo, fmt::format("cannot read TIFF {}", path.string()));

  uint32_t width = 0, height = 0;
  uint16_t bits = 0, samples = 0, planar = PLANARCONFIG_CONTIG, photometric = 0;
  TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &width);
  TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &height);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bits);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &samples);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
  TIFFGetField(tif.get(), TIFFTAG_PHOTOMETRIC, &photometric);

  if (bits != 8) {
    Fail(ErrorCode::kUnsupportedBitDepth,
         fmt::format("{}: {}-bit TIFF, only 8-bit is supported",
                     path.string(), bits));
  }
  if (samples != 3 || photometric != PHOTOMETRIC_RGB ||
      planar != PLANARCONFIG_CONTIG || TIFFIsTiled(tif.get())) {
    Fail(ErrorCode::kUnsupportedFormat,
         fmt::format("{}: only striped, interleaved 3-sample RGB TIFF is "
                     "supported",
                     path.string()));
  }
  if (width == 0 || height == 0) {
    Fail(ErrorCode::kUnsupportedFormat,
         fmt::format("{}: empty TIFF", path.string()));
  }

  Raster raster(width, height);
  for (uint32_t y = 0; y < height; ++y) {
    if (TIFFReadScanline(tif.get(), raster.Row(y), y, 0) < 0) {
      Fail(ErrorCode::kIo,
           fmt::format("{}: failed to read scanline {}", path.string(), y));
    }
  }
  return raster;
}

void WriteTiff(const Raster& raster, const fs::path& path) {
  SilenceLibtiff();
  // Classic TIFF offsets are 32-bit.
  const bool big = raster.data().size() > (uint64_t(1) << 31);
  TiffHandle tif(TIFFOpen(path.c_str(), big ? "w8" : "w"));
  if (!tif) Fail(ErrorCode::kIo, fmt::format("cannot write TIFF {}", path.string()));
  TIFF* t = tif.get();
  TIFFSetField(t, TIFFTAG_IMAGEWIDTH, uint32_t(raster.width()));
  TIFFSetField(t, TIFFTAG_IMAGELENGTH, uint32_t(raster.height()));
  TIFFSetField(t, TIFFTAG_SAMPLESPERPIXEL, uint16_t(3));
  TIFFSetField(t, TIFFTAG_BITSPERSAMPLE, uint16_t(8));
  TIFFSetField(t, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_RGB);
  TIFFSetField(t, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
  TIFFSetField(t, TIFFTAG_COMPRESSION, COMPRESSION_NONE);
  TIFFSetField(t, TIFFTAG_ROWSPERSTRIP, TIFFDefaultStripSize(t, 0));
  for (int64_t y = 0; y < raster.height(); ++y) {
    if (TIFFWriteScanline(t, const_cast<uint8_t*>(raster.Row(y)),
                          uint32_t(y), 0) < 0) {
      Fail(ErrorCode::kIo,
           fmt::format("{}: failed to write scanline {}", path.string(), y));
    }
  }
}

}  // namespace

fs::path SidecarPath(const fs::path& image_path) {
  return fs::path(image_path.string() + ".meta.json");
}

void WriteSidecar(const ImageMeta& meta, const fs::path& path) {
  json j = {{"gsd", meta.transform.gsd},
            {"origin_x", meta.transform.origin_x},
            {"origin_y", meta.transform.origin_y}};
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, fmt::format("cannot write {}", path.string()));
  out << j.dump(2) << '\n';
}

bool ReadSidecar(const fs::path& path, ImageMeta& meta) {
  std::ifstream in(path);
  if (!in) return false;
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kMalformedSidecar,
         fmt::format("{}: {}", path.string(), e.what()));
  }
  if (!j.is_object()) {
    Fail(ErrorCode::kMalformedSidecar,
         fmt::format("{}: expected a JSON object", path.string()));
  }
  const auto number = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) {
      Fail(ErrorCode::kMalformedSidecar,
           fmt::format("{}: '{}' must be a number", path.string(), key));
    }
    field = j[key].get<double>();
  };
  number("gsd", meta.transform.gsd);
  number("origin_x", meta.transform.origin_x);
  number("origin_y", meta.transform.origin_y);
  if (!(meta.transform.gsd > 0.0) || !std::isfinite(meta.transform.gsd)) {
    Fail(ErrorCode::kMalformedSidecar,
         fmt::format("{}: gsd must be a positive number", path.string()));
  }
  return true;
}

LoadedImage LoadImage(const fs::path& path) {
  LoadedImage loaded;
  switch (SniffFormat(path)) {
    case FileFormat::kPng: loaded.raster = ReadPng(path); break;
    case FileFormat::kTiff: loaded.raster = ReadTiff(path); break;
    case FileFormat::kUnknown:
      Fail(ErrorCode::kUnsupportedFormat,
           fmt::format("{}: not a PNG or TIFF file", path.string()));
  }
  loaded.meta.name = path.stem().string();
  loaded.sidecar_found = ReadSidecar(SidecarPath(path), loaded.meta);
  if (!loaded.sidecar_found) {
    spdlog::warn("{}: no sidecar, assuming gsd 1.0 m and origin (0, 0)",
                 path.string());
  }
  return loaded;
}

void SaveImage(const Raster& raster, const ImageMeta& meta,
               const fs::path& path) {
  Require(!raster.empty(), "cannot save an empty raster");
  switch (FormatFromExtension(path)) {
    case FileFormat::kPng: WritePng(raster, path); break;
    case FileFormat::kTiff: WriteTiff(raster, path); break;
    case FileFormat::kUnknown:
      Fail(ErrorCode::kUnsupportedFormat,
           fmt::format("{}: extension must be .png, .tif or .tiff",
                       path.string()));
  }
  WriteSidecar(meta, SidecarPath(path));
}

}  // namespace gigadetect
