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

#include "cli_support.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace gigadetect::cli {
namespace {

std::string ScalarToString(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw UsageError(fmt::format(
      "--config: values must be scalars or lists, got {}", v.dump()));
}

// Options worth echoing: long-named, not help or the config file itself.
bool Echoable(const CLI::Option* opt) {
  if (opt->get_lnames().empty()) return false;
  const std::string& name = opt->get_lnames().front();
  return name != "help";
}

nlohmann::ordered_json Typed(const std::string& text) {
  if (text.empty()) return text;
  try {
    auto v = nlohmann::ordered_json::parse(text);
    if (v.is_number() || v.is_boolean()) return v;
  } catch (const nlohmann::json::exception&) {
  }
  return text;
}

}  // namespace

std::vector<std::string> ExpandConfig(
    const std::vector<std::string>& args,
    const std::vector<std::string>& commands) {
  size_t cmd = args.size();
  for (size_t i = 0; i < args.size(); ++i) {
    if (std::find(commands.begin(), commands.end(), args[i]) !=
        commands.end()) {
      cmd = i;
      break;
    }
  }
  if (cmd == args.size()) return args;

  std::optional<std::string> config;
  std::set<std::string> given;
  for (size_t i = cmd + 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) continue;
    const std::string name = a.substr(2, a.find('=') - 2);
    given.insert(name);
    if (name == "config") {
      if (a.find('=') != std::string::npos) {
        config = a.substr(a.find('=') + 1);
      } else if (i + 1 < args.size()) {
        config = args[i + 1];
      }
    }
  }
  if (!config) return args;

  std::ifstream in(*config);
  if (!in) throw UsageError(fmt::format("--config: cannot read '{}'", *config));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("--config: {}", e.what()));
  }
  if (!j.is_object()) {
    throw UsageError("--config: expected a JSON object of flag values");
  }

  std::vector<std::string> spliced;
  for (const auto& [key, value] : j.items()) {
    if (key == "config") throw UsageError("--config: configs do not nest");
    if (given.count(key) || value.is_null()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) spliced.push_back("--" + key);
      continue;
    }
    spliced.push_back("--" + key);
    if (value.is_array()) {
      if (value.empty()) {
        throw UsageError(fmt::format("--config: '{}' is an empty list", key));
      }
      for (const auto& v : value) spliced.push_back(ScalarToString(v));
    } else {
      spliced.push_back(ScalarToString(value));
    }
  }
  std::vector<std::string> out(args.begin(), args.begin() + cmd + 1);
  out.insert(out.end(), spliced.begin(), spliced.end());
  out.insert(out.end(), args.begin() + cmd + 1, args.end());
  return out;
}

uint64_t Common::ResolvedSeed() const {
  if (seed) return *seed;
  if (const char* env = std::getenv("GIGADETECT_SEED")) {
    const std::string text(env);
    try {
      size_t used = 0;
      const unsigned long long v = std::stoull(text, &used);
      if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(
        fmt::format("GIGADETECT_SEED='{}' is not an unsigned integer", text));
  }
  return 0;
}

void AddCommon(CLI::App* sub, Common& common) {
  sub->add_option("--config", common.config,
                  "JSON object of flag values; explicit flags win");
  sub->add_option("--out", common.out_dir, "Output directory")
      ->capture_default_str();
  sub->add_option("--seed", common.seed,
                  "Random seed (falls back to GIGADETECT_SEED, then 0)");
  sub->add_option("--workers", common.workers,
                  "Worker threads; 0 uses all cores, 1 runs serially")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

void RequireFile(const std::filesystem::path& path, const std::string& flag) {
  if (!std::filesystem::is_regular_file(path)) {
    throw UsageError(
        fmt::format("{}: input file '{}' does not exist", flag, path.string()));
  }
}

std::vector<double> ParseDoubleList(const std::string& text,
                                    const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("{}: '{}' is not a number", flag, item));
    }
  }
  if (out.empty()) throw UsageError(fmt::format("{}: empty list", flag));
  return out;
}

nlohmann::ordered_json EchoConfig(const CLI::App* sub, const Common& common,
                                  const nlohmann::ordered_json& resolved) {
  nlohmann::ordered_json options = nlohmann::ordered_json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (!Echoable(opt)) continue;
    const std::string& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& r = opt->results();
      if (opt->get_expected_max() > 1 || r.size() > 1) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& v : r) arr.push_back(Typed(v));
        options[name] = arr;
      } else {
        options[name] = Typed(r.front());
      }
    } else if (!opt->get_default_str().empty()) {
      options[name] = Typed(opt->get_default_str());
    } else if (opt->get_expected_max() == 0) {
      options[name] = false;
    } else {
      options[name] = nullptr;
    }
  }
  nlohmann::ordered_json j;
  j["command"] = sub->get_name();
  j["options"] = options;
  j["seed"] = common.ResolvedSeed();
  j["workers"] = common.workers > 0 ? common.workers : omp_get_max_threads();
  if (!resolved.is_null()) j["resolved"] = resolved;
  return j;
}

void WriteJson(const std::filesystem::path& path,
               const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  if (!out) {
    throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  }
}

void PrepareOutDir(const Common& common) {
  std::error_code ec;
  std::filesystem::create_directories(common.out_dir, ec);
  if (ec) {
    throw std::runtime_error(fmt::format("cannot create {}: {}",
                                         common.out_dir.string(), ec.message()));
  }
}

void WriteRunJson(const CLI::App* sub, const Common& common,
                  const nlohmann::ordered_json& resolved) {
  WriteJson(common.out_dir / "run.json", EchoConfig(sub, common, resolved));
}

}  // namespace gigadetect::cli
