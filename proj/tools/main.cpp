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

#include <algorithm>
#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "gigadetect/error.hpp"

namespace {

using gigadetect::cli::Command;

int ReportError(const std::string& kind, const std::string& code,
                const std::string& message, int status) {
  nlohmann::ordered_json j;
  j["error"] = {{"kind", kind}, {"code", code}, {"message", message}};
  j["exit_code"] = status;
  std::cerr << j.dump() << std::endl;
  return status;
}

int Usage(const std::string& message) {
  return ReportError("usage", "usage", message, 2);
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("gigadetect"));
  spdlog::set_pattern("[%H:%M:%S.%e] [%l] %v");

  CLI::App app{"Tiled multi-scale object detection over large geospatial "
               "rasters"};
  app.set_version_flag("--version", "gigadetect 1.0.0");
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only log warnings and errors");

  std::vector<std::unique_ptr<Command>> commands;
  commands.push_back(gigadetect::cli::MakeTileCommand());
  commands.push_back(gigadetect::cli::MakeDetectCommand());
  commands.push_back(gigadetect::cli::MakeStitchCommand());
  commands.push_back(gigadetect::cli::MakeEvalCommand());
  commands.push_back(gigadetect::cli::MakeDegradeCommand());
  commands.push_back(gigadetect::cli::MakeAugmentCommand());
  commands.push_back(gigadetect::cli::MakePrepLabelsCommand());
  commands.push_back(gigadetect::cli::MakeFitCurveCommand());
  commands.push_back(gigadetect::cli::MakeSynthCommand());
  commands.push_back(gigadetect::cli::MakeNetinfoCommand());
  commands.push_back(gigadetect::cli::MakeBenchCommand());
  for (auto& c : commands) c->Register(app);

  try {
    std::vector<std::string> names;
    for (auto& c : commands) names.push_back(c->sub()->get_name());
    std::vector<std::string> args =
        gigadetect::cli::ExpandConfig({argv + 1, argv + argc}, names);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const gigadetect::cli::UsageError& e) {
    return Usage(e.what());
  } catch (const CLI::ParseError& e) {
    return Usage(e.what());
  } catch (const std::exception& e) {
    return Usage(e.what());
  }
  if (quiet) spdlog::set_level(spdlog::level::warn);

  Command* selected = nullptr;
  for (auto& c : commands) {
    if (c->sub()->parsed()) selected = c.get();
  }
  if (!selected) return Usage("no command given");

  try {
    gigadetect::cli::Validated([&] {
      (void)selected->common().ResolvedSeed();
      selected->Validate();
    });
    if (selected->common().workers > 0) {
      omp_set_num_threads(selected->common().workers);
    }
    selected->Run();
  } catch (const gigadetect::cli::UsageError& e) {
    return Usage(e.what());
  } catch (const gigadetect::Error& e) {
    return ReportError("runtime", std::string(gigadetect::ErrorCodeName(e.code())),
                       e.what(), 1);
  } catch (const std::exception& e) {
    return ReportError("runtime", "internal", e.what(), 1);
  }
  return 0;
}
