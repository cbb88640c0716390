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

#ifndef GIGADETECT_TOOLS_CLI_SUPPORT_HPP_
#define GIGADETECT_TOOLS_CLI_SUPPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace gigadetect::cli {

// Bad flags, missing inputs or config violations: exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A config file is a flat JSON object keyed by long flag names. Its entries
// are spliced into `args` (argv without the program name) right after the
// subcommand, skipping any flag the command line already sets.
std::vector<std::string> ExpandConfig(const std::vector<std::string>& args,
                                      const std::vector<std::string>& commands);

// Options every command shares.
struct Common {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::optional<uint64_t> seed;
  int workers = 0;

  // Flag, then GIGADETECT_SEED, then 0.
  uint64_t ResolvedSeed() const;
};

void AddCommon(CLI::App* sub, Common& common);

// Runs `fn`, turning any library or parse failure into a UsageError.
template <typename Fn>
auto Validated(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

void RequireFile(const std::filesystem::path& path, const std::string& flag);

// Splits "a,b,c" into doubles; throws UsageError on junk.
std::vector<double> ParseDoubleList(const std::string& text,
                                    const std::string& flag);

// Every option of `sub` with its effective value, plus resolved extras.
nlohmann::ordered_json EchoConfig(const CLI::App* sub, const Common& common,
                                  const nlohmann::ordered_json& resolved = {});

void WriteJson(const std::filesystem::path& path,
               const nlohmann::ordered_json& j);

// Creates out_dir and writes run.json there.
void PrepareOutDir(const Common& common);
void WriteRunJson(const CLI::App* sub, const Common& common,
                  const nlohmann::ordered_json& resolved = {});

}  // namespace gigadetect::cli

#endif  // GIGADETECT_TOOLS_CLI_SUPPORT_HPP_
