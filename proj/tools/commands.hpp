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

#ifndef GIGADETECT_TOOLS_COMMANDS_HPP_
#define GIGADETECT_TOOLS_COMMANDS_HPP_

#include <memory>
#include <vector>

#include "cli_support.hpp"

namespace gigadetect::cli {

class Command {
 public:
  virtual ~Command() = default;

  // Creates the subcommand on `app` and binds its flags.
  virtual void Register(CLI::App& app) = 0;
  // Checks inputs and config before any work; failures are usage errors.
  virtual void Validate() {}
  virtual void Run() = 0;

  CLI::App* sub() const { return sub_; }
  const Common& common() const { return common_; }

 protected:
  CLI::App* Add(CLI::App& app, const std::string& name,
                const std::string& description) {
    sub_ = app.add_subcommand(name, description);
    AddCommon(sub_, common_);
    return sub_;
  }

  CLI::App* sub_ = nullptr;
  Common common_;
};

std::unique_ptr<Command> MakeTileCommand();
std::unique_ptr<Command> MakeDetectCommand();
std::unique_ptr<Command> MakeStitchCommand();
std::unique_ptr<Command> MakeEvalCommand();
std::unique_ptr<Command> MakeDegradeCommand();
std::unique_ptr<Command> MakeAugmentCommand();
std::unique_ptr<Command> MakePrepLabelsCommand();
std::unique_ptr<Command> MakeFitCurveCommand();
std::unique_ptr<Command> MakeSynthCommand();
std::unique_ptr<Command> MakeNetinfoCommand();
std::unique_ptr<Command> MakeBenchCommand();

}  // namespace gigadetect::cli

#endif  // GIGADETECT_TOOLS_COMMANDS_HPP_
