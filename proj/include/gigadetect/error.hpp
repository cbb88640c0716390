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

#ifndef GIGADETECT_ERROR_HPP_
#define GIGADETECT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace gigadetect {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kIo,
  kUnsupportedFormat,
  kUnsupportedBitDepth,
  kMalformedSidecar,
  kShape,
  kNumeric,
  kSchema,
  kInfeasible,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every library failure is reported as an Error carrying a machine-readable
// code; the CLI maps codes onto exit statuses and error JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

inline void Require(bool condition, const std::string& message) {
  if (!condition) Fail(ErrorCode::kInvalidArgument, message);
}

}  // namespace gigadetect

#endif  // GIGADETECT_ERROR_HPP_
