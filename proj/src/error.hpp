// Copyright 2026 The BiSyn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace bisyn {

// Validation errors come from malformed inputs (files, configs, annotations).
// Runtime errors cover I/O and internal contract violations; numeric errors
// are raised when a loss or gradient stops being finite.
enum class ErrorKind { kValidation, kRuntime, kNumeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void ThrowValidation(const std::string &message);
[[noreturn]] void ThrowRuntime(const std::string &message);
[[noreturn]] void ThrowNumeric(const std::string &message);

// Warnings are collected rather than printed so library users decide where
// they go. The sink is process-wide and not synchronized.
using WarningSink = void (*)(const std::string &message);
void SetWarningSink(WarningSink sink);
void Warn(const std::string &message);

}  // namespace bisyn
