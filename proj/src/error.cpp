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

#include "error.hpp"

#include <iostream>

namespace bisyn {

namespace {

void DefaultSink(const std::string &message) {
  std::cerr << "warning: " << message << "\n";
}

WarningSink g_sink = DefaultSink;

}  // namespace

void ThrowValidation(const std::string &message) {
  throw Error(ErrorKind::kValidation, message);
}

void ThrowRuntime(const std::string &message) {
  throw Error(ErrorKind::kRuntime, message);
}

void ThrowNumeric(const std::string &message) {
  throw Error(ErrorKind::kNumeric, message);
}

void SetWarningSink(WarningSink sink) { g_sink = sink ? sink : DefaultSink; }

void Warn(const std::string &message) { g_sink(message); }

}  // namespace bisyn
