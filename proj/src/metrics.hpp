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

#include <array>
#include <string>
#include <vector>

#include "dataset.hpp"

namespace bisyn {

struct EvalReport {
  // confusion[gold][predicted]
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> confusion{};
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> f1{};
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::size_t count = 0;

  std::string ToJson() const;
};

// A class with no gold and no predicted items scores F1 = 0 and still counts
// toward the macro average. Empty input gives an all-zero report.
EvalReport ComputeReport(const std::vector<int> &gold, const std::vector<int> &predicted);

}  // namespace bisyn
