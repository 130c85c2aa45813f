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

#include <cstddef>
#include <functional>
#include <string>

#include "autodiff.hpp"
#include "params.hpp"

namespace bisyn {

// Builds a scalar loss on a fresh tape from the given parameters.
using ScalarForward = std::function<Var<double>(Tape<double> &, ParamStore<double> &)>;

struct GradCheckOptions {
  double step = 1e-3;
  // When non-zero, only this many entries per parameter are perturbed
  // (an evenly strided subset, always including the first entry).
  std::size_t max_entries_per_param = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_param;
  std::size_t entries_checked = 0;
};

// Compares tape gradients against central finite differences, all in double
// precision. The error for one parameter tensor is
//   ||analytic - numeric||_2 / max(||analytic||_2, ||numeric||_2),
// falling back to the absolute difference when both norms are below 1e-10.
// A non-finite loss raises a numeric error.
GradCheckResult GradCheck(const ScalarForward &forward, ParamStore<double> &params,
                          const GradCheckOptions &options = {});

}  // namespace bisyn
