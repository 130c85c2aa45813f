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

#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "error.hpp"

namespace bisyn {

namespace {

double Evaluate(const ScalarForward &forward, ParamStore<double> &params) {
  Tape<double> tape;
  Var<double> loss = forward(tape, params);
  if (loss.value().size() != 1) ThrowRuntime("grad check: forward must return a scalar");
  const double v = loss.value()[0];
  if (!std::isfinite(v)) ThrowNumeric("grad check: non-finite loss");
  return v;
}

}  // namespace

GradCheckResult GradCheck(const ScalarForward &forward, ParamStore<double> &params,
                          const GradCheckOptions &options) {
  params.ZeroGrad();
  {
    Tape<double> tape;
    Var<double> loss = forward(tape, params);
    if (!std::isfinite(loss.value()[0])) ThrowNumeric("grad check: non-finite loss");
    tape.Backward(loss);
  }

  GradCheckResult result;
  for (auto &[name, p] : params.entries()) {
    const std::size_t n = p.value.size();
    std::vector<std::size_t> entries;
    if (options.max_entries_per_param == 0 || n <= options.max_entries_per_param) {
      for (std::size_t i = 0; i < n; ++i) entries.push_back(i);
    } else {
      const double stride = static_cast<double>(n) / options.max_entries_per_param;
      for (std::size_t k = 0; k < options.max_entries_per_param; ++k) {
        entries.push_back(static_cast<std::size_t>(k * stride));
      }
    }

    double diff2 = 0.0, analytic2 = 0.0, numeric2 = 0.0;
    for (std::size_t i : entries) {
      const double saved = p.value[i];
      p.value[i] = saved + options.step;
      const double plus = Evaluate(forward, params);
      p.value[i] = saved - options.step;
      const double minus = Evaluate(forward, params);
      p.value[i] = saved;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double analytic = p.grad[i];
      diff2 += (analytic - numeric) * (analytic - numeric);
      analytic2 += analytic * analytic;
      numeric2 += numeric * numeric;
    }
    result.entries_checked += entries.size();
    const double scale = std::sqrt(std::max(analytic2, numeric2));
    const double err = scale < 1e-10 ? std::sqrt(diff2) : std::sqrt(diff2) / scale;
    if (err > result.max_relative_error || result.worst_param.empty()) {
      result.max_relative_error = std::max(err, result.max_relative_error);
      if (err >= result.max_relative_error) result.worst_param = name;
    }
  }
  return result;
}

}  // namespace bisyn
