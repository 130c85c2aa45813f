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

#include "metrics.hpp"

#include <json.hpp>

#include "error.hpp"

namespace bisyn {

EvalReport ComputeReport(const std::vector<int> &gold, const std::vector<int> &predicted) {
  if (gold.size() != predicted.size()) {
    ThrowRuntime("metrics: " + std::to_string(gold.size()) + " gold labels but " +
                 std::to_string(predicted.size()) + " predictions");
  }
  EvalReport r;
  r.count = gold.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] >= kNumClasses || predicted[i] < 0 ||
        predicted[i] >= kNumClasses) {
      ThrowRuntime("metrics: class index out of range");
    }
    ++r.confusion[gold[i]][predicted[i]];
    if (gold[i] == predicted[i]) ++correct;
  }
  if (r.count == 0) return r;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.count);
  double f1_sum = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    std::size_t tp = r.confusion[c][c], gold_c = 0, pred_c = 0;
    for (int k = 0; k < kNumClasses; ++k) {
      gold_c += r.confusion[c][k];
      pred_c += r.confusion[k][c];
    }
    r.precision[c] = pred_c ? static_cast<double>(tp) / static_cast<double>(pred_c) : 0.0;
    r.recall[c] = gold_c ? static_cast<double>(tp) / static_cast<double>(gold_c) : 0.0;
    const double denom = r.precision[c] + r.recall[c];
    r.f1[c] = denom > 0.0 ? 2.0 * r.precision[c] * r.recall[c] / denom : 0.0;
    f1_sum += r.f1[c];
  }
  r.macro_f1 = f1_sum / kNumClasses;
  return r;
}

std::string EvalReport::ToJson() const {
  nlohmann::json j;
  j["count"] = count;
  j["accuracy"] = accuracy;
  j["macro_f1"] = macro_f1;
  nlohmann::json per_class = nlohmann::json::object();
  for (int c = 0; c < kNumClasses; ++c) {
    per_class[PolarityName(static_cast<Polarity>(c))] = {
        {"precision", precision[c]}, {"recall", recall[c]}, {"f1", f1[c]}};
  }
  j["per_class"] = per_class;
  j["confusion"] = confusion;
  return j.dump();
}

}  // namespace bisyn
