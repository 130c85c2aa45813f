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

#include <cstdint>
#include <map>
#include <string>

#include "params.hpp"

namespace bisyn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Added to the gradient as l2 * param before the moment updates.
  double l2 = 1e-5;
};

// Defaults for fine-tuning a pretrained encoder from an embedding archive.
inline AdamOptions ArchiveAdamDefaults() {
  AdamOptions o;
  o.lr = 2e-5;
  o.l2 = 1e-5;
  return o;
}

struct AdamState {
  AdamOptions options;
  std::uint64_t step = 0;
  std::map<std::string, Tensor> first_moment;
  std::map<std::string, Tensor> second_moment;
};

// One bias-corrected Adam update over every parameter in the store.
// Moments for unseen parameters start at zero; a moment whose shape differs
// from its parameter is an error naming that parameter.
void AdamStep(ParamStore<float> &store, AdamState &state);

}  // namespace bisyn
