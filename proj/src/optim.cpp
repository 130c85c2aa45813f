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

#include "optim.hpp"

#include <cmath>

#include "error.hpp"

namespace bisyn {

void AdamStep(ParamStore<float> &store, AdamState &state) {
  const AdamOptions &o = state.options;
  for (auto &[name, p] : store.entries()) {
    if (!p.grad.SameShape(p.value)) {
      ThrowRuntime("adam: gradient shape mismatch for parameter '" + name + "'");
    }
    auto [mit, m_new] = state.first_moment.try_emplace(name, p.value.shape(), 0.0f);
    auto [vit, v_new] = state.second_moment.try_emplace(name, p.value.shape(), 0.0f);
    if (!mit->second.SameShape(p.value) || !vit->second.SameShape(p.value)) {
      ThrowRuntime("adam: moment shape mismatch for parameter '" + name + "'");
    }
  }

  const std::uint64_t t = ++state.step;
  const double correction1 = 1.0 - std::pow(o.beta1, static_cast<double>(t));
  const double correction2 = 1.0 - std::pow(o.beta2, static_cast<double>(t));
  for (auto &[name, p] : store.entries()) {
    float *w = p.value.data();
    const float *g = p.grad.data();
    float *m = state.first_moment.at(name).data();
    float *v = state.second_moment.at(name).data();
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double grad = static_cast<double>(g[i]) + o.l2 * w[i];
      const double mi = o.beta1 * m[i] + (1.0 - o.beta1) * grad;
      const double vi = o.beta2 * v[i] + (1.0 - o.beta2) * grad * grad;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      const double update = o.lr * (mi / correction1) / (std::sqrt(vi / correction2) + o.eps);
      w[i] = static_cast<float>(w[i] - update);
    }
  }
}

}  // namespace bisyn
