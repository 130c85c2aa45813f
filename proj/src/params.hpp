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

#include <map>
#include <string>

#include "error.hpp"
#include "tensor.hpp"

namespace bisyn {

template <typename T>
struct Param {
  BasicTensor<T> value;
  BasicTensor<T> grad;
};

// Named trainable state. Iteration order is the lexicographic name order,
// which keeps initialization, optimizer updates and checkpoints reproducible.
template <typename T>
class ParamStore {
 public:
  using Map = std::map<std::string, Param<T>>;

  Param<T> &Add(const std::string &name, BasicTensor<T> value) {
    if (params_.count(name)) ThrowRuntime("duplicate parameter '" + name + "'");
    BasicTensor<T> grad(value.shape(), T(0));
    auto [it, _] = params_.emplace(name, Param<T>{std::move(value), std::move(grad)});
    return it->second;
  }

  bool Contains(const std::string &name) const { return params_.count(name) > 0; }

  Param<T> &Get(const std::string &name) {
    auto it = params_.find(name);
    if (it == params_.end()) ThrowRuntime("unknown parameter '" + name + "'");
    return it->second;
  }
  const Param<T> &Get(const std::string &name) const {
    auto it = params_.find(name);
    if (it == params_.end()) ThrowRuntime("unknown parameter '" + name + "'");
    return it->second;
  }

  void ZeroGrad() {
    for (auto &[_, p] : params_) p.grad.Fill(T(0));
  }

  std::size_t NumScalars() const {
    std::size_t n = 0;
    for (const auto &[_, p] : params_) n += p.value.size();
    return n;
  }

  Map &entries() { return params_; }
  const Map &entries() const { return params_; }
  std::size_t size() const { return params_.size(); }

  template <typename U>
  ParamStore<U> Cast() const {
    ParamStore<U> out;
    for (const auto &[name, p] : params_) {
      out.Add(name, p.value.template Cast<U>()).grad = p.grad.template Cast<U>();
    }
    return out;
  }

 private:
  Map params_;
};

}  // namespace bisyn
