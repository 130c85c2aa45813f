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

#include "tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace bisyn {

namespace {

std::size_t Product(const std::vector<std::size_t> &shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

template <typename T>
BasicTensor<T>::BasicTensor(std::vector<std::size_t> shape, T fill)
    : shape_(std::move(shape)), data_(Product(shape_), fill) {
  for (std::size_t d : shape_) {
    if (d == 0) ThrowRuntime("tensor dimensions must be positive");
  }
}

template <typename T>
BasicTensor<T>::BasicTensor(std::vector<std::size_t> shape, std::vector<T> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (std::size_t d : shape_) {
    if (d == 0) ThrowRuntime("tensor dimensions must be positive");
  }
  if (Product(shape_) != data_.size()) {
    ThrowRuntime("tensor data length " + std::to_string(data_.size()) +
                 " does not match shape " + ShapeString(shape_));
  }
}

template <typename T>
BasicTensor<T> BasicTensor<T>::Row(std::span<const T> values) {
  return BasicTensor({1, values.size()},
                     std::vector<T>(values.begin(), values.end()));
}

template <typename T>
std::size_t BasicTensor<T>::rows() const {
  if (shape_.empty()) return 0;
  return shape_.size() == 1 ? 1 : shape_[0];
}

template <typename T>
std::size_t BasicTensor<T>::cols() const {
  if (shape_.empty()) return 0;
  return shape_.back();
}

template <typename T>
void BasicTensor<T>::Fill(T value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
bool BasicTensor<T>::AllFinite() const {
  for (T v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template class BasicTensor<float>;
template class BasicTensor<double>;

std::string ShapeString(const std::vector<std::size_t> &shape) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::Uniform() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

std::size_t Rng::Below(std::size_t n) {
  if (n == 0) ThrowRuntime("Rng::Below requires n > 0");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = Next();
  } while (v >= limit);
  return static_cast<std::size_t>(v % n);
}

}  // namespace bisyn
