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
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace bisyn {

// Dense row-major tensor. The model only ever needs rank 1 and rank 2, and
// every autodiff value is a matrix (vectors are stored as 1 x d rows), but
// the shape is kept general so archives and checkpoints can describe it.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;
  explicit BasicTensor(std::vector<std::size_t> shape, T fill = T(0));
  BasicTensor(std::vector<std::size_t> shape, std::vector<T> data);

  static BasicTensor Matrix(std::size_t rows, std::size_t cols, T fill = T(0)) {
    return BasicTensor({rows, cols}, fill);
  }
  static BasicTensor Row(std::span<const T> values);

  const std::vector<std::size_t> &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Rank-1 tensors behave as a single row.
  std::size_t rows() const;
  std::size_t cols() const;

  T *data() { return data_.data(); }
  const T *data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::span<T> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols(), cols()};
  }

  T &operator[](std::size_t i) { return data_[i]; }
  const T &operator[](std::size_t i) const { return data_[i]; }
  T &operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  const T &operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols() + c];
  }

  void Fill(T value);
  bool AllFinite() const;
  bool SameShape(const BasicTensor &other) const { return shape_ == other.shape_; }

  template <typename U>
  BasicTensor<U> Cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return BasicTensor<U>(shape_, std::move(out));
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;

std::string ShapeString(const std::vector<std::size_t> &shape);

// Seeded std::mt19937_64 with its own uniform draws; a seed gives the same
// stream with every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t Next() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n).
  std::size_t Below(std::size_t n);

  template <typename It>
  void Shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      std::swap(first[i - 1], first[Below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bisyn
