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
#include <deque>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "params.hpp"
#include "tensor.hpp"

namespace bisyn {

template <typename T>
class Tape;

// Handle to a value recorded on a tape. Cheap to copy; only valid while the
// tape is alive.
template <typename T>
class Var {
 public:
  Var() = default;
  Var(Tape<T> *tape, int id) : tape_(tape), id_(id) {}

  bool valid() const { return tape_ != nullptr; }
  Tape<T> &tape() const { return *tape_; }
  int id() const { return id_; }
  const BasicTensor<T> &value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  Tape<T> *tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so walking the
// node list backwards from the loss is a valid topological order.
template <typename T>
class Tape {
 public:
  // Called with the node's own id once its output gradient is complete.
  using BackwardFn = std::function<void(Tape &, int)>;

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  Var<T> Constant(BasicTensor<T> value);
  // Parameters are recorded once per tape; repeated lookups share the node.
  Var<T> Leaf(Param<T> &param);
  Var<T> Push(BasicTensor<T> value, std::span<const int> parents, BackwardFn backward);

  const BasicTensor<T> &Value(int id) const { return nodes_[id].value; }
  bool NeedsGrad(int id) const { return nodes_[id].needs_grad; }
  // Gradient buffer of a node, allocated as zeros on first access.
  BasicTensor<T> &Grad(int id);
  bool HasGrad(int id) const { return !nodes_[id].grad.empty(); }

  // Seeds d(root)/d(root) = 1 and propagates; root must be 1 x 1. Parameter
  // gradients are accumulated into Param::grad.
  void Backward(Var<T> root);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    BasicTensor<T> value;
    BasicTensor<T> grad;
    BackwardFn backward;
    bool needs_grad = false;
  };

  std::deque<Node> nodes_;
  std::unordered_map<const Param<T> *, int> leaves_;
};

template <typename T>
const BasicTensor<T> &Var<T>::value() const {
  return tape_->Value(id_);
}

// Differentiable ops. All operate on matrices; vectors are 1 x d rows.
template <typename T> Var<T> MatMul(Var<T> a, Var<T> b);
template <typename T> Var<T> Add(Var<T> a, Var<T> b);
// Adds a 1 x m row to every row of an n x m matrix.
template <typename T> Var<T> AddRow(Var<T> a, Var<T> row);
// Adds a 1 x m row to row `r` of a only.
template <typename T> Var<T> AddToRow(Var<T> a, Var<T> row, std::size_t r);
template <typename T> Var<T> Scale(Var<T> a, double factor);
template <typename T> Var<T> Elu(Var<T> a);
template <typename T> Var<T> LeakyRelu(Var<T> a, double slope);
template <typename T> Var<T> ConcatCols(const std::vector<Var<T>> &parts);
template <typename T> Var<T> ConcatRows(const std::vector<Var<T>> &parts);
template <typename T> Var<T> SliceCols(Var<T> a, std::size_t begin, std::size_t end);
template <typename T> Var<T> SliceRows(Var<T> a, std::size_t begin, std::size_t end);
// Row gather; repeated indices accumulate their gradients.
template <typename T> Var<T> GatherRows(Var<T> a, const std::vector<std::size_t> &index);
template <typename T> Var<T> MeanRows(Var<T> a);
template <typename T> Var<T> Sum(Var<T> a);
// u: n x 1, v: n x 1 -> n x n with out(i, j) = u(i) + v(j).
template <typename T> Var<T> PairwiseSum(Var<T> u, Var<T> v);
// Row-wise softmax restricted to mask(i, j) != 0; masked entries are 0.
template <typename T>
Var<T> MaskedSoftmaxRows(Var<T> scores, const std::vector<std::uint8_t> &mask);
// Inverted dropout: kept entries are scaled by 1 / (1 - rate).
template <typename T> Var<T> Dropout(Var<T> a, double rate, Rng &rng);
// Sum over rows of -log softmax(logits)[gold]. Probabilities are floored at
// `floor` in the reported value; the gradient is the exact softmax - onehot.
template <typename T>
Var<T> SoftmaxCrossEntropy(Var<T> logits, const std::vector<int> &gold,
                           double floor = 1e-12);

// Plain kernels shared with the ops above.
constexpr double kProbabilityFloor = 1e-12;

template <typename T>
std::vector<T> MaskedSoftmax(std::span<const T> scores,
                             std::span<const std::uint8_t> mask);
template <typename T>
std::vector<T> Softmax(std::span<const T> scores);
// -log(max(probs[gold], floor)). probs must sum to 1 within 1e-6.
template <typename T>
double CrossEntropy(std::span<const T> probs, int gold,
                    double floor = kProbabilityFloor);

}  // namespace bisyn
