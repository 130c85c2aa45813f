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

#include <string>
#include <vector>

#include "autodiff.hpp"
#include "params.hpp"
#include "syntax_graphs.hpp"

namespace bisyn {

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
Tensor GlorotUniform(std::size_t rows, std::size_t cols, std::size_t fan_in,
                     std::size_t fan_out, Rng &rng);

struct GatDims {
  std::size_t dim = 64;     // model width d; input and output of every layer
  std::size_t heads = 4;    // Z; each head has width d / Z
  std::size_t ff_dim = 256; // hidden width of the feed-forward network

  std::size_t head_dim() const { return dim / heads; }
};

// Registers the parameters of one GAT layer under `prefix`:
//   <prefix>.proj   d x d        per-head projections side by side
//   <prefix>.attn   2(d/Z) x Z   column z scores head z: [source; neighbor]
//   <prefix>.ff1.w  d x ff, <prefix>.ff1.b 1 x ff
//   <prefix>.ff2.w  ff x d, <prefix>.ff2.b 1 x d
void InitGatLayer(ParamStore<float> &store, const std::string &prefix, const GatDims &dims,
                  Rng &rng);

template <typename T>
struct GatLayerVars {
  Var<T> proj, attn, ff1_w, ff1_b, ff2_w, ff2_b;
  std::size_t heads = 1;
};

template <typename T>
GatLayerVars<T> LoadGatLayer(Tape<T> &tape, ParamStore<T> &store, const std::string &prefix,
                             std::size_t heads);

template <typename T>
using HgatBlockVars = std::vector<GatLayerVars<T>>;

// Attention weights recorded during a forward pass, one n x n matrix per
// head and layer, in evaluation order.
struct AttentionTrace {
  std::vector<BasicTensor<double>> weights;
};

struct GatRunOptions {
  double leaky_slope = 0.2;
  // Dropout on the input of every layer after the first; needs `rng`.
  double layer_dropout = 0.0;
  Rng *rng = nullptr;
  AttentionTrace *trace = nullptr;
};

// One masked multi-head attention layer followed by the feed-forward map:
//   score(i, j) = LeakyReLU(a_z . [W_z h_i ; W_z h_j])
//   alpha(i, .) = softmax of the scores over the in-neighbors of i
//   g_i         = ||_z ELU(sum_j alpha(i, j) W_z h_j)
//   out_i       = FC(g_i + h_i),  FC(x) = ELU(x W1 + b1) W2 + b2
// Node i attends over every j with adj(j, i) = 1, so symmetric matrices give
// plain neighborhoods and directed ones pass messages along edges. Every node
// needs at least a self loop, otherwise "empty neighborhood" is raised.
// `input_dropout` applies to h before anything else when an rng is given.
template <typename T>
Var<T> GatLayer(Var<T> h, const AdjacencyMatrix &adj, const GatLayerVars<T> &layer,
                double input_dropout, const GatRunOptions &options);

// Applies layer l to graph l, feeding each output to the next layer.
template <typename T>
Var<T> HgatBlock(Var<T> h, const std::vector<AdjacencyMatrix> &graphs,
                 const HgatBlockVars<T> &block, const GatRunOptions &options,
                 bool first_block = true);

// Runs the blocks in sequence, each over the same graph list.
template <typename T>
Var<T> StackBlocks(Var<T> h, const std::vector<AdjacencyMatrix> &graphs,
                   const std::vector<HgatBlockVars<T>> &blocks, const GatRunOptions &options);

}  // namespace bisyn
