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

#include "hgat.hpp"

#include <cmath>

#include "error.hpp"

namespace bisyn {

Tensor GlorotUniform(std::size_t rows, std::size_t cols, std::size_t fan_in,
                     std::size_t fan_out, Rng &rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t = Tensor::Matrix(rows, cols);
  for (float &v : t.values()) v = static_cast<float>(rng.Uniform(-limit, limit));
  return t;
}

void InitGatLayer(ParamStore<float> &store, const std::string &prefix, const GatDims &dims,
                  Rng &rng) {
  if (dims.heads == 0 || dims.dim % dims.heads != 0) {
    ThrowValidation("model width " + std::to_string(dims.dim) +
                    " is not divisible by the head count " + std::to_string(dims.heads));
  }
  const std::size_t d = dims.dim, dh = dims.head_dim(), z = dims.heads, ff = dims.ff_dim;
  store.Add(prefix + ".proj", GlorotUniform(d, d, d, dh, rng));
  store.Add(prefix + ".attn", GlorotUniform(2 * dh, z, 2 * dh, 1, rng));
  store.Add(prefix + ".ff1.w", GlorotUniform(d, ff, d, ff, rng));
  store.Add(prefix + ".ff1.b", Tensor::Matrix(1, ff));
  store.Add(prefix + ".ff2.w", GlorotUniform(ff, d, ff, d, rng));
  store.Add(prefix + ".ff2.b", Tensor::Matrix(1, d));
}

template <typename T>
GatLayerVars<T> LoadGatLayer(Tape<T> &tape, ParamStore<T> &store, const std::string &prefix,
                             std::size_t heads) {
  GatLayerVars<T> v;
  v.proj = tape.Leaf(store.Get(prefix + ".proj"));
  v.attn = tape.Leaf(store.Get(prefix + ".attn"));
  v.ff1_w = tape.Leaf(store.Get(prefix + ".ff1.w"));
  v.ff1_b = tape.Leaf(store.Get(prefix + ".ff1.b"));
  v.ff2_w = tape.Leaf(store.Get(prefix + ".ff2.w"));
  v.ff2_b = tape.Leaf(store.Get(prefix + ".ff2.b"));
  v.heads = heads;
  if (v.attn.cols() != heads || v.proj.cols() % heads != 0) {
    ThrowRuntime("GAT layer '" + prefix + "' does not have " + std::to_string(heads) +
                 " heads");
  }
  return v;
}

template <typename T>
Var<T> GatLayer(Var<T> h, const AdjacencyMatrix &adj, const GatLayerVars<T> &layer,
                double input_dropout, const GatRunOptions &options) {
  const std::size_t n = h.rows();
  const std::size_t d = h.cols();
  if (adj.size() != n) {
    ThrowRuntime("GAT layer: adjacency is " + std::to_string(adj.size()) + " nodes, input has " +
                 std::to_string(n));
  }
  if (layer.proj.rows() != d || layer.proj.cols() != d) {
    ThrowRuntime("GAT layer: projection does not match width " + std::to_string(d));
  }
  if (input_dropout > 0.0 && options.rng) h = Dropout(h, input_dropout, *options.rng);

  std::vector<std::uint8_t> mask(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) mask[i * n + j] = adj.at(j, i) != 0;
  }

  const std::size_t heads = layer.heads;
  const std::size_t dh = d / heads;
  Var<T> projected = MatMul(h, layer.proj);
  std::vector<Var<T>> outputs;
  outputs.reserve(heads);
  for (std::size_t z = 0; z < heads; ++z) {
    Var<T> p = heads == 1 ? projected : SliceCols(projected, z * dh, (z + 1) * dh);
    Var<T> a = SliceCols(layer.attn, z, z + 1);
    Var<T> source = MatMul(p, SliceRows(a, 0, dh));
    Var<T> neighbor = MatMul(p, SliceRows(a, dh, 2 * dh));
    Var<T> scores = LeakyRelu(PairwiseSum(source, neighbor), options.leaky_slope);
    Var<T> alpha = MaskedSoftmaxRows(scores, mask);
    if (options.trace) options.trace->weights.push_back(alpha.value().template Cast<double>());
    outputs.push_back(Elu(MatMul(alpha, p)));
  }
  Var<T> g = heads == 1 ? outputs.front() : ConcatCols(outputs);
  Var<T> hidden = Elu(AddRow(MatMul(Add(g, h), layer.ff1_w), layer.ff1_b));
  return AddRow(MatMul(hidden, layer.ff2_w), layer.ff2_b);
}

template <typename T>
Var<T> HgatBlock(Var<T> h, const std::vector<AdjacencyMatrix> &graphs,
                 const HgatBlockVars<T> &block, const GatRunOptions &options,
                 bool first_block) {
  if (graphs.size() != block.size()) {
    ThrowRuntime("HGAT block: " + std::to_string(graphs.size()) + " graphs for " +
                 std::to_string(block.size()) + " layers");
  }
  for (std::size_t l = 0; l < graphs.size(); ++l) {
    const double rate = (l == 0 && first_block) ? 0.0 : options.layer_dropout;
    h = GatLayer(h, graphs[l], block[l], rate, options);
  }
  return h;
}

template <typename T>
Var<T> StackBlocks(Var<T> h, const std::vector<AdjacencyMatrix> &graphs,
                   const std::vector<HgatBlockVars<T>> &blocks, const GatRunOptions &options) {
  if (blocks.empty()) ThrowRuntime("HGAT stack: no blocks");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    h = HgatBlock(h, graphs, blocks[b], options, b == 0);
  }
  return h;
}

#define BISYN_INSTANTIATE_HGAT(T)                                                        \
  template GatLayerVars<T> LoadGatLayer(Tape<T> &, ParamStore<T> &, const std::string &,  \
                                        std::size_t);                                    \
  template Var<T> GatLayer(Var<T>, const AdjacencyMatrix &, const GatLayerVars<T> &,      \
                           double, const GatRunOptions &);                               \
  template Var<T> HgatBlock(Var<T>, const std::vector<AdjacencyMatrix> &,                \
                            const HgatBlockVars<T> &, const GatRunOptions &, bool);      \
  template Var<T> StackBlocks(Var<T>, const std::vector<AdjacencyMatrix> &,              \
                              const std::vector<HgatBlockVars<T>> &, const GatRunOptions &);

BISYN_INSTANTIATE_HGAT(float)
BISYN_INSTANTIATE_HGAT(double)

#undef BISYN_INSTANTIATE_HGAT

}  // namespace bisyn
