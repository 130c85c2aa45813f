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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gradcheck.hpp"
#include "hgat.hpp"
#include "support.hpp"

using namespace bisyn;
namespace bt = bisyn::testing;

namespace {

ParamStore<double> LayerStore(const GatDims &dims, std::uint64_t seed,
                              const std::vector<std::string> &prefixes = {"gat"}) {
  Rng rng(seed);
  ParamStore<float> store;
  for (const std::string &p : prefixes) InitGatLayer(store, p, dims, rng);
  return store.Cast<double>();
}

BasicTensor<double> RunLayer(ParamStore<double> &store, const BasicTensor<double> &h,
                             const AdjacencyMatrix &adj, std::size_t heads,
                             AttentionTrace *trace = nullptr) {
  Tape<double> tape;
  GatRunOptions options;
  options.trace = trace;
  const GatLayerVars<double> layer = LoadGatLayer(tape, store, "gat", heads);
  return GatLayer(tape.Constant(h), adj, layer, 0.0, options).value();
}

}  // namespace

TEST_CASE("glorot initialization stays in range") {
  Rng rng(1);
  const Tensor w = GlorotUniform(30, 20, 30, 20, rng);
  const double bound = std::sqrt(6.0 / 50.0);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) max_abs = std::max(max_abs, std::abs(double(w[i])));
  CHECK(max_abs <= bound);
  CHECK(max_abs > 0.8 * bound);
}

TEST_CASE("gat layer parameters") {
  Rng rng(2);
  ParamStore<float> store;
  InitGatLayer(store, "x", GatDims{8, 2, 16}, rng);
  CHECK(store.Get("x.proj").value.shape() == std::vector<std::size_t>{8, 8});
  CHECK(store.Get("x.attn").value.shape() == std::vector<std::size_t>{8, 2});
  CHECK(store.Get("x.ff1.w").value.shape() == std::vector<std::size_t>{8, 16});
  CHECK(store.Get("x.ff1.b").value.shape() == std::vector<std::size_t>{1, 16});
  CHECK(store.Get("x.ff2.w").value.shape() == std::vector<std::size_t>{16, 8});
  CHECK(store.Get("x.ff2.b").value.shape() == std::vector<std::size_t>{1, 8});
  CHECK(store.size() == 6);
  CHECK_THROWS(InitGatLayer(store, "y", GatDims{10, 4, 16}, rng));
}

TEST_CASE("attention rows are distributions over in-neighbors") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.Below(16);
    const std::size_t heads = std::size_t{1} << rng.Below(3);
    const GatDims dims{8, heads, 16};
    ParamStore<double> store = LayerStore(dims, 100 + trial);
    const AdjacencyMatrix adj = bt::RandomAdjacency(n, rng.Uniform(0.0, 0.6), rng);
    AttentionTrace trace;
    RunLayer(store, bt::RandomMatrix(n, 8, rng), adj, heads, &trace);
    REQUIRE(trace.weights.size() == heads);
    for (const BasicTensor<double> &alpha : trace.weights) {
      for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (!adj.at(j, i)) CHECK(alpha(i, j) == 0.0);
          CHECK(alpha(i, j) >= 0.0);
          sum += alpha(i, j);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-6);
      }
    }
  }
}

TEST_CASE("non-neighbors cannot influence a node") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.Below(15);
    const std::size_t heads = std::size_t{1} << rng.Below(3);
    ParamStore<double> store = LayerStore(GatDims{8, heads, 16}, 200 + trial);
    const AdjacencyMatrix adj = bt::RandomAdjacency(n, rng.Uniform(0.0, 0.5), rng);
    const BasicTensor<double> h = bt::RandomMatrix(n, 8, rng);
    const BasicTensor<double> base = RunLayer(store, h, adj, heads);
    const std::size_t i = rng.Below(n);
    BasicTensor<double> perturbed = h;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || adj.at(j, i)) continue;
      for (std::size_t c = 0; c < 8; ++c) perturbed(j, c) += rng.Uniform(-3.0, 3.0);
    }
    const BasicTensor<double> moved = RunLayer(store, perturbed, adj, heads);
    for (std::size_t c = 0; c < 8; ++c) CHECK(moved(i, c) == base(i, c));
  }
}

TEST_CASE("directed edges carry messages one way") {
  Rng rng(5);
  ParamStore<double> store = LayerStore(GatDims{8, 2, 16}, 7);
  AdjacencyMatrix adj = AdjacencyMatrix::Identity(2);
  adj.at(0, 1) = 1;
  const BasicTensor<double> h = bt::RandomMatrix(2, 8, rng);
  const BasicTensor<double> base = RunLayer(store, h, adj, 2);
  BasicTensor<double> moved_src = h, moved_dst = h;
  moved_src(0, 0) += 1.0;
  moved_dst(1, 0) += 1.0;
  CHECK(RunLayer(store, moved_src, adj, 2)(1, 3) != base(1, 3));
  CHECK(RunLayer(store, moved_dst, adj, 2)(0, 3) == base(0, 3));
}

TEST_CASE("nodes without any in-neighbor are rejected") {
  ParamStore<double> store = LayerStore(GatDims{8, 2, 16}, 8);
  Rng rng(6);
  CHECK_THROWS_WITH(RunLayer(store, bt::RandomMatrix(3, 8, rng), AdjacencyMatrix(3), 2),
                    doctest::Contains("empty neighborhood"));
  CHECK_THROWS(RunLayer(store, bt::RandomMatrix(3, 8, rng), AdjacencyMatrix::Identity(4), 2));
}

TEST_CASE("gat layer and block gradients") {
  Rng rng(9);
  const GatDims dims{8, 2, 12};
  const std::size_t n = 5;
  const AdjacencyMatrix a0 = bt::RandomAdjacency(n, 0.4, rng);
  const AdjacencyMatrix a1 = bt::RandomAdjacency(n, 0.4, rng);
  const AdjacencyMatrix a2 = bt::RandomAdjacency(n, 0.4, rng);
  const BasicTensor<double> x = bt::RandomMatrix(n, 8, rng);
  const BasicTensor<double> readout = bt::RandomMatrix(8, 1, rng);

  ParamStore<double> single = LayerStore(dims, 10);
  single.Add("x", x);
  auto layer_loss = [&](Tape<double> &tape, ParamStore<double> &p) {
    const GatLayerVars<double> layer = LoadGatLayer(tape, p, "gat", dims.heads);
    Var<double> out = GatLayer(tape.Leaf(p.Get("x")), a0, layer, 0.0, GatRunOptions{});
    return Sum(MatMul(out, tape.Constant(readout)));
  };
  CHECK(GradCheck(layer_loss, single).max_relative_error <= 1e-3);

  ParamStore<double> block = LayerStore(dims, 11, {"l0", "l1", "l2"});
  block.Add("x", x);
  auto block_loss = [&](Tape<double> &tape, ParamStore<double> &p) {
    HgatBlockVars<double> vars;
    for (const char *name : {"l0", "l1", "l2"}) {
      vars.push_back(LoadGatLayer(tape, p, name, dims.heads));
    }
    Var<double> out = HgatBlock(tape.Leaf(p.Get("x")), {a0, a1, a2}, vars, GatRunOptions{});
    return Sum(MatMul(out, tape.Constant(readout)));
  };
  CHECK(GradCheck(block_loss, block).max_relative_error <= 1e-3);
}

TEST_CASE("blocks need one graph per layer") {
  ParamStore<double> store = LayerStore(GatDims{8, 2, 16}, 12, {"a", "b"});
  Tape<double> tape;
  HgatBlockVars<double> vars = {LoadGatLayer(tape, store, "a", 2),
                                LoadGatLayer(tape, store, "b", 2)};
  Rng rng(7);
  auto h = tape.Constant(bt::RandomMatrix(3, 8, rng));
  CHECK_THROWS(HgatBlock(h, {AdjacencyMatrix::Identity(3)}, vars, GatRunOptions{}));
  const auto out = StackBlocks(h, {AdjacencyMatrix::Identity(3), AdjacencyMatrix::Identity(3)},
                               std::vector<HgatBlockVars<double>>{vars, vars}, GatRunOptions{});
  CHECK(out.rows() == 3);
  CHECK(out.cols() == 8);
}

TEST_CASE("layer dropout needs an rng and is reproducible") {
  ParamStore<double> store = LayerStore(GatDims{8, 2, 16}, 13, {"a", "b"});
  Rng data(8);
  const BasicTensor<double> x = bt::RandomMatrix(4, 8, data);
  const std::vector<AdjacencyMatrix> graphs(2, bt::RandomAdjacency(4, 0.5, data));
  auto run = [&](Rng *rng) {
    Tape<double> tape;
    HgatBlockVars<double> vars = {LoadGatLayer(tape, store, "a", 2),
                                  LoadGatLayer(tape, store, "b", 2)};
    GatRunOptions options;
    options.layer_dropout = 0.5;
    options.rng = rng;
    return HgatBlock(tape.Constant(x), graphs, vars, options).value();
  };
  const auto plain1 = run(nullptr), plain2 = run(nullptr);
  CHECK(plain1.values()[0] == plain2.values()[0]);
  Rng r1(99), r2(99);
  const auto drop1 = run(&r1), drop2 = run(&r2);
  bool same = true, differs_from_plain = false;
  for (std::size_t i = 0; i < drop1.size(); ++i) {
    same &= drop1[i] == drop2[i];
    differs_from_plain |= drop1[i] != plain1[i];
  }
  CHECK(same);
  CHECK(differs_from_plain);
}
