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

#include "inter_context.hpp"

#include <algorithm>

#include "error.hpp"

namespace bisyn {

int LowestCommonAncestor(const ConstituencyTree &tree, int token_i, int token_j) {
  const std::vector<int> up_i = tree.Ancestors(token_i);
  for (int id : tree.Ancestors(token_j)) {
    if (std::find(up_i.begin(), up_i.end(), id) != up_i.end()) return id;
  }
  ThrowRuntime("tokens share no ancestor");
}

const char *SegSourceName(SegSource source) {
  return source == SegSource::kInnerBranches ? "inner_branches" : "between_fallback";
}

SegTerm PhraseSegmentation(const ConstituencyTree &tree, int token_i, int token_j) {
  if (token_i >= token_j) ThrowRuntime("phrase segmentation needs token_i < token_j");
  const ConNode &lca = tree.node(LowestCommonAncestor(tree, token_i, token_j));
  SegTerm term;
  bool inside = false;
  for (int child : lca.children) {
    const TokenSpan &span = tree.node(child).span;
    if (span.Contains(token_j)) break;
    if (inside) {
      for (int t = span.lo; t < span.hi; ++t) term.words.push_back(t);
    }
    if (span.Contains(token_i)) inside = true;
  }
  if (!term.words.empty()) {
    term.source = SegSource::kInnerBranches;
    return term;
  }
  term.source = SegSource::kBetweenFallback;
  for (int t = token_i + 1; t < token_j; ++t) term.words.push_back(t);
  return term;
}

std::vector<SegTerm> NeighborSegTerms(const SentenceRecord &record) {
  const std::vector<AspectSpan> &aspects = record.sentence.aspects;
  std::vector<SegTerm> terms;
  for (std::size_t k = 0; k + 1 < aspects.size(); ++k) {
    terms.push_back(
        PhraseSegmentation(record.con, aspects[k].to - 1, aspects[k + 1].from));
  }
  return terms;
}

std::vector<std::size_t> AspectContextGraph::AspectPositions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind == NodeKind::kAspect) out.push_back(i);
  }
  return out;
}

namespace {

AdjacencyMatrix Symmetrized(const AdjacencyMatrix &a) {
  AdjacencyMatrix out = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a.at(j, i)) out.at(i, j) = 1;
    }
  }
  return out;
}

}  // namespace

AspectContextGraph BuildAspectContextGraph(std::size_t num_aspects,
                                           const std::vector<SegTerm> &terms,
                                           InterVariant variant) {
  if (num_aspects == 0) ThrowRuntime("aspect-context graph needs at least one aspect");
  if (terms.size() + 1 != num_aspects) {
    ThrowRuntime("expected " + std::to_string(num_aspects - 1) + " segmentation terms, got " +
                 std::to_string(terms.size()));
  }
  if (variant == InterVariant::kOff) ThrowRuntime("aspect-context graph requested with variant off");

  AspectContextGraph g;
  const bool with_terms = variant == InterVariant::kBi || variant == InterVariant::kUndirected;
  std::vector<std::size_t> aspect_pos(num_aspects);
  std::vector<long> term_pos(terms.size(), -1);
  for (std::size_t k = 0; k < num_aspects; ++k) {
    aspect_pos[k] = g.nodes.size();
    g.nodes.push_back({NodeKind::kAspect, k});
    if (with_terms && k < terms.size() && !terms[k].words.empty()) {
      term_pos[k] = static_cast<long>(g.nodes.size());
      g.nodes.push_back({NodeKind::kTerm, k});
    }
  }

  AdjacencyMatrix directed = AdjacencyMatrix::Identity(g.nodes.size());
  if (variant == InterVariant::kGlobalAspect) {
    for (std::size_t i = 0; i < num_aspects; ++i) {
      for (std::size_t j = 0; j < num_aspects; ++j) directed.at(i, j) = 1;
    }
  } else {
    for (std::size_t k = 0; k + 1 < num_aspects; ++k) {
      const bool left_is_odd = k % 2 == 0;
      const std::size_t src = aspect_pos[left_is_odd ? k : k + 1];
      const std::size_t dst = aspect_pos[left_is_odd ? k + 1 : k];
      if (term_pos[k] >= 0) {
        const auto t = static_cast<std::size_t>(term_pos[k]);
        directed.at(src, t) = 1;
        directed.at(t, dst) = 1;
      } else {
        directed.at(src, dst) = 1;
      }
    }
  }

  switch (variant) {
    case InterVariant::kBi:
    case InterVariant::kBiAdjacentAspect:
      g.fwd = directed;
      g.bwd = directed.Transposed();
      g.num_stacks = 2;
      break;
    default:
      g.fwd = Symmetrized(directed);
      g.bwd = g.fwd;
      g.num_stacks = 1;
      break;
  }
  return g;
}

std::string RelationLayerPrefix(const std::string &stack, std::size_t block, std::size_t layer) {
  return stack + ".b" + std::to_string(block) + ".l" + std::to_string(layer);
}

void InitInterParams(ParamStore<float> &store, const ModelConfig &config, Rng &rng) {
  if (config.inter == InterVariant::kOff) return;
  const std::size_t width = config.repr_dim();
  const GatDims dims{width, config.heads, config.ff_mult * width};
  const bool two_stacks =
      config.inter == InterVariant::kBi || config.inter == InterVariant::kBiAdjacentAspect;
  std::vector<std::string> stacks{kRelationForward};
  if (two_stacks) stacks.push_back(kRelationBackward);
  for (const std::string &stack : stacks) {
    for (std::size_t b = 0; b < config.inter_blocks; ++b) {
      for (std::size_t l = 0; l < config.inter_layers; ++l) {
        InitGatLayer(store, RelationLayerPrefix(stack, b, l), dims, rng);
      }
    }
  }
  if (two_stacks && config.inter_merge == MergeMode::kConcat) {
    store.Add(kRelationMergeW, GlorotUniform(2 * width, width, 2 * width, width, rng));
    store.Add(kRelationMergeB, Tensor::Matrix(1, width));
  }
}

template <typename T>
Var<T> TermNodeRepr(const ContextEncoding<T> &context, const std::vector<int> &words) {
  if (words.empty()) ThrowRuntime("term node without words");
  std::vector<std::size_t> rows(words.begin(), words.end());
  return ConcatCols(std::vector<Var<T>>{MeanRows(GatherRows(context.tokens, rows)),
                                        context.pooled});
}

template <typename T>
Var<T> RelationEncode(ForwardContext<T> &ctx, const AspectContextGraph &graph, Var<T> nodes,
                      const std::vector<std::string> &stacks) {
  const ModelConfig &c = ctx.config;
  if (stacks.size() < graph.num_stacks) ThrowRuntime("relation encoder: too few stack names");
  GatRunOptions options;
  options.leaky_slope = c.leaky_slope;
  options.layer_dropout = c.dropout_layer;
  options.rng = ctx.rng;
  options.trace = ctx.trace;

  std::vector<Var<T>> outputs;
  for (std::size_t s = 0; s < graph.num_stacks; ++s) {
    const AdjacencyMatrix &adj = s == 0 ? graph.fwd : graph.bwd;
    const std::vector<AdjacencyMatrix> graphs(c.inter_layers, adj);
    std::vector<HgatBlockVars<T>> blocks(c.inter_blocks);
    for (std::size_t b = 0; b < c.inter_blocks; ++b) {
      for (std::size_t l = 0; l < c.inter_layers; ++l) {
        blocks[b].push_back(LoadGatLayer(ctx.tape, ctx.params,
                                         RelationLayerPrefix(stacks[s], b, l), c.heads));
      }
    }
    outputs.push_back(StackBlocks(nodes, graphs, blocks, options));
  }

  Var<T> merged = outputs[0];
  if (outputs.size() == 2) {
    if (c.inter_merge == MergeMode::kConcat) {
      merged = AddRow(MatMul(ConcatCols(outputs), ctx.Param(kRelationMergeW)),
                      ctx.Param(kRelationMergeB));
    } else {
      merged = Add(outputs[0], outputs[1]);
    }
  }
  return GatherRows(merged, graph.AspectPositions());
}

template Var<float> TermNodeRepr(const ContextEncoding<float> &, const std::vector<int> &);
template Var<double> TermNodeRepr(const ContextEncoding<double> &, const std::vector<int> &);
template Var<float> RelationEncode(ForwardContext<float> &, const AspectContextGraph &,
                                   Var<float>, const std::vector<std::string> &);
template Var<double> RelationEncode(ForwardContext<double> &, const AspectContextGraph &,
                                    Var<double>, const std::vector<std::string> &);

}  // namespace bisyn
