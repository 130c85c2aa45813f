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

#include "config.hpp"
#include "intra_context.hpp"
#include "syntax_graphs.hpp"
#include "tree.hpp"

namespace bisyn {

// Deepest node whose span holds both tokens.
int LowestCommonAncestor(const ConstituencyTree &tree, int token_i, int token_j);

enum class SegSource { kInnerBranches, kBetweenFallback };
const char *SegSourceName(SegSource source);

struct SegTerm {
  std::vector<int> words;  // token indices, ascending
  SegSource source = SegSource::kBetweenFallback;
};

// Words of the LCA children lying strictly between the child that holds
// `token_i` and the one that holds `token_j`. When there are no such
// children, the tokens strictly between the two positions. Requires
// token_i < token_j.
SegTerm PhraseSegmentation(const ConstituencyTree &tree, int token_i, int token_j);

// Segmentation terms of every pair of neighbor aspects, in sentence order.
std::vector<SegTerm> NeighborSegTerms(const SentenceRecord &record);

enum class NodeKind { kAspect, kTerm };

struct GraphNode {
  NodeKind kind = NodeKind::kAspect;
  // Aspect index, or for a term the index k of the pair (aspect k, k + 1).
  std::size_t index = 0;
};

// Node list plus two directed matrices with A(i, j) = 1 for an edge i -> j.
// Variants with a single relation use `fwd` only and keep `bwd` equal to it.
struct AspectContextGraph {
  std::vector<GraphNode> nodes;
  AdjacencyMatrix fwd;
  AdjacencyMatrix bwd;
  std::size_t num_stacks = 1;

  std::vector<std::size_t> AspectPositions() const;
};

// `terms` holds one entry per neighbor pair; an empty term links the two
// aspects directly. Aspect k (0-based) is odd in 1-based numbering when k is
// even, and forward edges run from odd aspects to their even neighbors.
AspectContextGraph BuildAspectContextGraph(std::size_t num_aspects,
                                           const std::vector<SegTerm> &terms,
                                           InterVariant variant);

std::string RelationLayerPrefix(const std::string &stack, std::size_t block, std::size_t layer);
inline const char *kRelationForward = "relation.fwd";
inline const char *kRelationBackward = "relation.bwd";
inline const char *kRelationMergeW = "relation.merge.w";
inline const char *kRelationMergeB = "relation.merge.b";

// Registers the relation encoder parameters for the configured variant.
// Nothing is added when the variant is off.
void InitInterParams(ParamStore<float> &store, const ModelConfig &config, Rng &rng);

// Term node input: [mean of the term's word rows ; pooled], 1 x 2d.
template <typename T>
Var<T> TermNodeRepr(const ContextEncoding<T> &context, const std::vector<int> &words);

// Runs one HGAT stack per relation over `nodes` (|nodes| x 2d) and returns
// the aspect rows. Stack s reads its weights under stacks[s]; passing the
// same name twice ties the two stacks.
template <typename T>
Var<T> RelationEncode(ForwardContext<T> &ctx, const AspectContextGraph &graph, Var<T> nodes,
                      const std::vector<std::string> &stacks = {kRelationForward,
                                                                kRelationBackward});

}  // namespace bisyn
