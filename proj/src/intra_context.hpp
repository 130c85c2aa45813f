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

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "archive.hpp"
#include "autodiff.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "hgat.hpp"

namespace bisyn {

// Word list of the toy encoder. Index 0 is the shared unknown-word entry.
class Vocabulary {
 public:
  static constexpr std::size_t kUnknown = 0;

  Vocabulary();
  static Vocabulary Build(const std::vector<CollapsedRecord> &records);
  static Vocabulary FromWords(const std::vector<std::string> &words);

  std::size_t Lookup(const std::string &word) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string> &words() const { return words_; }

 private:
  void Insert(const std::string &word);
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Everything a forward pass reads. A null rng means evaluation: dropout is
// off and the pass is deterministic.
template <typename T>
struct ForwardContext {
  Tape<T> &tape;
  ParamStore<T> &params;
  const ModelConfig &config;
  const Vocabulary *vocab = nullptr;
  const EmbeddingArchive *archive = nullptr;
  Rng *rng = nullptr;
  AttentionTrace *trace = nullptr;

  Var<T> Param(const std::string &name) { return tape.Leaf(params.Get(name)); }
  bool training() const { return rng != nullptr; }
  Var<T> MaybeDropout(Var<T> v, double rate) {
    return (rng && rate > 0.0) ? Dropout(v, rate, *rng) : v;
  }
};

template <typename T>
struct ContextEncoding {
  Var<T> tokens;  // n x d
  Var<T> pooled;  // 1 x d
};

// Parameter names.
inline const char *kEmbeddingParam = "encoder.embedding";
inline const char *kMarkerParam = "encoder.marker";
std::string SyntaxLayerPrefix(std::size_t block, std::size_t layer);

// Adds toy-encoder and syntax-encoder parameters to the store.
void InitIntraParams(ParamStore<float> &store, const ModelConfig &config,
                     std::size_t vocab_size, Rng &rng);

// Aspect-conditioned encoding of a sentence, or the aspect-free encoding when
// `aspect_index` is empty. Toy mode looks tokens up in the embedding table,
// adds the marker vector at the aspect position and mean-pools the rows.
// Archive mode returns the stored "<id>#<k>" or "<id>#ctx" record.
template <typename T>
ContextEncoding<T> EncodeContext(ForwardContext<T> &ctx, const CollapsedRecord &record,
                                 std::optional<std::size_t> aspect_index);

// Checks that an archive holds a record of the right shape for every aspect
// and every sentence context of the dataset.
void ValidateArchive(const EmbeddingArchive &archive, const std::vector<CollapsedRecord> &data,
                     std::size_t dim);

// Which of the aspect's ancestors drive the syntax graphs, as 1-based ranks
// counted upward from the aspect leaf. With D ancestors: all of them when
// D <= max_layers, otherwise the bottom, middle (ceil(D / 2)) and top one.
// Budgets below three shrink the deep-tree pick to {1, D} or {D}.
std::vector<int> SelectGraphLayers(const ConstituencyTree &tree, int aspect_token,
                                   int max_layers);

// One fused adjacency matrix per selected ancestor, bottom first. The layer
// of ancestor a is the tree cut at height(a). In dep_only mode the
// dependency matrix is repeated once per selected layer.
std::vector<AdjacencyMatrix> AspectGraphs(const SentenceRecord &record, int aspect_token,
                                          FusionMode fusion, int max_layers);

// Syntax encoder: dropout on the input, the stacked HGAT blocks over
// `graphs`, dropout on the output. Block l-th layers beyond graphs.size()
// are unused for this aspect.
template <typename T>
Var<T> SyntaxEncode(ForwardContext<T> &ctx, Var<T> tokens,
                    const std::vector<AdjacencyMatrix> &graphs);

// [h_aspect + g_aspect ; pooled], 1 x 2d.
template <typename T>
Var<T> IntraRepr(ForwardContext<T> &ctx, const ContextEncoding<T> &encoding, Var<T> syntax,
                 int aspect_token);

}  // namespace bisyn
