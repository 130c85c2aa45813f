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

#include "intra_context.hpp"

#include <algorithm>

#include "error.hpp"

namespace bisyn {

Vocabulary::Vocabulary() { Insert("<unk>"); }

void Vocabulary::Insert(const std::string &word) {
  if (index_.emplace(word, words_.size()).second) words_.push_back(word);
}

Vocabulary Vocabulary::Build(const std::vector<CollapsedRecord> &records) {
  Vocabulary v;
  for (const CollapsedRecord &r : records) {
    for (const std::string &t : r.record.sentence.tokens) v.Insert(t);
  }
  return v;
}

Vocabulary Vocabulary::FromWords(const std::vector<std::string> &words) {
  if (words.empty() || words.front() != "<unk>") {
    ThrowValidation("vocabulary must start with <unk>");
  }
  Vocabulary v;
  for (std::size_t i = 1; i < words.size(); ++i) v.Insert(words[i]);
  if (v.size() != words.size()) ThrowValidation("vocabulary has duplicate words");
  return v;
}

std::size_t Vocabulary::Lookup(const std::string &word) const {
  auto it = index_.find(word);
  return it == index_.end() ? kUnknown : it->second;
}

std::string SyntaxLayerPrefix(std::size_t block, std::size_t layer) {
  return "syntax.b" + std::to_string(block) + ".l" + std::to_string(layer);
}

void InitIntraParams(ParamStore<float> &store, const ModelConfig &config,
                     std::size_t vocab_size, Rng &rng) {
  const std::size_t d = config.dim;
  if (config.encoder == EncoderMode::kToy) {
    store.Add(kEmbeddingParam, GlorotUniform(vocab_size, d, vocab_size, d, rng));
    store.Add(kMarkerParam, GlorotUniform(1, d, 1, d, rng));
  }
  const GatDims dims{d, config.heads, config.ff_dim()};
  for (std::size_t b = 0; b < config.blocks; ++b) {
    for (std::size_t l = 0; l < config.layers_per_block; ++l) {
      InitGatLayer(store, SyntaxLayerPrefix(b, l), dims, rng);
    }
  }
}

template <typename T>
ContextEncoding<T> EncodeContext(ForwardContext<T> &ctx, const CollapsedRecord &record,
                                 std::optional<std::size_t> aspect_index) {
  const Sentence &s = record.record.sentence;
  if (aspect_index && *aspect_index >= s.aspects.size()) {
    ThrowRuntime("sentence '" + s.id + "' has no aspect " + std::to_string(*aspect_index));
  }
  ContextEncoding<T> out;
  if (ctx.config.encoder == EncoderMode::kArchive) {
    if (!ctx.archive) ThrowRuntime("archive encoder without an open archive");
    const std::string key = aspect_index ? AspectKey(s.id, *aspect_index) : ContextKey(s.id);
    const EmbeddingRecord rec = ctx.archive->Get(key);
    if (rec.dim() != ctx.config.dim) {
      ThrowValidation("archive record '" + key + "' has dim " + std::to_string(rec.dim()) +
                      ", model.dim is " + std::to_string(ctx.config.dim));
    }
    if (rec.n_tokens() != s.tokens.size()) {
      ThrowValidation("archive record '" + key + "' has " + std::to_string(rec.n_tokens()) +
                      " rows for " + std::to_string(s.tokens.size()) + " tokens");
    }
    out.tokens = ctx.tape.Constant(rec.rows.template Cast<T>());
    out.pooled = ctx.tape.Constant(rec.pooled.template Cast<T>());
    return out;
  }
  if (!ctx.vocab) ThrowRuntime("toy encoder without a vocabulary");
  std::vector<std::size_t> ids;
  ids.reserve(s.tokens.size());
  for (const std::string &t : s.tokens) ids.push_back(ctx.vocab->Lookup(t));
  Var<T> rows = GatherRows(ctx.Param(kEmbeddingParam), ids);
  if (aspect_index) {
    rows = AddToRow(rows, ctx.Param(kMarkerParam),
                    static_cast<std::size_t>(s.aspects[*aspect_index].from));
  }
  out.tokens = rows;
  out.pooled = MeanRows(rows);
  return out;
}

void ValidateArchive(const EmbeddingArchive &archive, const std::vector<CollapsedRecord> &data,
                     std::size_t dim) {
  if (archive.size() > 0 && archive.dim() != dim) {
    ThrowValidation("archive dim " + std::to_string(archive.dim()) +
                    " does not match model.dim " + std::to_string(dim));
  }
  for (const CollapsedRecord &r : data) {
    const Sentence &s = r.record.sentence;
    auto check = [&](const std::string &key) {
      const EmbeddingRecord rec = archive.Get(key);
      if (rec.n_tokens() != s.tokens.size()) {
        ThrowValidation("archive record '" + key + "' has " + std::to_string(rec.n_tokens()) +
                        " rows for " + std::to_string(s.tokens.size()) + " tokens");
      }
    };
    for (std::size_t k = 0; k < s.aspects.size(); ++k) check(AspectKey(s.id, k));
    check(ContextKey(s.id));
  }
}

std::vector<int> SelectGraphLayers(const ConstituencyTree &tree, int aspect_token,
                                   int max_layers) {
  if (max_layers < 1) ThrowRuntime("max_layers must be at least 1");
  const int depth = static_cast<int>(tree.Ancestors(aspect_token).size());
  std::vector<int> ranks;
  if (depth <= max_layers) {
    for (int r = 1; r <= depth; ++r) ranks.push_back(r);
    return ranks;
  }
  if (max_layers == 1) return {depth};
  if (max_layers == 2) return {1, depth};
  return {1, (depth + 1) / 2, depth};
}

std::vector<AdjacencyMatrix> AspectGraphs(const SentenceRecord &record, int aspect_token,
                                          FusionMode fusion, int max_layers) {
  const ConstituencyTree &tree = record.con;
  const std::vector<int> ancestors = tree.Ancestors(aspect_token);
  const std::vector<int> ranks = SelectGraphLayers(tree, aspect_token, max_layers);
  const bool dep_only = fusion == FusionMode::kDepOnly;
  const AdjacencyMatrix da = BuildDependencyAdjacency(record.dep, dep_only);
  const LayerPartition clauses = ClausePartition(tree);
  std::vector<AdjacencyMatrix> graphs;
  if (ranks.empty()) {
    // A one-token sentence whose tree is a bare leaf has no phrase above the
    // aspect; it still gets one (self-loop) graph.
    graphs.push_back(AdjacencyMatrix::Identity(record.sentence.tokens.size()));
    return graphs;
  }
  for (int r : ranks) {
    const int height = tree.height(ancestors[r - 1]);
    const AdjacencyMatrix ca = BuildConstituentAdjacency(BuildLayerPartition(tree, height));
    graphs.push_back(Fuse(ca, da, clauses, fusion));
  }
  return graphs;
}

template <typename T>
Var<T> SyntaxEncode(ForwardContext<T> &ctx, Var<T> tokens,
                    const std::vector<AdjacencyMatrix> &graphs) {
  const ModelConfig &c = ctx.config;
  if (graphs.empty() || graphs.size() > c.layers_per_block) {
    ThrowRuntime("syntax encoder: " + std::to_string(graphs.size()) +
                 " graphs for blocks of " + std::to_string(c.layers_per_block) + " layers");
  }
  std::vector<HgatBlockVars<T>> blocks(c.blocks);
  for (std::size_t b = 0; b < c.blocks; ++b) {
    for (std::size_t l = 0; l < graphs.size(); ++l) {
      blocks[b].push_back(LoadGatLayer(ctx.tape, ctx.params, SyntaxLayerPrefix(b, l), c.heads));
    }
  }
  GatRunOptions options;
  options.leaky_slope = c.leaky_slope;
  options.layer_dropout = c.dropout_layer;
  options.rng = ctx.rng;
  options.trace = ctx.trace;
  Var<T> h = ctx.MaybeDropout(tokens, c.dropout_input);
  h = StackBlocks(h, graphs, blocks, options);
  return ctx.MaybeDropout(h, c.dropout_output);
}

template <typename T>
Var<T> IntraRepr(ForwardContext<T> &ctx, const ContextEncoding<T> &encoding, Var<T> syntax,
                 int aspect_token) {
  (void)ctx;
  const std::vector<std::size_t> at{static_cast<std::size_t>(aspect_token)};
  Var<T> local = Add(GatherRows(encoding.tokens, at), GatherRows(syntax, at));
  return ConcatCols(std::vector<Var<T>>{local, encoding.pooled});
}

#define BISYN_INSTANTIATE_INTRA(T)                                                        \
  template ContextEncoding<T> EncodeContext(ForwardContext<T> &, const CollapsedRecord &, \
                                            std::optional<std::size_t>);                  \
  template Var<T> SyntaxEncode(ForwardContext<T> &, Var<T>,                               \
                               const std::vector<AdjacencyMatrix> &);                     \
  template Var<T> IntraRepr(ForwardContext<T> &, const ContextEncoding<T> &, Var<T>, int);

BISYN_INSTANTIATE_INTRA(float)
BISYN_INSTANTIATE_INTRA(double)

#undef BISYN_INSTANTIATE_INTRA

}  // namespace bisyn
