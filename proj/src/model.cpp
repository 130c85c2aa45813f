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

#include "model.hpp"

#include "error.hpp"

namespace bisyn {

Model InitModel(const ModelConfig &config, Vocabulary vocab,
                std::shared_ptr<const EmbeddingArchive> archive) {
  ValidateConfig(config);
  if (config.encoder == EncoderMode::kArchive && !archive) {
    ThrowValidation("encoder.mode=archive needs an embedding archive");
  }
  Model model{config, std::move(vocab), {}, std::move(archive)};
  Rng rng(config.seed);
  InitIntraParams(model.params, config, model.vocab.size(), rng);
  const std::size_t width = config.repr_dim();
  model.params.Add(kClassifierW, GlorotUniform(width, kNumClasses, width, kNumClasses, rng));
  model.params.Add(kClassifierB, Tensor::Matrix(1, kNumClasses));
  InitInterParams(model.params, config, rng);
  return model;
}

PreparedSentence PrepareSentence(const CollapsedRecord &record, const ModelConfig &config) {
  const SentenceRecord &r = record.record;
  PreparedSentence p;
  p.record = &record;
  const int budget = static_cast<int>(config.layers_per_block);
  for (const AspectSpan &a : r.sentence.aspects) {
    p.aspect_tokens.push_back(a.from);
    p.aspect_graphs.push_back(AspectGraphs(r, a.from, config.fusion, budget));
    p.gold.push_back(static_cast<int>(a.polarity));
  }
  if (p.aspect_tokens.empty()) {
    ThrowValidation("sentence '" + r.sentence.id + "' has no aspects");
  }
  p.terms = NeighborSegTerms(r);
  if (config.inter != InterVariant::kOff && p.aspect_tokens.size() >= 2) {
    p.relation = BuildAspectContextGraph(p.aspect_tokens.size(), p.terms, config.inter);
  }
  return p;
}

std::vector<PreparedSentence> PrepareAll(const std::vector<CollapsedRecord> &data,
                                         const ModelConfig &config) {
  std::vector<PreparedSentence> out;
  out.reserve(data.size());
  for (const CollapsedRecord &r : data) out.push_back(PrepareSentence(r, config));
  return out;
}

template <typename T>
SentenceOutput<T> ForwardSentence(ForwardContext<T> &ctx, const PreparedSentence &sentence) {
  const CollapsedRecord &record = *sentence.record;
  const std::size_t m = sentence.aspect_tokens.size();
  std::vector<Var<T>> rows;
  rows.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const ContextEncoding<T> enc = EncodeContext(ctx, record, std::optional<std::size_t>(k));
    const Var<T> syntax = SyntaxEncode(ctx, enc.tokens, sentence.aspect_graphs[k]);
    rows.push_back(IntraRepr(ctx, enc, syntax, sentence.aspect_tokens[k]));
  }
  SentenceOutput<T> out;
  out.v_as = ConcatRows(rows);

  Var<T> o = out.v_as;
  if (sentence.relation && ctx.config.inter != InterVariant::kOff) {
    const AspectContextGraph &graph = *sentence.relation;
    const ContextEncoding<T> plain = EncodeContext(ctx, record, std::nullopt);
    std::vector<Var<T>> nodes;
    for (const GraphNode &node : graph.nodes) {
      nodes.push_back(node.kind == NodeKind::kAspect
                          ? rows[node.index]
                          : TermNodeRepr(plain, sentence.terms[node.index].words));
    }
    out.v_aa = RelationEncode(ctx, graph, ConcatRows(nodes));
    out.relation_applied = true;
    o = Add(o, out.v_aa);
  } else {
    out.v_aa = ctx.tape.Constant(BasicTensor<T>::Matrix(m, ctx.config.repr_dim()));
  }
  out.logits = AddRow(MatMul(o, ctx.Param(kClassifierW)), ctx.Param(kClassifierB));
  return out;
}

template SentenceOutput<float> ForwardSentence(ForwardContext<float> &,
                                               const PreparedSentence &);
template SentenceOutput<double> ForwardSentence(ForwardContext<double> &,
                                                const PreparedSentence &);

}  // namespace bisyn
