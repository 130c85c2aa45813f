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

#include <memory>
#include <optional>
#include <vector>

#include "archive.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "inter_context.hpp"
#include "intra_context.hpp"

namespace bisyn {

inline const char *kClassifierW = "classifier.w";
inline const char *kClassifierB = "classifier.b";

// A trained or freshly initialized classifier.
struct Model {
  ModelConfig config;
  Vocabulary vocab;
  ParamStore<float> params;
  std::shared_ptr<const EmbeddingArchive> archive;  // archive mode only
};

// Initializes every parameter from `config.seed`. Relation-encoder weights
// are drawn last, so a model with the relation encoder switched off shares
// all other initial values with one that has it on.
Model InitModel(const ModelConfig &config, Vocabulary vocab,
                std::shared_ptr<const EmbeddingArchive> archive = nullptr);

// Graphs and segmentation terms of one sentence, built once and reused
// across epochs.
struct PreparedSentence {
  const CollapsedRecord *record = nullptr;
  std::vector<int> aspect_tokens;                        // collapsed positions
  std::vector<std::vector<AdjacencyMatrix>> aspect_graphs;  // per aspect
  std::vector<SegTerm> terms;                            // per neighbor pair
  std::optional<AspectContextGraph> relation;            // >= 2 aspects, variant on
  std::vector<int> gold;                                 // class index per aspect
};

PreparedSentence PrepareSentence(const CollapsedRecord &record, const ModelConfig &config);
std::vector<PreparedSentence> PrepareAll(const std::vector<CollapsedRecord> &data,
                                         const ModelConfig &config);

template <typename T>
struct SentenceOutput {
  Var<T> logits;  // m x 3
  Var<T> v_as;    // m x 2d
  Var<T> v_aa;    // m x 2d, all zero when the relation path does not apply
  bool relation_applied = false;
};

// Full forward pass for every aspect of one sentence:
//   o = v_as + v_aa, logits = o W + b.
// With fewer than two aspects or the variant off, v_aa is zero and o is v_as
// itself.
template <typename T>
SentenceOutput<T> ForwardSentence(ForwardContext<T> &ctx, const PreparedSentence &sentence);

}  // namespace bisyn
