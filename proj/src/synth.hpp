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
#include <vector>

#include "dataset.hpp"

namespace bisyn {

struct SynthOptions {
  std::size_t n = 50;
  std::uint64_t seed = 1;
  // Chance that an aspect of a multi-clause sentence gets its dependency
  // head moved to the opinion word of another clause.
  double noise = 0.0;
};

// Sentences of one to three clauses "the <aspect> <copula> <opinion>" joined
// by and / but / while. Each aspect's label comes from the opinion word of
// its own clause. Trees have the shape
//   (S (S (NP the A) (VP is (ADJP good))) but (S (NP the B) (VP was (ADJP bad))))
// and the dependency root is the first clause's opinion word.
std::vector<SentenceRecord> GenerateSynthetic(const SynthOptions &options);

}  // namespace bisyn
