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

#include "synth.hpp"

#include <array>
#include <string>

#include "error.hpp"
#include "tensor.hpp"

namespace bisyn {
namespace {

const std::vector<std::string> kAspects = {
    "food",  "service", "staff",   "pizza", "wine",   "price",
    "decor", "menu",    "dessert", "music", "coffee", "waiter"};
const std::vector<std::string> kCopulas = {"is", "was", "seems", "looks"};
const std::vector<std::string> kConjunctions = {"and", "but", "while"};
const std::array<std::vector<std::string>, kNumClasses> kOpinions = {{
    {"great", "delicious", "excellent", "friendly", "lovely", "superb"},
    {"awful", "terrible", "rude", "bland", "dreadful", "overpriced"},
    {"average", "ordinary", "standard", "typical", "okay"},
}};

template <typename V>
const std::string &Pick(const V &pool, Rng &rng) {
  return pool[rng.Below(pool.size())];
}

}  // namespace

std::vector<SentenceRecord> GenerateSynthetic(const SynthOptions &options) {
  if (options.n < 1) ThrowValidation("synthetic corpus needs n >= 1");
  if (options.noise < 0.0 || options.noise > 1.0) ThrowValidation("noise must lie in [0, 1]");
  Rng rng(options.seed);
  std::vector<SentenceRecord> out;
  out.reserve(options.n);

  for (std::size_t i = 0; i < options.n; ++i) {
    const std::size_t clauses = 1 + rng.Below(3);
    std::vector<std::string> aspect_pool = kAspects;
    rng.Shuffle(aspect_pool.begin(), aspect_pool.end());

    Sentence s;
    s.id = "syn-" + std::to_string(options.seed) + "-" + std::to_string(i);
    std::vector<int> heads;
    std::vector<int> opinion_at;
    std::vector<int> aspect_at;
    std::string bracketed;
    std::vector<std::string> clause_text;

    for (std::size_t c = 0; c < clauses; ++c) {
      int conj = -1;
      if (c > 0) {
        conj = static_cast<int>(s.tokens.size());
        s.tokens.push_back(Pick(kConjunctions, rng));
        heads.push_back(-2);
        clause_text.push_back(s.tokens.back());
      }
      const auto polarity = static_cast<Polarity>(rng.Below(kNumClasses));
      const int base = static_cast<int>(s.tokens.size());
      const std::string &aspect = aspect_pool[c];
      const std::string &copula = Pick(kCopulas, rng);
      const std::string &opinion = Pick(kOpinions[static_cast<int>(polarity)], rng);
      s.tokens.insert(s.tokens.end(), {"the", aspect, copula, opinion});
      s.aspects.push_back({base + 1, base + 2, polarity});
      heads.insert(heads.end(), {base + 1, base + 3, base + 3, -2});
      if (conj >= 0) heads[conj] = base + 3;
      aspect_at.push_back(base + 1);
      opinion_at.push_back(base + 3);
      clause_text.push_back("(S (NP the " + aspect + ") (VP " + copula + " (ADJP " + opinion +
                            ")))");
    }
    for (std::size_t c = 0; c < clauses; ++c) {
      heads[opinion_at[c]] = c == 0 ? -1 : opinion_at[0];
    }
    if (clauses > 1 && options.noise > 0.0) {
      for (std::size_t c = 0; c < clauses; ++c) {
        if (rng.Uniform() >= options.noise) continue;
        std::size_t other = rng.Below(clauses - 1);
        if (other >= c) ++other;
        heads[aspect_at[c]] = opinion_at[other];
      }
    }

    if (clauses == 1) {
      bracketed = clause_text[0];
    } else {
      bracketed = "(S";
      for (const std::string &part : clause_text) bracketed += " " + part;
      bracketed += ")";
    }
    SentenceRecord record{s, ParseBracketed(bracketed, s.tokens), DependencyTree{heads}};
    record.dep.Validate();
    out.push_back(std::move(record));
  }
  return out;
}

}  // namespace bisyn
