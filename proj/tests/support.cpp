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

#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

#include <unistd.h>

namespace bisyn::testing {

SentenceRecord FoodServiceRecord() {
  Sentence s;
  s.id = "food-service";
  s.tokens = {"The", "food", "is",  "great",       "but", "the",
              "service", "and", "the", "environment", "are", "dreadful"};
  s.aspects = {{1, 2, Polarity::kPositive},
               {6, 7, Polarity::kNegative},
               {9, 10, Polarity::kNegative}};
  const char *tree =
      "(S (S (NP The food) (VP is (ADJP great))) but (S (NP (NP the service) and (NP the "
      "environment)) (VP are (ADJP dreadful))))";
  return {s, ParseBracketed(tree, s.tokens), DependencyTree{{1, 3, 3, -1, 11, 6, 11, 9, 9, 6, 11, 3}}};
}

SentenceRecord TasteOfFoodRecord() {
  Sentence s;
  s.id = "taste-of-food";
  s.tokens = {"disappointed", "with", "the", "taste", "of", "the", "food"};
  s.aspects = {{3, 4, Polarity::kNegative}, {6, 7, Polarity::kNegative}};
  const char *tree = "(VP disappointed (PP with (NP (NP the taste) (PP of (NP the food)))))";
  return {s, ParseBracketed(tree, s.tokens), DependencyTree{{-1, 3, 3, 0, 6, 6, 3}}};
}

SentenceRecord TinyTwoAspectRecord() {
  Sentence s;
  s.id = "tiny";
  s.tokens = {"food", "great", "but", "service", "awful"};
  s.aspects = {{0, 1, Polarity::kPositive}, {3, 4, Polarity::kNegative}};
  const char *tree = "(S (S (NP food) (ADJP great)) but (S (NP service) (ADJP awful)))";
  return {s, ParseBracketed(tree, s.tokens), DependencyTree{{1, -1, 4, 4, 1}}};
}

namespace {

void AppendBracketing(int lo, int hi, Rng &rng, std::string &out, int &label) {
  const int n = hi - lo;
  const bool unary = rng.Uniform() < 0.15;
  out += "(X" + std::to_string(label++);
  if (unary) out += " (U" + std::to_string(label++);
  if (n == 1) {
    out += " w" + std::to_string(lo);
  } else {
    const int max_children = std::min(n, 4);
    const int k = 2 + static_cast<int>(rng.Below(static_cast<std::size_t>(max_children - 1)));
    std::vector<int> cuts;
    for (int t = lo + 1; t < hi; ++t) cuts.push_back(t);
    rng.Shuffle(cuts.begin(), cuts.end());
    cuts.resize(static_cast<std::size_t>(k - 1));
    std::sort(cuts.begin(), cuts.end());
    cuts.insert(cuts.begin(), lo);
    cuts.push_back(hi);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      out += " ";
      if (cuts[c + 1] - cuts[c] == 1 && rng.Uniform() < 0.5) {
        out += "w" + std::to_string(cuts[c]);
      } else {
        AppendBracketing(cuts[c], cuts[c + 1], rng, out, label);
      }
    }
  }
  if (unary) out += ")";
  out += ")";
}

}  // namespace

std::string RandomBracketing(std::size_t n, Rng &rng) {
  std::string out;
  int label = 0;
  AppendBracketing(0, static_cast<int>(n), rng, out, label);
  return out;
}

std::vector<std::string> NumberedTokens(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(i));
  return out;
}

ConstituencyTree RandomTree(std::size_t n, Rng &rng) {
  return ParseBracketed(RandomBracketing(n, rng), NumberedTokens(n));
}

DependencyTree RandomDependencyTree(std::size_t n, Rng &rng) {
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  rng.Shuffle(order.begin(), order.end());
  DependencyTree dep{std::vector<int>(n, -1)};
  for (std::size_t k = 1; k < n; ++k) {
    dep.heads[order[k]] = order[rng.Below(k)];
  }
  return dep;
}

std::set<int> AncestorSet(const ConstituencyTree &tree, int node) {
  std::set<int> out;
  for (int id = node; id >= 0; id = tree.parent(id)) out.insert(id);
  return out;
}

int BruteForceLca(const ConstituencyTree &tree, int token_i, int token_j) {
  const std::set<int> a = AncestorSet(tree, tree.leaf(token_i));
  const std::set<int> b = AncestorSet(tree, tree.leaf(token_j));
  int best = -1;
  for (int id : a) {
    if (!b.count(id)) continue;
    if (best < 0 || tree.node(id).span.size() < tree.node(best).span.size() ||
        (tree.node(id).span.size() == tree.node(best).span.size() &&
         AncestorSet(tree, id).size() > AncestorSet(tree, best).size())) {
      best = id;
    }
  }
  return best;
}

std::vector<TokenSpan> BruteForceLayer(const ConstituencyTree &tree, int height) {
  std::map<int, TokenSpan> groups;
  for (int t = 0; t < static_cast<int>(tree.num_tokens()); ++t) {
    int id = tree.leaf(t);
    while (tree.parent(id) >= 0 && tree.height(tree.parent(id)) <= height) id = tree.parent(id);
    groups[tree.node(id).span.lo] = tree.node(id).span;
  }
  std::vector<TokenSpan> out;
  for (const auto &[_, span] : groups) out.push_back(span);
  return out;
}

AdjacencyMatrix RandomAdjacency(std::size_t n, double density, Rng &rng) {
  AdjacencyMatrix a = AdjacencyMatrix::Identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && rng.Uniform() < density) a.at(i, j) = 1;
    }
  }
  return a;
}

BasicTensor<double> RandomMatrix(std::size_t rows, std::size_t cols, Rng &rng, double scale) {
  BasicTensor<double> out = BasicTensor<double>::Matrix(rows, cols);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rng.Uniform(-scale, scale);
  return out;
}

std::string TempDir(const std::string &tag) {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("bisyn-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace bisyn::testing
