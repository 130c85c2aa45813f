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

#include <set>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "syntax_graphs.hpp"
#include "tensor.hpp"
#include "tree.hpp"

namespace bisyn::testing {

// "The food is great but the service and the environment are dreadful",
// with "great" and "dreadful" joined by a conj edge.
SentenceRecord FoodServiceRecord();
// "disappointed with the taste of the food", aspects taste and food.
SentenceRecord TasteOfFoodRecord();
// Five tokens, two aspects in separate clauses: "food great but service awful".
SentenceRecord TinyTwoAspectRecord();

// Random bracketing over `n` tokens, with occasional unary chains.
std::string RandomBracketing(std::size_t n, Rng &rng);
ConstituencyTree RandomTree(std::size_t n, Rng &rng);
DependencyTree RandomDependencyTree(std::size_t n, Rng &rng);
std::vector<std::string> NumberedTokens(std::size_t n);

// Brute-force oracles.
std::set<int> AncestorSet(const ConstituencyTree &tree, int node);
int BruteForceLca(const ConstituencyTree &tree, int token_i, int token_j);
// Groups tokens by the highest node reached by climbing while the parent's
// height stays at or below `height`.
std::vector<TokenSpan> BruteForceLayer(const ConstituencyTree &tree, int height);
AdjacencyMatrix RandomAdjacency(std::size_t n, double density, Rng &rng);

// Fresh empty directory under the system temp path.
std::string TempDir(const std::string &tag);

BasicTensor<double> RandomMatrix(std::size_t rows, std::size_t cols, Rng &rng,
                                 double scale = 1.0);

}  // namespace bisyn::testing
