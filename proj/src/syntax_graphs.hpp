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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tree.hpp"

namespace bisyn {

// Square matrix of small non-negative integers over (collapsed) tokens or
// aspect-graph nodes. Entry (i, j) = 1 reads "i links to j"; undirected
// graphs are symmetric.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(std::size_t n) : n_(n), data_(n * n, 0) {}

  static AdjacencyMatrix Identity(std::size_t n);

  std::size_t size() const { return n_; }
  std::uint8_t &at(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::uint8_t at(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  const std::vector<std::uint8_t> &data() const { return data_; }

  bool IsSymmetric() const;
  AdjacencyMatrix Transposed() const;
  // Count of non-zero entries off the diagonal.
  std::size_t OffDiagonalCount() const;
  bool operator==(const AdjacencyMatrix &) const = default;

  // Rows of 0/1 digits separated by spaces.
  std::string ToString() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> data_;
};

// Token ranges of one layer of the constituency tree, sorted and covering
// every token exactly once.
struct LayerPartition {
  int height = 0;
  std::vector<TokenSpan> phrases;

  // Index of the phrase containing `token`.
  std::size_t PhraseOf(int token) const;
};

// Phrases of the layer-h cut: the maximal nodes whose height is at most h.
// h at or above the tree height yields the single root phrase.
LayerPartition BuildLayerPartition(const ConstituencyTree &tree, int height);

// CA(i, j) = 1 iff tokens i and j share a phrase (diagonal included).
AdjacencyMatrix BuildConstituentAdjacency(const LayerPartition &partition);

// DA(i, j) = 1 iff one token heads the other. The diagonal is set only when
// `self_loops`, which matters when the matrix is used on its own.
AdjacencyMatrix BuildDependencyAdjacency(const DependencyTree &dep, bool self_loops);

// The children of the first node, walking down from the root through
// single-child nodes, that has two or more children. A chain that ends at a
// leaf gives one phrase.
LayerPartition ClausePartition(const ConstituencyTree &tree);

enum class FusionMode { kDot, kAdd, kCondAdd, kConOnly, kDepOnly };

const char *FusionModeName(FusionMode mode);
std::optional<FusionMode> ParseFusionMode(std::string_view name);

// Combines CA and DA into one attention mask:
//   dot      CA and DA
//   add      CA or DA
//   cond_add CA or DA', where DA' drops dependency edges whose endpoints
//            fall in different clause phrases
//   con_only CA
//   dep_only DA
// The result is 0/1, symmetric, with a unit diagonal.
AdjacencyMatrix Fuse(const AdjacencyMatrix &ca, const AdjacencyMatrix &da,
                     const LayerPartition &clauses, FusionMode mode);

}  // namespace bisyn
