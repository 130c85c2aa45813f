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
#include <string_view>
#include <vector>

namespace bisyn {

// Half-open token range [lo, hi).
struct TokenSpan {
  int lo = 0;
  int hi = 0;

  int size() const { return hi - lo; }
  bool Contains(int token) const { return lo <= token && token < hi; }
  bool Covers(const TokenSpan &other) const { return lo <= other.lo && other.hi <= hi; }
  bool operator==(const TokenSpan &) const = default;
};

struct ConNode {
  std::string label;      // phrase label, or the word for leaves
  std::vector<int> children;
  int parent = -1;
  int token = -1;         // token index for leaves, -1 for phrases
  TokenSpan span;

  bool is_leaf() const { return token >= 0; }
};

// Constituency tree whose leaves are the sentence tokens, in order. Leaves are
// nodes of their own (no children); every phrase node has at least one child.
//
// Heights are measured from the leaves: a leaf has height 0 and a phrase has
// 1 + the maximum height of its children. The layer-h cut of the tree is the
// set of maximal nodes with height <= h.
class ConstituencyTree {
 public:
  ConstituencyTree() = default;

  // Takes nodes with labels, children and leaf markers (token >= 0 on leaves,
  // value otherwise ignored). Leaves are renumbered left to right, parents,
  // spans and heights are derived. Throws a validation error on malformed
  // structure.
  static ConstituencyTree FromNodes(std::vector<ConNode> nodes, int root);

  int root() const { return root_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_tokens() const { return leaf_of_token_.size(); }
  const ConNode &node(int id) const { return nodes_[id]; }
  const std::vector<ConNode> &nodes() const { return nodes_; }
  int leaf(int token) const { return leaf_of_token_[token]; }
  int height(int id) const { return heights_[id]; }
  int parent(int id) const { return nodes_[id].parent; }

  // Phrase nodes above a token's leaf, nearest first; the last is the root.
  std::vector<int> Ancestors(int token) const;
  std::vector<std::string> Leaves() const;

 private:
  std::vector<ConNode> nodes_;
  std::vector<int> leaf_of_token_;
  std::vector<int> heights_;
  int root_ = -1;
};

// Parses a Penn-style bracketing "(LABEL child ...)" where children are
// nested brackets or bare words. Errors carry the character offset.
ConstituencyTree ParseBracketed(std::string_view text);
// Same, additionally requiring the leaf sequence to equal `tokens`.
ConstituencyTree ParseBracketed(std::string_view text,
                                const std::vector<std::string> &tokens);
// Canonical single-space rendering; whitespace inside words becomes '_'.
std::string ToBracketed(const ConstituencyTree &tree);

// heads[i] is the head token of i, or -1 for the root token.
struct DependencyTree {
  std::vector<int> heads;

  std::size_t size() const { return heads.size(); }
  int root() const;
  // Throws a validation error unless there is exactly one root and every
  // token reaches it without a cycle.
  void Validate() const;
};

}  // namespace bisyn
