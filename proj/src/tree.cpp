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

#include "tree.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "error.hpp"

namespace bisyn {

ConstituencyTree ConstituencyTree::FromNodes(std::vector<ConNode> nodes, int root) {
  if (nodes.empty() || root < 0 || root >= static_cast<int>(nodes.size())) {
    ThrowValidation("constituency tree: missing root");
  }
  ConstituencyTree tree;
  tree.nodes_ = std::move(nodes);
  tree.root_ = root;
  tree.heights_.assign(tree.nodes_.size(), 0);
  for (ConNode &n : tree.nodes_) n.parent = -1;

  std::vector<char> seen(tree.nodes_.size(), 0);
  int next_token = 0;
  // Iterative post-order so deep trees do not exhaust the stack.
  struct Frame {
    int id;
    std::size_t child;
  };
  std::vector<Frame> stack{{root, 0}};
  seen[root] = 1;
  while (!stack.empty()) {
    Frame &f = stack.back();
    ConNode &n = tree.nodes_[f.id];
    if (n.token >= 0 && !n.children.empty()) {
      ThrowValidation("constituency tree: leaf '" + n.label + "' has children");
    }
    if (n.token < 0 && n.children.empty()) {
      ThrowValidation("constituency tree: empty node '" + n.label + "'");
    }
    if (n.token >= 0) {
      n.token = next_token++;
      n.span = {n.token, n.token + 1};
      tree.leaf_of_token_.push_back(f.id);
      stack.pop_back();
      continue;
    }
    if (f.child < n.children.size()) {
      const int c = n.children[f.child++];
      if (c < 0 || c >= static_cast<int>(tree.nodes_.size()) || seen[c]) {
        ThrowValidation("constituency tree: node reachable twice or out of range");
      }
      seen[c] = 1;
      tree.nodes_[c].parent = f.id;
      stack.push_back({c, 0});
      continue;
    }
    n.span = {tree.nodes_[n.children.front()].span.lo,
              tree.nodes_[n.children.back()].span.hi};
    int h = 0;
    for (int c : n.children) h = std::max(h, tree.heights_[c]);
    tree.heights_[f.id] = h + 1;
    stack.pop_back();
  }
  if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(tree.nodes_.size())) {
    ThrowValidation("constituency tree: unreachable nodes");
  }
  return tree;
}

std::vector<int> ConstituencyTree::Ancestors(int token) const {
  std::vector<int> out;
  for (int id = nodes_[leaf(token)].parent; id >= 0; id = nodes_[id].parent) {
    out.push_back(id);
  }
  return out;
}

std::vector<std::string> ConstituencyTree::Leaves() const {
  std::vector<std::string> out;
  out.reserve(leaf_of_token_.size());
  for (int id : leaf_of_token_) out.push_back(nodes_[id].label);
  return out;
}

namespace {

class BracketParser {
 public:
  explicit BracketParser(std::string_view text) : text_(text) {}

  ConstituencyTree Parse(std::vector<std::size_t> *leaf_offsets) {
    SkipSpace();
    if (pos_ >= text_.size() || text_[pos_] != '(') Fail("expected '('");
    const int root = ParseNode();
    SkipSpace();
    if (pos_ != text_.size()) Fail("unexpected text after the closing bracket");
    if (leaf_offsets) *leaf_offsets = leaf_offsets_;
    return ConstituencyTree::FromNodes(std::move(nodes_), root);
  }

 private:
  [[noreturn]] void Fail(const std::string &what) const {
    ThrowValidation("bracketed tree: " + what + " at offset " + std::to_string(pos_));
  }

  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  std::string Atom() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')') {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  // Called with pos_ on '('.
  int ParseNode() {
    const std::size_t open = pos_;
    ++pos_;
    SkipSpace();
    ConNode node;
    if (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')') {
      node.label = Atom();
    }
    while (true) {
      SkipSpace();
      if (pos_ >= text_.size()) {
        pos_ = open;
        Fail("unbalanced brackets, '(' never closed");
      }
      const char c = text_[pos_];
      if (c == ')') {
        if (node.children.empty()) Fail("empty node");
        ++pos_;
        break;
      }
      if (c == '(') {
        const int child = ParseNode();
        node.children.push_back(child);
      } else {
        leaf_offsets_.push_back(pos_);
        ConNode leaf;
        leaf.label = Atom();
        leaf.token = 0;
        nodes_.push_back(std::move(leaf));
        node.children.push_back(static_cast<int>(nodes_.size() - 1));
      }
    }
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size() - 1);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<ConNode> nodes_;
  std::vector<std::size_t> leaf_offsets_;
};

}  // namespace

ConstituencyTree ParseBracketed(std::string_view text) {
  for (std::size_t i = 0, depth = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') {
      if (depth == 0) {
        ThrowValidation("bracketed tree: unbalanced brackets, unmatched ')' at offset " +
                        std::to_string(i));
      }
      --depth;
    }
  }
  return BracketParser(text).Parse(nullptr);
}

ConstituencyTree ParseBracketed(std::string_view text,
                                const std::vector<std::string> &tokens) {
  ParseBracketed(text);  // structural errors first, with their offsets
  std::vector<std::size_t> offsets;
  ConstituencyTree tree = BracketParser(text).Parse(&offsets);
  const std::vector<std::string> leaves = tree.Leaves();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (i >= tokens.size()) {
      ThrowValidation("bracketed tree: extra leaf '" + leaves[i] + "' at offset " +
                      std::to_string(offsets[i]));
    }
    if (leaves[i] != tokens[i]) {
      ThrowValidation("bracketed tree: leaf '" + leaves[i] + "' does not match token '" +
                      tokens[i] + "' at offset " + std::to_string(offsets[i]));
    }
  }
  if (leaves.size() < tokens.size()) {
    ThrowValidation("bracketed tree: " + std::to_string(leaves.size()) +
                    " leaves for " + std::to_string(tokens.size()) +
                    " tokens at offset " + std::to_string(text.size()));
  }
  return tree;
}

std::string ToBracketed(const ConstituencyTree &tree) {
  std::string out;
  std::function<void(int)> emit = [&](int id) {
    const ConNode &n = tree.node(id);
    if (n.is_leaf()) {
      for (char c : n.label) {
        out.push_back(std::isspace(static_cast<unsigned char>(c)) ? '_' : c);
      }
      return;
    }
    out.push_back('(');
    out += n.label;
    for (int c : n.children) {
      if (!out.empty() && out.back() != '(') out.push_back(' ');
      emit(c);
    }
    out.push_back(')');
  };
  emit(tree.root());
  return out;
}

int DependencyTree::root() const {
  for (std::size_t i = 0; i < heads.size(); ++i) {
    if (heads[i] == -1) return static_cast<int>(i);
  }
  return -1;
}

void DependencyTree::Validate() const {
  const int n = static_cast<int>(heads.size());
  if (n == 0) ThrowValidation("dependency tree: no tokens");
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const int h = heads[i];
    if (h == -1) {
      ++roots;
    } else if (h < 0 || h >= n) {
      ThrowValidation("dependency tree: head of token " + std::to_string(i) +
                      " out of range");
    } else if (h == i) {
      ThrowValidation("dependency tree: token " + std::to_string(i) + " heads itself");
    }
  }
  if (roots != 1) {
    ThrowValidation("dependency tree: expected exactly one root, found " +
                    std::to_string(roots));
  }
  // 0 = unvisited, 1 = on current path, 2 = reaches the root.
  std::vector<char> state(n, 0);
  for (int start = 0; start < n; ++start) {
    std::vector<int> path;
    int cur = start;
    while (cur != -1 && state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = heads[cur];
    }
    if (cur != -1 && state[cur] == 1) {
      ThrowValidation("dependency tree: cycle through token " + std::to_string(cur));
    }
    for (int p : path) state[p] = 2;
  }
}

}  // namespace bisyn
