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

#include "syntax_graphs.hpp"

#include <algorithm>
#include <sstream>

#include "error.hpp"

namespace bisyn {

AdjacencyMatrix AdjacencyMatrix::Identity(std::size_t n) {
  AdjacencyMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

bool AdjacencyMatrix::IsSymmetric() const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (at(i, j) != at(j, i)) return false;
    }
  }
  return true;
}

AdjacencyMatrix AdjacencyMatrix::Transposed() const {
  AdjacencyMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) t.at(j, i) = at(i, j);
  }
  return t;
}

std::size_t AdjacencyMatrix::OffDiagonalCount() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) count += (i != j && at(i, j) != 0);
  }
  return count;
}

std::string AdjacencyMatrix::ToString() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (j) out << ' ';
      out << static_cast<int>(at(i, j));
    }
    out << '\n';
  }
  return out.str();
}

std::size_t LayerPartition::PhraseOf(int token) const {
  auto it = std::upper_bound(phrases.begin(), phrases.end(), token,
                             [](int t, const TokenSpan &p) { return t < p.lo; });
  if (it == phrases.begin()) ThrowRuntime("token outside partition");
  const std::size_t k = static_cast<std::size_t>(it - phrases.begin()) - 1;
  if (!phrases[k].Contains(token)) ThrowRuntime("token outside partition");
  return k;
}

LayerPartition BuildLayerPartition(const ConstituencyTree &tree, int height) {
  if (height < 1) ThrowRuntime("layer height must be at least 1");
  LayerPartition out;
  out.height = height;
  // Walk down from the root; a node with height <= h is a phrase.
  std::vector<int> stack{tree.root()};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const ConNode &n = tree.node(id);
    if (tree.height(id) <= height) {
      out.phrases.push_back(n.span);
      continue;
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

AdjacencyMatrix BuildConstituentAdjacency(const LayerPartition &partition) {
  const int n = partition.phrases.empty() ? 0 : partition.phrases.back().hi;
  AdjacencyMatrix m(n);
  for (const TokenSpan &p : partition.phrases) {
    for (int i = p.lo; i < p.hi; ++i) {
      for (int j = p.lo; j < p.hi; ++j) m.at(i, j) = 1;
    }
  }
  return m;
}

AdjacencyMatrix BuildDependencyAdjacency(const DependencyTree &dep, bool self_loops) {
  const std::size_t n = dep.size();
  AdjacencyMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int h = dep.heads[i];
    if (h >= 0) {
      m.at(i, h) = 1;
      m.at(h, i) = 1;
    }
    if (self_loops) m.at(i, i) = 1;
  }
  return m;
}

LayerPartition ClausePartition(const ConstituencyTree &tree) {
  int id = tree.root();
  while (tree.node(id).children.size() == 1) id = tree.node(id).children.front();
  LayerPartition out;
  const ConNode &n = tree.node(id);
  if (n.is_leaf()) {
    out.height = tree.height(tree.root());
    out.phrases.push_back(n.span);
    return out;
  }
  out.height = tree.height(id) - 1;
  for (int c : n.children) out.phrases.push_back(tree.node(c).span);
  return out;
}

const char *FusionModeName(FusionMode mode) {
  switch (mode) {
    case FusionMode::kDot: return "dot";
    case FusionMode::kAdd: return "add";
    case FusionMode::kCondAdd: return "cond_add";
    case FusionMode::kConOnly: return "con_only";
    case FusionMode::kDepOnly: return "dep_only";
  }
  return "cond_add";
}

std::optional<FusionMode> ParseFusionMode(std::string_view name) {
  for (FusionMode m : {FusionMode::kDot, FusionMode::kAdd, FusionMode::kCondAdd,
                       FusionMode::kConOnly, FusionMode::kDepOnly}) {
    if (name == FusionModeName(m)) return m;
  }
  return std::nullopt;
}

AdjacencyMatrix Fuse(const AdjacencyMatrix &ca, const AdjacencyMatrix &da,
                     const LayerPartition &clauses, FusionMode mode) {
  const std::size_t n = ca.size();
  if (da.size() != n) {
    ThrowRuntime("fuse: CA is " + std::to_string(n) + " x " + std::to_string(n) +
                 " but DA is " + std::to_string(da.size()) + " x " +
                 std::to_string(da.size()));
  }
  std::vector<std::size_t> clause_of;
  if (mode == FusionMode::kCondAdd) {
    clause_of.resize(n);
    for (std::size_t i = 0; i < n; ++i) clause_of[i] = clauses.PhraseOf(static_cast<int>(i));
  }
  AdjacencyMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool c = ca.at(i, j) != 0;
      const bool d = da.at(i, j) != 0;
      bool v = false;
      switch (mode) {
        case FusionMode::kDot: v = c && d; break;
        case FusionMode::kAdd: v = c || d; break;
        case FusionMode::kCondAdd: v = c || (d && clause_of[i] == clause_of[j]); break;
        case FusionMode::kConOnly: v = c; break;
        case FusionMode::kDepOnly: v = d; break;
      }
      out.at(i, j) = (v || i == j) ? 1 : 0;
    }
  }
  return out;
}

}  // namespace bisyn
