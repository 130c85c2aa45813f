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

#include "dataset.hpp"

#include <algorithm>
#include <fstream>
#include <functional>

#include <json.hpp>

#include "error.hpp"

namespace bisyn {

using nlohmann::json;

const char *PolarityName(Polarity p) {
  switch (p) {
    case Polarity::kPositive: return "positive";
    case Polarity::kNegative: return "negative";
    case Polarity::kNeutral: return "neutral";
  }
  return "neutral";
}

std::optional<Polarity> ParsePolarity(std::string_view name) {
  if (name == "positive") return Polarity::kPositive;
  if (name == "negative") return Polarity::kNegative;
  if (name == "neutral") return Polarity::kNeutral;
  return std::nullopt;
}

namespace {

[[noreturn]] void FieldError(const std::string &field, const std::string &what) {
  ThrowValidation("field '" + field + "': " + what);
}

const json &Require(const json &obj, const char *field) {
  auto it = obj.find(field);
  if (it == obj.end()) FieldError(field, "missing");
  return *it;
}

int RequireInt(const json &obj, const char *field, const std::string &path) {
  const json &v = Require(obj, field);
  if (!v.is_number_integer()) FieldError(path, "expected an integer");
  return v.get<int>();
}

}  // namespace

SentenceRecord ParseRecord(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error &e) {
    ThrowValidation(std::string("malformed record: ") + e.what());
  }
  if (!obj.is_object()) ThrowValidation("record is not an object");

  SentenceRecord rec;
  Sentence &s = rec.sentence;
  const json &id = Require(obj, "id");
  if (!id.is_string()) FieldError("id", "expected a string");
  s.id = id.get<std::string>();

  const json &tokens = Require(obj, "tokens");
  if (!tokens.is_array() || tokens.empty()) FieldError("tokens", "expected a non-empty array");
  for (const json &t : tokens) {
    if (!t.is_string() || t.get<std::string>().empty()) {
      FieldError("tokens", "expected non-empty strings");
    }
    s.tokens.push_back(t.get<std::string>());
  }
  const int n = static_cast<int>(s.tokens.size());

  const json &aspects = Require(obj, "aspects");
  if (!aspects.is_array() || aspects.empty()) {
    FieldError("aspects", "expected at least one aspect");
  }
  for (std::size_t k = 0; k < aspects.size(); ++k) {
    const json &a = aspects[k];
    const std::string where = "aspects[" + std::to_string(k) + "]";
    if (!a.is_object()) FieldError(where, "expected an object");
    AspectSpan span;
    span.from = RequireInt(a, "from", where + ".from");
    span.to = RequireInt(a, "to", where + ".to");
    const json &pol = Require(a, "polarity");
    std::optional<Polarity> p =
        pol.is_string() ? ParsePolarity(pol.get<std::string>()) : std::nullopt;
    if (!p) FieldError(where + ".polarity", "expected positive, negative or neutral");
    span.polarity = *p;
    if (span.from < 0 || span.to > n || span.from >= span.to) {
      FieldError(where, "span [" + std::to_string(span.from) + ", " +
                            std::to_string(span.to) + ") is not inside [0, " +
                            std::to_string(n) + ")");
    }
    s.aspects.push_back(span);
  }
  std::stable_sort(s.aspects.begin(), s.aspects.end(),
                   [](const AspectSpan &a, const AspectSpan &b) { return a.from < b.from; });
  for (std::size_t k = 1; k < s.aspects.size(); ++k) {
    if (s.aspects[k].from < s.aspects[k - 1].to) {
      FieldError("aspects", "overlapping aspect spans");
    }
  }

  const json &con = Require(obj, "con");
  if (!con.is_string()) FieldError("con", "expected a bracketed tree string");
  try {
    rec.con = ParseBracketed(con.get<std::string>(), s.tokens);
  } catch (const Error &e) {
    FieldError("con", e.what());
  }

  const json &dep = Require(obj, "dep_heads");
  if (!dep.is_array()) FieldError("dep_heads", "expected an array of integers");
  for (const json &h : dep) {
    if (!h.is_number_integer()) FieldError("dep_heads", "expected integers");
    rec.dep.heads.push_back(h.get<int>());
  }
  if (static_cast<int>(rec.dep.heads.size()) != n) {
    FieldError("dep_heads", "length " + std::to_string(rec.dep.heads.size()) +
                                " does not match " + std::to_string(n) + " tokens");
  }
  try {
    rec.dep.Validate();
  } catch (const Error &e) {
    FieldError("dep_heads", e.what());
  }
  return rec;
}

std::string RecordToJson(const SentenceRecord &record) {
  const Sentence &s = record.sentence;
  json aspects = json::array();
  for (const AspectSpan &a : s.aspects) {
    aspects.push_back({{"from", a.from}, {"to", a.to}, {"polarity", PolarityName(a.polarity)}});
  }
  json obj = {{"id", s.id},
              {"tokens", s.tokens},
              {"aspects", aspects},
              {"con", ToBracketed(record.con)},
              {"dep_heads", record.dep.heads}};
  return obj.dump();
}

std::vector<SentenceRecord> LoadRecords(const std::string &path) {
  std::ifstream in(path);
  if (!in) ThrowValidation("cannot open dataset '" + path + "'");
  std::vector<SentenceRecord> out;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ParseRecord(line));
    } catch (const Error &e) {
      ThrowValidation(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void SaveRecords(const std::string &path, const std::vector<SentenceRecord> &records) {
  std::ofstream out(path);
  if (!out) ThrowRuntime("cannot write dataset '" + path + "'");
  for (const SentenceRecord &r : records) out << RecordToJson(r) << "\n";
  if (!out) ThrowRuntime("write failed for '" + path + "'");
}

namespace {

int LowestCoveringNode(const ConstituencyTree &tree, TokenSpan span) {
  int id = tree.leaf(span.lo);
  while (!tree.node(id).span.Covers(span)) id = tree.parent(id);
  return id;
}

}  // namespace

CollapsedRecord CollapseAspects(const SentenceRecord &record) {
  const Sentence &s = record.sentence;
  const int n = static_cast<int>(s.tokens.size());

  CollapsedRecord out;
  out.token_map.assign(n, -1);
  // span_of[t] = index of the multi-token aspect containing t, or -1.
  std::vector<int> span_of(n, -1);
  bool any_multi = false;
  for (std::size_t k = 0; k < s.aspects.size(); ++k) {
    const AspectSpan &a = s.aspects[k];
    if (a.to - a.from > 1) {
      any_multi = true;
      for (int t = a.from; t < a.to; ++t) span_of[t] = static_cast<int>(k);
    }
  }

  Sentence &ns = out.record.sentence;
  ns.id = s.id;
  for (int t = 0; t < n;) {
    const int k = span_of[t];
    if (k < 0) {
      out.token_map[t] = static_cast<int>(ns.tokens.size());
      ns.tokens.push_back(s.tokens[t]);
      ++t;
      continue;
    }
    const AspectSpan &a = s.aspects[k];
    std::string merged;
    for (int u = a.from; u < a.to; ++u) {
      if (u > a.from) merged += ' ';
      merged += s.tokens[u];
      out.token_map[u] = static_cast<int>(ns.tokens.size());
    }
    ns.tokens.push_back(std::move(merged));
    t = a.to;
  }
  for (const AspectSpan &a : s.aspects) {
    const int m = out.token_map[a.from];
    ns.aspects.push_back({m, m + 1, a.polarity});
  }

  if (!any_multi) {
    out.record.con = record.con;
    out.record.dep = record.dep;
    return out;
  }

  // Constituency: drop span leaves, prune phrases left empty, and insert the
  // merged leaf under the lowest covering node before its first child that
  // starts at or after the span.
  const ConstituencyTree &tree = record.con;
  std::vector<std::vector<int>> inserts(tree.num_nodes());
  for (std::size_t k = 0; k < s.aspects.size(); ++k) {
    const AspectSpan &a = s.aspects[k];
    if (a.to - a.from > 1) {
      inserts[LowestCoveringNode(tree, {a.from, a.to})].push_back(static_cast<int>(k));
    }
  }
  std::vector<ConNode> nodes;
  std::function<int(int)> rebuild = [&](int id) -> int {
    const ConNode &src = tree.node(id);
    if (src.is_leaf()) {
      if (span_of[src.token] >= 0) return -1;
      ConNode leaf;
      leaf.label = src.label;
      leaf.token = 0;
      nodes.push_back(std::move(leaf));
      return static_cast<int>(nodes.size() - 1);
    }
    ConNode copy;
    copy.label = src.label;
    std::size_t next_insert = 0;
    const std::vector<int> &pending = inserts[id];
    auto add_merged = [&](int k) {
      ConNode leaf;
      leaf.label = ns.tokens[out.token_map[s.aspects[k].from]];
      leaf.token = 0;
      nodes.push_back(std::move(leaf));
      copy.children.push_back(static_cast<int>(nodes.size() - 1));
    };
    for (int c : src.children) {
      while (next_insert < pending.size() &&
             tree.node(c).span.lo >= s.aspects[pending[next_insert]].from) {
        add_merged(pending[next_insert++]);
      }
      const int nc = rebuild(c);
      if (nc >= 0) copy.children.push_back(nc);
    }
    while (next_insert < pending.size()) add_merged(pending[next_insert++]);
    if (copy.children.empty()) return -1;
    nodes.push_back(std::move(copy));
    return static_cast<int>(nodes.size() - 1);
  };
  const int root = rebuild(tree.root());
  out.record.con = ConstituencyTree::FromNodes(std::move(nodes), root);

  // Dependency remap.
  const std::vector<int> &heads = record.dep.heads;
  std::vector<int> new_heads(ns.tokens.size(), -2);
  for (int t = 0; t < n; ++t) {
    if (span_of[t] >= 0) continue;
    new_heads[out.token_map[t]] = heads[t] < 0 ? -1 : out.token_map[heads[t]];
  }
  for (std::size_t k = 0; k < s.aspects.size(); ++k) {
    const AspectSpan &a = s.aspects[k];
    if (a.to - a.from <= 1) continue;
    auto inside = [&](int t) { return t >= a.from && t < a.to; };
    std::vector<int> head_words;
    for (int t = a.from; t < a.to; ++t) {
      if (!inside(heads[t])) head_words.push_back(t);
    }
    if (head_words.size() > 1) {
      Warn("sentence '" + s.id + "': aspect span [" + std::to_string(a.from) + ", " +
           std::to_string(a.to) + ") has " + std::to_string(head_words.size()) +
           " head words; using the leftmost valid one");
    }
    int chosen = head_words.front();
    for (int t : head_words) {
      bool reenters = false;
      for (int cur = heads[t]; cur >= 0; cur = heads[cur]) {
        if (inside(cur)) {
          reenters = true;
          break;
        }
      }
      if (!reenters) {
        chosen = t;
        break;
      }
    }
    const int m = out.token_map[a.from];
    new_heads[m] = heads[chosen] < 0 ? -1 : out.token_map[heads[chosen]];
  }
  out.record.dep.heads = std::move(new_heads);
  out.record.dep.Validate();
  return out;
}

std::vector<CollapsedRecord> LoadDataset(const std::string &path) {
  std::vector<CollapsedRecord> out;
  for (const SentenceRecord &r : LoadRecords(path)) out.push_back(CollapseAspects(r));
  return out;
}

}  // namespace bisyn
