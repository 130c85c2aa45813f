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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tree.hpp"

namespace bisyn {

// Class indices are fixed by the file schema.
enum class Polarity : int { kPositive = 0, kNegative = 1, kNeutral = 2 };
inline constexpr int kNumClasses = 3;

const char *PolarityName(Polarity p);
std::optional<Polarity> ParsePolarity(std::string_view name);

struct AspectSpan {
  int from = 0;  // inclusive
  int to = 0;    // exclusive
  Polarity polarity = Polarity::kNeutral;
};

struct Sentence {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<AspectSpan> aspects;  // sorted by `from`, non-overlapping
};

struct SentenceRecord {
  Sentence sentence;
  ConstituencyTree con;
  DependencyTree dep;
};

// A record after multi-word aspects were merged into single tokens.
// token_map[i] is the collapsed index of original token i.
struct CollapsedRecord {
  SentenceRecord record;
  std::vector<int> token_map;
};

// Parses one line of the dataset format. Aspects listed out of order are
// sorted; overlapping or out-of-range spans, tree/token mismatches and bad
// head arrays are validation errors naming the field.
SentenceRecord ParseRecord(std::string_view line);
std::string RecordToJson(const SentenceRecord &record);

// Errors are prefixed with "<path>:<line>:". Blank lines are skipped.
std::vector<SentenceRecord> LoadRecords(const std::string &path);
void SaveRecords(const std::string &path, const std::vector<SentenceRecord> &records);

// Merges every multi-token aspect into one token. The merged constituency
// leaf hangs under the lowest node covering the span; its dependency head is
// the head of the span's head word, the token whose head lies outside the
// span. Several such words trigger a warning and the leftmost one whose path
// to the root does not re-enter the span is used.
CollapsedRecord CollapseAspects(const SentenceRecord &record);

// Loads and collapses in one step; all downstream indices refer to the
// collapsed tokens.
std::vector<CollapsedRecord> LoadDataset(const std::string &path);

}  // namespace bisyn
