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
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace bisyn {

// 32-bit little-endian float blobs, shared by embedding archives and model
// checkpoints.
void WriteFloatsLE(std::ostream &out, std::span<const float> values);
std::vector<float> ReadFloatsLE(std::istream &in, std::size_t count);

struct EmbeddingRecord {
  std::string key;
  Tensor pooled;  // 1 x dim
  Tensor rows;    // n_tokens x dim

  std::size_t dim() const { return pooled.cols(); }
  std::size_t n_tokens() const { return rows.rows(); }
};

// "<sentence_id>#<aspect_index>" with aspects in sentence order.
std::string AspectKey(const std::string &sentence_id, std::size_t aspect_index);
// Aspect-free encoding of the sentence.
std::string ContextKey(const std::string &sentence_id);

// An archive is a directory holding manifest.json, a JSON array of
// {key, n_tokens, dim, offset}, and blob.bin. Each record occupies
// (1 + n_tokens) * dim floats at `offset` bytes, row 0 being the pooled
// vector. The blob is read into memory on open; lookups are read-only and
// safe from several threads.
class EmbeddingArchive {
 public:
  static EmbeddingArchive Open(const std::string &dir);

  bool Contains(const std::string &key) const { return index_.count(key) > 0; }
  EmbeddingRecord Get(const std::string &key) const;
  // Common dimension of all records, 0 for an empty archive.
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }
  std::vector<std::string> keys() const;

 private:
  struct Entry {
    std::size_t n_tokens;
    std::size_t offset;  // in floats
  };
  std::map<std::string, Entry> index_;
  std::vector<float> blob_;
  std::size_t dim_ = 0;
};

class ArchiveWriter {
 public:
  explicit ArchiveWriter(std::string dir);
  void Add(const EmbeddingRecord &record);
  // Writes manifest.json and blob.bin.
  void Finish();

 private:
  std::string dir_;
  std::vector<EmbeddingRecord> records_;
};

}  // namespace bisyn
