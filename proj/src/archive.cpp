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

#include "archive.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "error.hpp"

namespace bisyn {

using nlohmann::json;

namespace {

std::uint32_t ByteSwap(std::uint32_t v) {
  return ((v & 0xFF) << 24) | ((v & 0xFF00) << 8) | ((v >> 8) & 0xFF00) | (v >> 24);
}

}  // namespace

void WriteFloatsLE(std::ostream &out, std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char *>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(float)));
  } else {
    for (float f : values) {
      std::uint32_t bits = ByteSwap(std::bit_cast<std::uint32_t>(f));
      out.write(reinterpret_cast<const char *>(&bits), sizeof(bits));
    }
  }
}

std::vector<float> ReadFloatsLE(std::istream &in, std::size_t count) {
  std::vector<float> out(count);
  in.read(reinterpret_cast<char *>(out.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float)) {
    ThrowValidation("float blob is truncated");
  }
  if constexpr (std::endian::native != std::endian::little) {
    for (float &f : out) f = std::bit_cast<float>(ByteSwap(std::bit_cast<std::uint32_t>(f)));
  }
  return out;
}

std::string AspectKey(const std::string &sentence_id, std::size_t aspect_index) {
  return sentence_id + "#" + std::to_string(aspect_index);
}

std::string ContextKey(const std::string &sentence_id) { return sentence_id + "#ctx"; }

EmbeddingArchive EmbeddingArchive::Open(const std::string &dir) {
  namespace fs = std::filesystem;
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  const fs::path blob_path = fs::path(dir) / "blob.bin";
  std::ifstream manifest_in(manifest_path);
  if (!manifest_in) ThrowValidation("archive: cannot open " + manifest_path.string());
  json manifest;
  try {
    manifest_in >> manifest;
  } catch (const json::exception &e) {
    ThrowValidation("archive: malformed manifest: " + std::string(e.what()));
  }
  if (!manifest.is_array()) ThrowValidation("archive: manifest must be a JSON array");

  std::ifstream blob_in(blob_path, std::ios::binary | std::ios::ate);
  if (!blob_in) ThrowValidation("archive: cannot open " + blob_path.string());
  const auto bytes = static_cast<std::size_t>(blob_in.tellg());
  if (bytes % sizeof(float) != 0) ThrowValidation("archive: blob size is not a float multiple");
  blob_in.seekg(0);

  EmbeddingArchive archive;
  archive.blob_ = ReadFloatsLE(blob_in, bytes / sizeof(float));
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const json &e = manifest[i];
    const std::string where = "archive: manifest entry " + std::to_string(i);
    if (!e.is_object() || !e.contains("key") || !e["key"].is_string() ||
        !e.contains("n_tokens") || !e["n_tokens"].is_number_unsigned() ||
        !e.contains("dim") || !e["dim"].is_number_unsigned() || !e.contains("offset") ||
        !e["offset"].is_number_unsigned()) {
      ThrowValidation(where + " needs key, n_tokens, dim and offset");
    }
    const std::string key = e["key"].get<std::string>();
    const auto n_tokens = e["n_tokens"].get<std::size_t>();
    const auto dim = e["dim"].get<std::size_t>();
    const auto offset = e["offset"].get<std::size_t>();
    if (dim == 0 || n_tokens == 0) ThrowValidation(where + " has an empty shape");
    if (archive.dim_ != 0 && dim != archive.dim_) {
      ThrowValidation(where + ": dim " + std::to_string(dim) + " differs from " +
                      std::to_string(archive.dim_));
    }
    archive.dim_ = dim;
    if (offset % sizeof(float) != 0 ||
        offset + (n_tokens + 1) * dim * sizeof(float) > bytes) {
      ThrowValidation(where + " points outside the blob");
    }
    if (!archive.index_.emplace(key, Entry{n_tokens, offset / sizeof(float)}).second) {
      ThrowValidation(where + ": duplicate key '" + key + "'");
    }
  }
  return archive;
}

EmbeddingRecord EmbeddingArchive::Get(const std::string &key) const {
  auto it = index_.find(key);
  if (it == index_.end()) ThrowValidation("archive: missing key '" + key + "'");
  const Entry &e = it->second;
  const float *base = blob_.data() + e.offset;
  EmbeddingRecord rec;
  rec.key = key;
  rec.pooled = Tensor({1, dim_}, std::vector<float>(base, base + dim_));
  rec.rows = Tensor({e.n_tokens, dim_},
                    std::vector<float>(base + dim_, base + (e.n_tokens + 1) * dim_));
  return rec;
}

std::vector<std::string> EmbeddingArchive::keys() const {
  std::vector<std::string> out;
  for (const auto &[k, _] : index_) out.push_back(k);
  return out;
}

ArchiveWriter::ArchiveWriter(std::string dir) : dir_(std::move(dir)) {}

void ArchiveWriter::Add(const EmbeddingRecord &record) {
  if (record.pooled.rows() != 1 || record.pooled.cols() != record.rows.cols()) {
    ThrowRuntime("archive: record '" + record.key + "' has inconsistent shapes");
  }
  records_.push_back(record);
}

void ArchiveWriter::Finish() {
  namespace fs = std::filesystem;
  fs::create_directories(dir_);
  std::ofstream blob(fs::path(dir_) / "blob.bin", std::ios::binary | std::ios::trunc);
  if (!blob) ThrowRuntime("archive: cannot write blob in " + dir_);
  json manifest = json::array();
  std::set<std::string> seen;
  std::size_t offset = 0;
  for (const EmbeddingRecord &r : records_) {
    if (!seen.insert(r.key).second) ThrowRuntime("archive: duplicate key '" + r.key + "'");
    manifest.push_back(
        {{"key", r.key}, {"n_tokens", r.n_tokens()}, {"dim", r.dim()}, {"offset", offset}});
    WriteFloatsLE(blob, r.pooled.values());
    WriteFloatsLE(blob, r.rows.values());
    offset += (r.n_tokens() + 1) * r.dim() * sizeof(float);
  }
  if (!blob) ThrowRuntime("archive: blob write failed in " + dir_);
  std::ofstream out(fs::path(dir_) / "manifest.json", std::ios::trunc);
  out << manifest.dump(1) << "\n";
  if (!out) ThrowRuntime("archive: manifest write failed in " + dir_);
}

}  // namespace bisyn
