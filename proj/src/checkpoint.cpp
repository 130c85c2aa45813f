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

#include "checkpoint.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "error.hpp"

namespace bisyn {
namespace {

constexpr const char *kFormat = "bisyn-checkpoint";
constexpr int kVersion = 1;

}  // namespace

void SaveModel(const Model &model, const std::string &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) ThrowRuntime("cannot create '" + dir + "': " + ec.message());

  nlohmann::json params = nlohmann::json::array();
  std::ofstream bin(dir + "/params.bin", std::ios::binary | std::ios::trunc);
  if (!bin) ThrowRuntime("cannot write '" + dir + "/params.bin'");
  std::size_t offset = 0;
  for (const auto &[name, p] : model.params.entries()) {
    params.push_back({{"name", name}, {"shape", p.value.shape()}, {"offset", offset}});
    WriteFloatsLE(bin, p.value.values());
    offset += p.value.size();
  }
  bin.close();
  if (!bin) ThrowRuntime("failed writing '" + dir + "/params.bin'");

  nlohmann::json j = {{"format", kFormat},
                      {"version", kVersion},
                      {"config", ConfigToMap(model.config)},
                      {"vocab", model.vocab.words()},
                      {"params", params}};
  std::ofstream out(dir + "/model.json", std::ios::trunc);
  if (!out) ThrowRuntime("cannot write '" + dir + "/model.json'");
  out << j.dump(1) << "\n";
  if (!out) ThrowRuntime("failed writing '" + dir + "/model.json'");
}

Model LoadModel(const std::string &dir, const std::string &archive_override) {
  std::ifstream in(dir + "/model.json");
  if (!in) ThrowValidation("no checkpoint at '" + dir + "' (model.json missing)");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    ThrowValidation(dir + "/model.json: " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat || j.at("version").get<int>() != kVersion) {
      ThrowValidation(dir + "/model.json: unsupported checkpoint format");
    }
    ModelConfig config;
    for (const auto &[key, value] : j.at("config").items()) {
      SetConfigValue(config, key, value.get<std::string>());
    }
    ValidateConfig(config);
    Vocabulary vocab = Vocabulary::FromWords(j.at("vocab").get<std::vector<std::string>>());

    std::shared_ptr<const EmbeddingArchive> archive;
    if (config.encoder == EncoderMode::kArchive) {
      const std::string path = archive_override.empty() ? config.archive_path : archive_override;
      archive = std::make_shared<EmbeddingArchive>(EmbeddingArchive::Open(path));
    }
    Model model = InitModel(config, std::move(vocab), archive);

    std::ifstream bin(dir + "/params.bin", std::ios::binary);
    if (!bin) ThrowValidation("no checkpoint at '" + dir + "' (params.bin missing)");
    bin.seekg(0, std::ios::end);
    const auto total = static_cast<std::size_t>(bin.tellg()) / sizeof(float);
    bin.seekg(0);
    const std::vector<float> blob = ReadFloatsLE(bin, total);

    std::size_t seen = 0;
    for (const auto &entry : j.at("params")) {
      const std::string name = entry.at("name").get<std::string>();
      const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
      const auto offset = entry.at("offset").get<std::size_t>();
      if (!model.params.Contains(name)) {
        ThrowValidation("checkpoint parameter '" + name + "' is not part of this model");
      }
      Param<float> &p = model.params.Get(name);
      if (shape != p.value.shape()) {
        ThrowValidation("checkpoint parameter '" + name + "' has shape " + ShapeString(shape) +
                        ", expected " + ShapeString(p.value.shape()));
      }
      if (offset + p.value.size() > blob.size()) {
        ThrowValidation("checkpoint parameter '" + name + "' runs past the end of params.bin");
      }
      std::copy(blob.begin() + static_cast<std::ptrdiff_t>(offset),
                blob.begin() + static_cast<std::ptrdiff_t>(offset + p.value.size()),
                p.value.data());
      ++seen;
    }
    if (seen != model.params.size()) {
      ThrowValidation("checkpoint holds " + std::to_string(seen) + " of " +
                      std::to_string(model.params.size()) + " parameters");
    }
    return model;
  } catch (const nlohmann::json::exception &e) {
    ThrowValidation(dir + "/model.json: " + e.what());
  }
}

}  // namespace bisyn
