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
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "optim.hpp"
#include "syntax_graphs.hpp"

namespace bisyn {

enum class EncoderMode { kToy, kArchive };

// How aspects of one sentence exchange information. kOff disables the
// relation encoder entirely.
enum class InterVariant {
  kOff,
  kBi,                // aspect-context graph, two directed relations
  kUndirected,        // aspect-context graph, symmetrized
  kAdjacentAspect,    // aspects only, neighbors linked
  kBiAdjacentAspect,  // aspects only, neighbors linked in two directions
  kGlobalAspect,      // aspects only, all pairs linked
};

// How the two directed relation passes are combined.
enum class MergeMode { kSum, kConcat };

const char *InterVariantName(InterVariant v);
std::optional<InterVariant> ParseInterVariant(std::string_view name);

struct ModelConfig {
  std::size_t dim = 64;
  std::size_t heads = 4;
  std::size_t ff_mult = 4;
  std::size_t blocks = 1;            // syntax encoder HGAT blocks, 1..3
  std::size_t layers_per_block = 3;  // also the constituency layer budget
  FusionMode fusion = FusionMode::kCondAdd;

  InterVariant inter = InterVariant::kBi;
  std::size_t inter_blocks = 1;
  std::size_t inter_layers = 2;
  MergeMode inter_merge = MergeMode::kSum;

  EncoderMode encoder = EncoderMode::kToy;
  std::string archive_path;

  AdamOptions optim;
  double dropout_input = 0.1;
  double dropout_output = 0.1;
  double dropout_layer = 0.2;
  double leaky_slope = 0.2;

  std::uint64_t seed = 1;
  std::size_t epochs = 200;
  std::size_t patience = 20;
  std::size_t accumulate = 1;  // sentences per optimizer step

  std::size_t ff_dim() const { return dim * ff_mult; }
  std::size_t repr_dim() const { return 2 * dim; }
};

// Applies one key=value setting; unknown keys and malformed values are
// validation errors.
void SetConfigValue(ModelConfig &config, std::string_view key, std::string_view value);
// Checks ranges and cross-field constraints.
void ValidateConfig(const ModelConfig &config);

// Flat "key = value" lines; '#' starts a comment. In archive mode the
// learning rate defaults to 2e-5 unless optim.lr is given.
ModelConfig ParseConfig(std::string_view text);
ModelConfig LoadConfigFile(const std::string &path);
std::map<std::string, std::string> ConfigToMap(const ModelConfig &config);
std::string ConfigToText(const ModelConfig &config);

// BISYN_SEED, when set, replaces the configured seed.
void ApplyEnvironmentOverrides(ModelConfig &config);

}  // namespace bisyn
