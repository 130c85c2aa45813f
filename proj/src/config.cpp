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

#include "config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace bisyn {

const char *InterVariantName(InterVariant v) {
  switch (v) {
    case InterVariant::kOff: return "off";
    case InterVariant::kBi: return "bi";
    case InterVariant::kUndirected: return "undirected";
    case InterVariant::kAdjacentAspect: return "adjacent_aspect";
    case InterVariant::kBiAdjacentAspect: return "bi_adjacent_aspect";
    case InterVariant::kGlobalAspect: return "global_aspect";
  }
  return "off";
}

std::optional<InterVariant> ParseInterVariant(std::string_view name) {
  for (InterVariant v : {InterVariant::kOff, InterVariant::kBi, InterVariant::kUndirected,
                         InterVariant::kAdjacentAspect, InterVariant::kBiAdjacentAspect,
                         InterVariant::kGlobalAspect}) {
    if (name == InterVariantName(v)) return v;
  }
  return std::nullopt;
}

namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void BadValue(std::string_view key, std::string_view value, const char *want) {
  ThrowValidation("config: " + std::string(key) + " = '" + std::string(value) +
                  "' is not " + want);
}

std::size_t ParseSize(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    BadValue(key, value, "a non-negative integer");
  }
  return out;
}

std::uint64_t ParseU64(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    BadValue(key, value, "a non-negative integer");
  }
  return out;
}

double ParseReal(std::string_view key, std::string_view value) {
  const std::string s(value);
  char *end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) BadValue(key, value, "a number");
  return v;
}

std::string FormatReal(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void SetConfigValue(ModelConfig &c, std::string_view key, std::string_view value) {
  if (key == "model.dim") c.dim = ParseSize(key, value);
  else if (key == "model.heads") c.heads = ParseSize(key, value);
  else if (key == "model.ff_mult") c.ff_mult = ParseSize(key, value);
  else if (key == "model.blocks") c.blocks = ParseSize(key, value);
  else if (key == "model.layers_per_block") c.layers_per_block = ParseSize(key, value);
  else if (key == "fusion.mode") {
    auto m = ParseFusionMode(value);
    if (!m) BadValue(key, value, "one of dot, add, cond_add, con_only, dep_only");
    c.fusion = *m;
  } else if (key == "inter.variant") {
    auto v = ParseInterVariant(value);
    if (!v) {
      BadValue(key, value,
               "one of off, bi, undirected, adjacent_aspect, bi_adjacent_aspect, "
               "global_aspect");
    }
    c.inter = *v;
  } else if (key == "inter.blocks") c.inter_blocks = ParseSize(key, value);
  else if (key == "inter.layers") c.inter_layers = ParseSize(key, value);
  else if (key == "inter.merge") {
    if (value == "sum") c.inter_merge = MergeMode::kSum;
    else if (value == "concat") c.inter_merge = MergeMode::kConcat;
    else BadValue(key, value, "sum or concat");
  } else if (key == "encoder.mode") {
    if (value == "toy") c.encoder = EncoderMode::kToy;
    else if (value == "archive") c.encoder = EncoderMode::kArchive;
    else BadValue(key, value, "toy or archive");
  } else if (key == "encoder.archive") c.archive_path = std::string(value);
  else if (key == "optim.lr") c.optim.lr = ParseReal(key, value);
  else if (key == "optim.l2") c.optim.l2 = ParseReal(key, value);
  else if (key == "optim.beta1") c.optim.beta1 = ParseReal(key, value);
  else if (key == "optim.beta2") c.optim.beta2 = ParseReal(key, value);
  else if (key == "optim.eps") c.optim.eps = ParseReal(key, value);
  else if (key == "dropout.input") c.dropout_input = ParseReal(key, value);
  else if (key == "dropout.output") c.dropout_output = ParseReal(key, value);
  else if (key == "dropout.layer") c.dropout_layer = ParseReal(key, value);
  else if (key == "attention.leaky_slope") c.leaky_slope = ParseReal(key, value);
  else if (key == "seed") c.seed = ParseU64(key, value);
  else if (key == "train.epochs") c.epochs = ParseSize(key, value);
  else if (key == "train.patience") c.patience = ParseSize(key, value);
  else if (key == "train.accumulate") c.accumulate = ParseSize(key, value);
  else ThrowValidation("config: unknown key '" + std::string(key) + "'");
}

void ValidateConfig(const ModelConfig &c) {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) ThrowValidation("config: " + what);
  };
  require(c.dim > 0, "model.dim must be positive");
  require(c.heads > 0 && c.dim % c.heads == 0, "model.dim must be a multiple of model.heads");
  require(c.ff_mult > 0, "model.ff_mult must be positive");
  require(c.blocks >= 1 && c.blocks <= 3, "model.blocks must be in [1, 3]");
  require(c.layers_per_block >= 1, "model.layers_per_block must be positive");
  require(c.inter_blocks >= 1 && c.inter_blocks <= 3, "inter.blocks must be in [1, 3]");
  require(c.inter_layers >= 1, "inter.layers must be positive");
  for (auto [name, rate] : {std::pair{"dropout.input", c.dropout_input},
                            std::pair{"dropout.output", c.dropout_output},
                            std::pair{"dropout.layer", c.dropout_layer}}) {
    require(rate >= 0.0 && rate < 1.0, std::string(name) + " must be in [0, 1)");
  }
  require(c.optim.lr > 0.0, "optim.lr must be positive");
  require(c.optim.l2 >= 0.0 && c.optim.eps >= 0.0, "optim.l2 and optim.eps must be >= 0");
  require(c.optim.beta1 >= 0.0 && c.optim.beta1 < 1.0 && c.optim.beta2 >= 0.0 &&
              c.optim.beta2 < 1.0,
          "optim.beta1 and optim.beta2 must be in [0, 1)");
  require(c.accumulate >= 1, "train.accumulate must be positive");
  require(c.encoder != EncoderMode::kArchive || !c.archive_path.empty(),
          "encoder.mode = archive needs encoder.archive");
}

ModelConfig ParseConfig(std::string_view text) {
  ModelConfig config;
  bool lr_given = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      ThrowValidation("config: line " + std::to_string(line_no) + " is not key = value");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    SetConfigValue(config, key, Trim(line.substr(eq + 1)));
    lr_given = lr_given || key == "optim.lr";
  }
  if (config.encoder == EncoderMode::kArchive && !lr_given) {
    config.optim.lr = ArchiveAdamDefaults().lr;
  }
  ValidateConfig(config);
  return config;
}

ModelConfig LoadConfigFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) ThrowValidation("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

std::map<std::string, std::string> ConfigToMap(const ModelConfig &c) {
  return {
      {"model.dim", std::to_string(c.dim)},
      {"model.heads", std::to_string(c.heads)},
      {"model.ff_mult", std::to_string(c.ff_mult)},
      {"model.blocks", std::to_string(c.blocks)},
      {"model.layers_per_block", std::to_string(c.layers_per_block)},
      {"fusion.mode", FusionModeName(c.fusion)},
      {"inter.variant", InterVariantName(c.inter)},
      {"inter.blocks", std::to_string(c.inter_blocks)},
      {"inter.layers", std::to_string(c.inter_layers)},
      {"inter.merge", c.inter_merge == MergeMode::kSum ? "sum" : "concat"},
      {"encoder.mode", c.encoder == EncoderMode::kToy ? "toy" : "archive"},
      {"encoder.archive", c.archive_path},
      {"optim.lr", FormatReal(c.optim.lr)},
      {"optim.l2", FormatReal(c.optim.l2)},
      {"optim.beta1", FormatReal(c.optim.beta1)},
      {"optim.beta2", FormatReal(c.optim.beta2)},
      {"optim.eps", FormatReal(c.optim.eps)},
      {"dropout.input", FormatReal(c.dropout_input)},
      {"dropout.output", FormatReal(c.dropout_output)},
      {"dropout.layer", FormatReal(c.dropout_layer)},
      {"attention.leaky_slope", FormatReal(c.leaky_slope)},
      {"seed", std::to_string(c.seed)},
      {"train.epochs", std::to_string(c.epochs)},
      {"train.patience", std::to_string(c.patience)},
      {"train.accumulate", std::to_string(c.accumulate)},
  };
}

std::string ConfigToText(const ModelConfig &config) {
  std::string out;
  for (const auto &[k, v] : ConfigToMap(config)) {
    if (k == "encoder.archive" && v.empty()) continue;
    out += k + " = " + v + "\n";
  }
  return out;
}

void ApplyEnvironmentOverrides(ModelConfig &config) {
  if (const char *seed = std::getenv("BISYN_SEED"); seed && *seed) {
    SetConfigValue(config, "seed", seed);
  }
}

}  // namespace bisyn
