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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bisyn/bisyn.h>

#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string Scratch(const std::string &tag) {
  const fs::path dir = fs::temp_directory_path() / ("bisyn-capi-" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string Take(char *s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  bisyn_string_free(s);
  return out;
}

std::vector<nlohmann::json> Lines(const std::string &text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

bisyn_dataset *Synth(const std::string &dir, std::size_t n, std::uint64_t seed) {
  const std::string path = dir + "/data-" + std::to_string(seed) + ".jsonl";
  REQUIRE(bisyn_synth_write(n, seed, 0.0, path.c_str()) == BISYN_OK);
  bisyn_dataset *data = nullptr;
  REQUIRE(bisyn_dataset_load(path.c_str(), &data) == BISYN_OK);
  return data;
}

void CountEpochs(const bisyn_epoch_stats *stats, void *user) {
  auto *seen = static_cast<std::vector<std::size_t> *>(user);
  seen->push_back(stats->epoch);
}

}  // namespace

TEST_CASE("version and null arguments") {
  CHECK(std::string(bisyn_version()).size() > 0);
  CHECK(bisyn_config_from_text(nullptr, nullptr) == BISYN_ERR_ARGUMENT);
  CHECK(std::string(bisyn_last_error()).size() > 0);
  bisyn_config_free(nullptr);
  bisyn_dataset_free(nullptr);
  bisyn_model_free(nullptr);
  bisyn_string_free(nullptr);
}

TEST_CASE("config handles") {
  bisyn_config *config = nullptr;
  REQUIRE(bisyn_config_from_text("model.dim = 16\nmodel.heads = 4\n", &config) == BISYN_OK);
  CHECK(bisyn_config_set(config, "train.epochs", "3") == BISYN_OK);
  CHECK(bisyn_config_set(config, "nope", "3") == BISYN_ERR_VALIDATION);
  CHECK(std::string(bisyn_last_error()).find("unknown key") != std::string::npos);
  char *text = nullptr;
  REQUIRE(bisyn_config_to_text(config, &text) == BISYN_OK);
  const std::string dumped = Take(text);
  CHECK(dumped.find("model.dim = 16") != std::string::npos);
  CHECK(dumped.find("train.epochs = 3") != std::string::npos);

  ::setenv("BISYN_SEED", "123", 1);
  CHECK(bisyn_config_apply_env(config) == BISYN_OK);
  ::unsetenv("BISYN_SEED");
  REQUIRE(bisyn_config_to_text(config, &text) == BISYN_OK);
  CHECK(Take(text).find("seed = 123") != std::string::npos);
  bisyn_config_free(config);

  bisyn_config *bad = nullptr;
  CHECK(bisyn_config_from_text("model.dim = 0", &bad) == BISYN_ERR_VALIDATION);
  CHECK(bad == nullptr);
  CHECK(bisyn_config_from_file("/nonexistent/bisyn.cfg", &bad) == BISYN_ERR_VALIDATION);
}

TEST_CASE("dataset inspection") {
  const std::string dir = Scratch("data");
  bisyn_dataset *data = Synth(dir, 8, 5);
  std::size_t n = 0;
  CHECK(bisyn_dataset_size(data, &n) == BISYN_OK);
  CHECK(n == 8);

  char *out = nullptr;
  REQUIRE(bisyn_dataset_graph_json(data, "syn-5-0", "cond_add", 3, &out) == BISYN_OK);
  const nlohmann::json graph = nlohmann::json::parse(Take(out));
  CHECK(graph["id"] == "syn-5-0");
  CHECK(bisyn_dataset_graph_json(data, "syn-5-0", "mul", 3, &out) == BISYN_ERR_VALIDATION);
  CHECK(bisyn_dataset_graph_json(data, "missing", "add", 3, &out) == BISYN_ERR_VALIDATION);

  REQUIRE(bisyn_dataset_ps_json(data, "syn-5-1", &out) == BISYN_OK);
  for (const nlohmann::json &line : Lines(Take(out))) {
    CHECK(line.contains("words"));
    CHECK(line["source"] == "inner_branches");
  }
  bisyn_dataset_free(data);

  bisyn_dataset *missing = nullptr;
  CHECK(bisyn_dataset_load((dir + "/absent.jsonl").c_str(), &missing) == BISYN_ERR_VALIDATION);
  CHECK(bisyn_synth_write(0, 1, 0.0, (dir + "/x.jsonl").c_str()) == BISYN_ERR_VALIDATION);
}

TEST_CASE("train, save, load, evaluate and predict") {
  const std::string dir = Scratch("train");
  bisyn_dataset *train = Synth(dir, 10, 1);
  bisyn_dataset *valid = Synth(dir, 6, 2);
  bisyn_config *config = nullptr;
  REQUIRE(bisyn_config_from_text("model.dim = 8\nmodel.heads = 2\ntrain.epochs = 3\n", &config) ==
          BISYN_OK);

  std::vector<std::size_t> epochs;
  bisyn_model *model = nullptr;
  REQUIRE(bisyn_train(config, train, valid, CountEpochs, &epochs, &model) == BISYN_OK);
  CHECK(epochs == std::vector<std::size_t>{1, 2, 3});
  std::size_t params = 0;
  CHECK(bisyn_model_num_params(model, &params) == BISYN_OK);
  CHECK(params > 0);

  char *out = nullptr;
  REQUIRE(bisyn_model_train_summary(model, &out) == BISYN_OK);
  const nlohmann::json summary = nlohmann::json::parse(Take(out));
  CHECK(summary["history"].size() == 3);

  REQUIRE(bisyn_model_predict(model, valid, &out) == BISYN_OK);
  const std::string predictions = Take(out);
  for (const nlohmann::json &p : Lines(predictions)) {
    const double total = p["probs"]["positive"].get<double>() +
                         p["probs"]["negative"].get<double>() +
                         p["probs"]["neutral"].get<double>();
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }

  const std::string ckpt = dir + "/model";
  REQUIRE(bisyn_model_save(model, ckpt.c_str()) == BISYN_OK);
  bisyn_model *loaded = nullptr;
  REQUIRE(bisyn_model_load(ckpt.c_str(), nullptr, &loaded) == BISYN_OK);
  REQUIRE(bisyn_model_predict(loaded, valid, &out) == BISYN_OK);
  CHECK(Take(out) == predictions);
  REQUIRE(bisyn_model_evaluate(loaded, valid, &out) == BISYN_OK);
  const nlohmann::json report = nlohmann::json::parse(Take(out));
  CHECK(report["accuracy"].get<double>() >= 0.0);
  CHECK(report["accuracy"].get<double>() <= 1.0);

  bisyn_model *none = nullptr;
  CHECK(bisyn_model_load((dir + "/absent").c_str(), nullptr, &none) == BISYN_ERR_VALIDATION);
  CHECK(none == nullptr);
  CHECK(bisyn_train(config, nullptr, valid, nullptr, nullptr, &none) == BISYN_ERR_ARGUMENT);

  bisyn_model_free(loaded);
  bisyn_model_free(model);
  bisyn_config_free(config);
  bisyn_dataset_free(valid);
  bisyn_dataset_free(train);
}
