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

#include "bisyn/bisyn.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include <json.hpp>

#include "checkpoint.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "inter_context.hpp"
#include "synth.hpp"
#include "trainer.hpp"

struct bisyn_config {
  bisyn::ModelConfig value;
};

struct bisyn_dataset {
  std::vector<bisyn::CollapsedRecord> records;
};

struct bisyn_model {
  bisyn::Model model;
  std::vector<bisyn::EpochStats> history;
  std::size_t best_epoch = 0;
  bool early_stopped = false;
  bool trained = false;
};

namespace {

thread_local std::string g_last_error;

bisyn_status Fail(bisyn_status status, const std::string &message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
bisyn_status Guard(Fn &&fn) {
  try {
    fn();
    g_last_error.clear();
    return BISYN_OK;
  } catch (const bisyn::Error &e) {
    switch (e.kind()) {
      case bisyn::ErrorKind::kValidation:
        return Fail(BISYN_ERR_VALIDATION, e.what());
      case bisyn::ErrorKind::kNumeric:
        return Fail(BISYN_ERR_NUMERIC, e.what());
      case bisyn::ErrorKind::kRuntime:
        break;
    }
    return Fail(BISYN_ERR_RUNTIME, e.what());
  } catch (const std::bad_alloc &) {
    return Fail(BISYN_ERR_RUNTIME, "out of memory");
  } catch (const std::exception &e) {
    return Fail(BISYN_ERR_RUNTIME, e.what());
  }
}

char *CopyString(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const bisyn::CollapsedRecord &FindRecord(const bisyn_dataset *data, const std::string &id) {
  for (const bisyn::CollapsedRecord &r : data->records) {
    if (r.record.sentence.id == id) return r;
  }
  bisyn::ThrowValidation("no sentence with id '" + id + "'");
}

nlohmann::json SpanList(const std::vector<bisyn::TokenSpan> &spans) {
  nlohmann::json out = nlohmann::json::array();
  for (const bisyn::TokenSpan &s : spans) out.push_back({s.lo, s.hi});
  return out;
}

nlohmann::json EdgeList(const bisyn::AdjacencyMatrix &a) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (a.at(i, j)) out.push_back({i, j});
    }
  }
  return out;
}

std::shared_ptr<const bisyn::EmbeddingArchive> OpenArchiveFor(const bisyn::ModelConfig &c) {
  if (c.encoder != bisyn::EncoderMode::kArchive) return nullptr;
  if (c.archive_path.empty()) bisyn::ThrowValidation("encoder.mode=archive needs encoder.archive");
  return std::make_shared<bisyn::EmbeddingArchive>(bisyn::EmbeddingArchive::Open(c.archive_path));
}

}  // namespace

#define BISYN_REQUIRE(ptr)                                                  \
  do {                                                                      \
    if (!(ptr)) return Fail(BISYN_ERR_ARGUMENT, #ptr " must not be null"); \
  } while (0)

extern "C" {

const char *bisyn_version(void) { return "0.1.0"; }

const char *bisyn_last_error(void) { return g_last_error.c_str(); }

void bisyn_string_free(char *s) { std::free(s); }

bisyn_status bisyn_config_from_text(const char *text, bisyn_config **out) {
  BISYN_REQUIRE(text);
  BISYN_REQUIRE(out);
  return Guard([&] { *out = new bisyn_config{bisyn::ParseConfig(text)}; });
}

bisyn_status bisyn_config_from_file(const char *path, bisyn_config **out) {
  BISYN_REQUIRE(path);
  BISYN_REQUIRE(out);
  return Guard([&] { *out = new bisyn_config{bisyn::LoadConfigFile(path)}; });
}

bisyn_status bisyn_config_set(bisyn_config *config, const char *key, const char *value) {
  BISYN_REQUIRE(config);
  BISYN_REQUIRE(key);
  BISYN_REQUIRE(value);
  return Guard([&] {
    bisyn::ModelConfig next = config->value;
    bisyn::SetConfigValue(next, key, value);
    bisyn::ValidateConfig(next);
    config->value = next;
  });
}

bisyn_status bisyn_config_apply_env(bisyn_config *config) {
  BISYN_REQUIRE(config);
  return Guard([&] { bisyn::ApplyEnvironmentOverrides(config->value); });
}

bisyn_status bisyn_config_to_text(const bisyn_config *config, char **out) {
  BISYN_REQUIRE(config);
  BISYN_REQUIRE(out);
  return Guard([&] { *out = CopyString(bisyn::ConfigToText(config->value)); });
}

void bisyn_config_free(bisyn_config *config) { delete config; }

bisyn_status bisyn_dataset_load(const char *path, bisyn_dataset **out) {
  BISYN_REQUIRE(path);
  BISYN_REQUIRE(out);
  return Guard([&] { *out = new bisyn_dataset{bisyn::LoadDataset(path)}; });
}

bisyn_status bisyn_dataset_size(const bisyn_dataset *data, size_t *out) {
  BISYN_REQUIRE(data);
  BISYN_REQUIRE(out);
  *out = data->records.size();
  return BISYN_OK;
}

void bisyn_dataset_free(bisyn_dataset *data) { delete data; }

bisyn_status bisyn_dataset_graph_json(const bisyn_dataset *data, const char *id,
                                      const char *fusion, int max_layers, char **out) {
  BISYN_REQUIRE(data);
  BISYN_REQUIRE(id);
  BISYN_REQUIRE(fusion);
  BISYN_REQUIRE(out);
  return Guard([&] {
    const auto mode = bisyn::ParseFusionMode(fusion);
    if (!mode) bisyn::ThrowValidation(std::string("unknown fusion mode '") + fusion + "'");
    if (max_layers < 1) bisyn::ThrowValidation("max_layers must be at least 1");
    const bisyn::SentenceRecord &r = FindRecord(data, id).record;
    const bisyn::ConstituencyTree &tree = r.con;

    nlohmann::json dep = nlohmann::json::array();
    for (std::size_t i = 0; i < r.dep.size(); ++i) {
      if (r.dep.heads[i] >= 0) dep.push_back({r.dep.heads[i], i});
    }
    nlohmann::json aspects = nlohmann::json::array();
    for (std::size_t k = 0; k < r.sentence.aspects.size(); ++k) {
      const int token = r.sentence.aspects[k].from;
      const std::vector<int> ancestors = tree.Ancestors(token);
      const std::vector<int> ranks = bisyn::SelectGraphLayers(tree, token, max_layers);
      const std::vector<bisyn::AdjacencyMatrix> graphs =
          bisyn::AspectGraphs(r, token, *mode, max_layers);
      nlohmann::json layers = nlohmann::json::array();
      for (std::size_t g = 0; g < ranks.size(); ++g) {
        const int height = tree.height(ancestors[ranks[g] - 1]);
        layers.push_back(
            {{"height", height},
             {"phrases", SpanList(bisyn::BuildLayerPartition(tree, height).phrases)},
             {"edges", EdgeList(graphs[g])}});
      }
      aspects.push_back({{"index", k},
                         {"term", r.sentence.tokens[token]},
                         {"token", token},
                         {"polarity", bisyn::PolarityName(r.sentence.aspects[k].polarity)},
                         {"layers", layers}});
    }
    nlohmann::json j = {{"id", r.sentence.id},
                        {"tokens", r.sentence.tokens},
                        {"tree", bisyn::ToBracketed(tree)},
                        {"fusion", bisyn::FusionModeName(*mode)},
                        {"clauses", SpanList(bisyn::ClausePartition(tree).phrases)},
                        {"dependency_edges", dep},
                        {"aspects", aspects}};
    *out = CopyString(j.dump());
  });
}

bisyn_status bisyn_dataset_ps_json(const bisyn_dataset *data, const char *id, char **out) {
  BISYN_REQUIRE(data);
  BISYN_REQUIRE(id);
  BISYN_REQUIRE(out);
  return Guard([&] {
    const bisyn::SentenceRecord &r = FindRecord(data, id).record;
    const std::vector<bisyn::SegTerm> terms = bisyn::NeighborSegTerms(r);
    std::string text;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      std::vector<std::string> words;
      for (int t : terms[k].words) words.push_back(r.sentence.tokens[t]);
      const nlohmann::json j = {
          {"left", r.sentence.tokens[r.sentence.aspects[k].from]},
          {"right", r.sentence.tokens[r.sentence.aspects[k + 1].from]},
          {"words", words},
          {"source", bisyn::SegSourceName(terms[k].source)}};
      text += j.dump() + "\n";
    }
    *out = CopyString(text);
  });
}

bisyn_status bisyn_synth_write(size_t n, uint64_t seed, double noise, const char *path) {
  BISYN_REQUIRE(path);
  return Guard([&] {
    bisyn::SynthOptions options;
    options.n = n;
    options.seed = seed;
    options.noise = noise;
    bisyn::SaveRecords(path, bisyn::GenerateSynthetic(options));
  });
}

bisyn_status bisyn_train(const bisyn_config *config, const bisyn_dataset *train,
                         const bisyn_dataset *valid, bisyn_epoch_callback callback,
                         void *user_data, bisyn_model **out) {
  BISYN_REQUIRE(config);
  BISYN_REQUIRE(train);
  BISYN_REQUIRE(out);
  return Guard([&] {
    bisyn::TrainOptions options;
    if (callback) {
      options.on_epoch = [&](const bisyn::EpochStats &s) {
        const bisyn_epoch_stats c{s.epoch,      s.train_loss,     s.train_accuracy,
                                  s.valid_loss, s.valid_accuracy, s.valid_macro_f1};
        callback(&c, user_data);
      };
    }
    static const std::vector<bisyn::CollapsedRecord> kEmpty;
    bisyn::TrainResult result =
        bisyn::Train(config->value, train->records, valid ? valid->records : kEmpty,
                     OpenArchiveFor(config->value), options);
    *out = new bisyn_model{std::move(result.model), std::move(result.history),
                           result.best_epoch, result.early_stopped, true};
  });
}

bisyn_status bisyn_model_train_summary(const bisyn_model *model, char **out) {
  BISYN_REQUIRE(model);
  BISYN_REQUIRE(out);
  return Guard([&] {
    nlohmann::json history = nlohmann::json::array();
    for (const bisyn::EpochStats &s : model->history) {
      history.push_back({{"epoch", s.epoch},
                         {"train_loss", s.train_loss},
                         {"train_accuracy", s.train_accuracy},
                         {"valid_loss", s.valid_loss},
                         {"valid_accuracy", s.valid_accuracy},
                         {"valid_macro_f1", s.valid_macro_f1}});
    }
    const nlohmann::json j = {{"trained", model->trained},
                              {"best_epoch", model->best_epoch},
                              {"early_stopped", model->early_stopped},
                              {"epochs_run", model->history.size()},
                              {"history", history}};
    *out = CopyString(j.dump());
  });
}

bisyn_status bisyn_model_save(const bisyn_model *model, const char *dir) {
  BISYN_REQUIRE(model);
  BISYN_REQUIRE(dir);
  return Guard([&] { bisyn::SaveModel(model->model, dir); });
}

bisyn_status bisyn_model_load(const char *dir, const char *archive_dir, bisyn_model **out) {
  BISYN_REQUIRE(dir);
  BISYN_REQUIRE(out);
  return Guard([&] {
    *out = new bisyn_model{bisyn::LoadModel(dir, archive_dir ? archive_dir : ""), {}, 0, false,
                           false};
  });
}

bisyn_status bisyn_model_num_params(const bisyn_model *model, size_t *out) {
  BISYN_REQUIRE(model);
  BISYN_REQUIRE(out);
  *out = model->model.params.NumScalars();
  return BISYN_OK;
}

bisyn_status bisyn_model_evaluate(bisyn_model *model, const bisyn_dataset *data, char **out) {
  BISYN_REQUIRE(model);
  BISYN_REQUIRE(data);
  BISYN_REQUIRE(out);
  return Guard([&] { *out = CopyString(bisyn::Evaluate(model->model, data->records).ToJson()); });
}

bisyn_status bisyn_model_predict(bisyn_model *model, const bisyn_dataset *data, char **out) {
  BISYN_REQUIRE(model);
  BISYN_REQUIRE(data);
  BISYN_REQUIRE(out);
  return Guard([&] {
    std::string text;
    for (const bisyn::AspectPrediction &p : bisyn::Predict(model->model, data->records)) {
      text += bisyn::PredictionToJson(p) + "\n";
    }
    *out = CopyString(text);
  });
}

void bisyn_model_free(bisyn_model *model) { delete model; }

}  // extern "C"
