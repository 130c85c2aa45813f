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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bisyn/bisyn.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int ExitCodeFor(bisyn_status status) {
  switch (status) {
    case BISYN_OK:
      return kExitOk;
    case BISYN_ERR_VALIDATION:
    case BISYN_ERR_ARGUMENT:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

// Thrown to unwind out of a subcommand with the status of a failed call.
struct CallFailed {
  bisyn_status status;
};

void Check(bisyn_status status) {
  if (status != BISYN_OK) {
    std::cerr << "error: " << bisyn_last_error() << "\n";
    throw CallFailed{status};
  }
}

template <typename T, void (*Free)(T *)>
struct Handle {
  T *ptr = nullptr;
  ~Handle() { Free(ptr); }
};

struct OwnedString {
  char *ptr = nullptr;
  ~OwnedString() { bisyn_string_free(ptr); }
  const char *c_str() const { return ptr ? ptr : ""; }
};

using Config = Handle<bisyn_config, bisyn_config_free>;
using Dataset = Handle<bisyn_dataset, bisyn_dataset_free>;
using Model = Handle<bisyn_model, bisyn_model_free>;

void PrintEpoch(const bisyn_epoch_stats *s, void *) {
  std::fprintf(stderr,
               "epoch %zu  loss %.4f  train_acc %.4f  valid_loss %.4f  valid_acc %.4f  "
               "valid_f1 %.4f\n",
               s->epoch, s->train_loss, s->train_accuracy, s->valid_loss, s->valid_accuracy,
               s->valid_macro_f1);
}

struct TrainArgs {
  std::string config, train, valid, out;
  bool quiet = false;
};

void RunTrain(const TrainArgs &a) {
  Config config;
  Check(bisyn_config_from_file(a.config.c_str(), &config.ptr));
  Check(bisyn_config_apply_env(config.ptr));
  Dataset train, valid;
  Check(bisyn_dataset_load(a.train.c_str(), &train.ptr));
  Check(bisyn_dataset_load(a.valid.c_str(), &valid.ptr));
  Model model;
  Check(bisyn_train(config.ptr, train.ptr, valid.ptr, a.quiet ? nullptr : PrintEpoch, nullptr,
                    &model.ptr));
  Check(bisyn_model_save(model.ptr, a.out.c_str()));
  OwnedString summary;
  Check(bisyn_model_train_summary(model.ptr, &summary.ptr));
  std::ofstream(std::filesystem::path(a.out) / "train_summary.json") << summary.c_str() << "\n";
  OwnedString report;
  Check(bisyn_model_evaluate(model.ptr, valid.ptr, &report.ptr));
  std::cout << report.c_str() << "\n";
}

struct ModelArgs {
  std::string model, data, archive;
};

void LoadModelAndData(const ModelArgs &a, Model &model, Dataset &data) {
  Check(bisyn_model_load(a.model.c_str(), a.archive.empty() ? nullptr : a.archive.c_str(),
                         &model.ptr));
  Check(bisyn_dataset_load(a.data.c_str(), &data.ptr));
}

void RunEval(const ModelArgs &a) {
  Model model;
  Dataset data;
  LoadModelAndData(a, model, data);
  OwnedString report;
  Check(bisyn_model_evaluate(model.ptr, data.ptr, &report.ptr));
  std::cout << report.c_str() << "\n";
}

void RunPredict(const ModelArgs &a) {
  Model model;
  Dataset data;
  LoadModelAndData(a, model, data);
  OwnedString lines;
  Check(bisyn_model_predict(model.ptr, data.ptr, &lines.ptr));
  std::cout << lines.c_str();
}

struct SentenceArgs {
  std::string data, id, fusion = "cond_add";
  int layers = 3;
  bool json = false;
};

using Grid = std::vector<std::vector<int>>;

void PrintGrid(const std::string &title, const std::vector<std::string> &tokens,
               const Grid &grid) {
  std::size_t width = 1;
  for (const std::string &t : tokens) width = std::max(width, t.size());
  std::cout << title << "\n" << std::string(width, ' ');
  for (const std::string &t : tokens) std::cout << ' ' << std::string(width - t.size(), ' ') << t;
  std::cout << "\n";
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::cout << tokens[i] << std::string(width - tokens[i].size(), ' ');
    for (int v : grid[i]) std::cout << ' ' << std::string(width - 1, ' ') << v;
    std::cout << "\n";
  }
  std::cout << "\n";
}

// Aligned 0/1 matrices: DA once, then CA and the fused mask per selected layer.
void PrintGraphText(const nlohmann::json &g) {
  const auto tokens = g["tokens"].get<std::vector<std::string>>();
  const std::size_t n = tokens.size();
  std::cout << "sentence " << g["id"].get<std::string>() << "  fusion "
            << g["fusion"].get<std::string>() << "\ntree " << g["tree"].get<std::string>()
            << "\nclauses";
  for (const auto &c : g["clauses"]) std::cout << " [" << c[0] << ", " << c[1] << ")";
  std::cout << "\n\n";

  Grid da(n, std::vector<int>(n, 0));
  for (const auto &e : g["dependency_edges"]) {
    const std::size_t a = e[0], b = e[1];
    da[a][b] = da[b][a] = 1;
  }
  PrintGrid("DA", tokens, da);
  for (const auto &aspect : g["aspects"]) {
    std::cout << "aspect " << aspect["index"] << " '" << aspect["term"].get<std::string>()
              << "' at token " << aspect["token"] << "\n\n";
    for (const auto &layer : aspect["layers"]) {
      Grid ca(n, std::vector<int>(n, 0)), fa(n, std::vector<int>(n, 0));
      for (const auto &p : layer["phrases"]) {
        for (int i = p[0]; i < p[1].get<int>(); ++i) {
          for (int j = p[0]; j < p[1].get<int>(); ++j) ca[i][j] = 1;
        }
      }
      for (std::size_t i = 0; i < n; ++i) fa[i][i] = 1;
      for (const auto &e : layer["edges"]) {
        const std::size_t a = e[0], b = e[1];
        fa[a][b] = fa[b][a] = 1;
      }
      const std::string h = std::to_string(layer["height"].get<int>());
      PrintGrid("CA height " + h, tokens, ca);
      PrintGrid("FA height " + h, tokens, fa);
    }
  }
}

void RunGraph(const SentenceArgs &a) {
  Dataset data;
  Check(bisyn_dataset_load(a.data.c_str(), &data.ptr));
  OwnedString json;
  Check(bisyn_dataset_graph_json(data.ptr, a.id.c_str(), a.fusion.c_str(), a.layers, &json.ptr));
  if (a.json) {
    std::cout << json.c_str() << "\n";
  } else {
    PrintGraphText(nlohmann::json::parse(json.c_str()));
  }
}

void RunPs(const SentenceArgs &a) {
  Dataset data;
  Check(bisyn_dataset_load(a.data.c_str(), &data.ptr));
  OwnedString lines;
  Check(bisyn_dataset_ps_json(data.ptr, a.id.c_str(), &lines.ptr));
  std::cout << lines.c_str();
}

struct SynthArgs {
  std::size_t n = 50;
  std::uint64_t seed = 1;
  double noise = 0.0;
  std::string out;
};

void RunSynth(const SynthArgs &a) { Check(bisyn_synth_write(a.n, a.seed, a.noise, a.out.c_str())); }

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"BiSyn aspect sentiment classifier"};
  app.set_version_flag("--version", std::string(bisyn_version()));
  app.require_subcommand(1);

  TrainArgs train;
  auto *train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_cmd->add_option("--config", train.config, "Config file (key = value)")->required();
  train_cmd->add_option("--train", train.train, "Training records")->required();
  train_cmd->add_option("--valid", train.valid, "Validation records")->required();
  train_cmd->add_option("--out", train.out, "Checkpoint directory")->required();
  train_cmd->add_flag("--quiet", train.quiet, "Do not print per-epoch progress");

  ModelArgs eval, predict;
  auto *eval_cmd = app.add_subcommand("eval", "Print accuracy, macro-F1 and confusion matrix");
  auto *predict_cmd = app.add_subcommand("predict", "Print one JSON prediction per aspect");
  for (auto [cmd, args] : {std::pair{eval_cmd, &eval}, std::pair{predict_cmd, &predict}}) {
    cmd->add_option("--model", args->model, "Checkpoint directory")->required();
    cmd->add_option("--data", args->data, "Records to score")->required();
    cmd->add_option("--archive", args->archive, "Embedding archive (archive-mode models)");
  }

  SentenceArgs graph, ps;
  auto *graph_cmd = app.add_subcommand("graph", "Print the syntax graphs of one sentence");
  graph_cmd->add_option("--data", graph.data, "Records")->required();
  graph_cmd->add_option("--id", graph.id, "Sentence id")->required();
  graph_cmd->add_option("--fusion", graph.fusion, "dot, add, cond_add, con_only or dep_only")
      ->capture_default_str();
  graph_cmd->add_option("--layers", graph.layers, "Layer budget per aspect")
      ->capture_default_str();
  graph_cmd->add_flag("--json", graph.json, "Print one JSON object instead of matrices");
  auto *ps_cmd = app.add_subcommand("ps", "Print segmentation terms between neighbor aspects");
  ps_cmd->add_option("--data", ps.data, "Records")->required();
  ps_cmd->add_option("--id", ps.id, "Sentence id")->required();

  SynthArgs synth;
  auto *synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus");
  synth_cmd->add_option("--n", synth.n, "Number of sentences")->required();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->required();
  synth_cmd->add_option("--out", synth.out, "Output path")->required();
  synth_cmd->add_option("--noise", synth.noise, "Cross-clause dependency noise rate")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*train_cmd) RunTrain(train);
    if (*eval_cmd) RunEval(eval);
    if (*predict_cmd) RunPredict(predict);
    if (*graph_cmd) RunGraph(graph);
    if (*ps_cmd) RunPs(ps);
    if (*synth_cmd) RunSynth(synth);
  } catch (const CallFailed &f) {
    return ExitCodeFor(f.status);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
