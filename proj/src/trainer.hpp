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

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "model.hpp"

namespace bisyn {

struct AspectPrediction {
  std::string sentence_id;
  std::size_t aspect_index = 0;
  std::string term;
  int label = 0;
  int gold = 0;
  std::array<double, kNumClasses> probs{};
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double valid_loss = 0.0;
  double valid_accuracy = 0.0;
  double valid_macro_f1 = 0.0;
};

struct TrainOptions {
  std::function<void(const EpochStats &)> on_epoch;
};

struct TrainResult {
  Model model;  // parameters of the selected epoch
  std::vector<EpochStats> history;
  std::size_t best_epoch = 0;
  bool early_stopped = false;
};

// Adam training, one sentence per forward pass and `train.accumulate`
// sentences per update, shuffled every epoch. The kept parameters are those
// of the epoch with the best validation accuracy, ties going to the lower
// validation loss. Training stops after `train.patience` epochs without
// such an improvement. A non-finite loss aborts with the offending batch.
TrainResult Train(const ModelConfig &config, const std::vector<CollapsedRecord> &train,
                  const std::vector<CollapsedRecord> &valid,
                  std::shared_ptr<const EmbeddingArchive> archive = nullptr,
                  const TrainOptions &options = {});

// Deterministic inference with dropout off.
std::vector<AspectPrediction> Predict(Model &model, const std::vector<CollapsedRecord> &data);
EvalReport Evaluate(Model &model, const std::vector<CollapsedRecord> &data);
EvalReport ReportFromPredictions(const std::vector<AspectPrediction> &predictions);

std::string PredictionToJson(const AspectPrediction &prediction);

}  // namespace bisyn
