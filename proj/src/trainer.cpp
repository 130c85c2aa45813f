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

#include "trainer.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "error.hpp"
#include "optim.hpp"

namespace bisyn {
namespace {

std::array<double, kNumClasses> RowProbabilities(const Tensor &logits, std::size_t row) {
  std::vector<double> scores(kNumClasses);
  for (int c = 0; c < kNumClasses; ++c) scores[c] = logits(row, c);
  const std::vector<double> p = Softmax<double>(scores);
  std::array<double, kNumClasses> out{};
  std::copy(p.begin(), p.end(), out.begin());
  return out;
}

int Argmax(const std::array<double, kNumClasses> &p) {
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return best;
}

struct InferenceSummary {
  std::vector<AspectPrediction> predictions;
  double loss = 0.0;  // mean per aspect
};

InferenceSummary RunInference(Model &model, const std::vector<PreparedSentence> &prepared) {
  InferenceSummary out;
  double loss = 0.0;
  for (const PreparedSentence &s : prepared) {
    Tape<float> tape;
    ForwardContext<float> ctx{tape, model.params, model.config, &model.vocab,
                              model.archive.get()};
    const SentenceOutput<float> result = ForwardSentence(ctx, s);
    const Sentence &sentence = s.record->record.sentence;
    for (std::size_t k = 0; k < s.aspect_tokens.size(); ++k) {
      AspectPrediction p;
      p.sentence_id = sentence.id;
      p.aspect_index = k;
      p.term = sentence.tokens[s.aspect_tokens[k]];
      p.probs = RowProbabilities(result.logits.value(), k);
      p.label = Argmax(p.probs);
      p.gold = s.gold[k];
      loss += CrossEntropy<double>(p.probs, p.gold);
      out.predictions.push_back(std::move(p));
    }
  }
  if (!out.predictions.empty()) loss /= static_cast<double>(out.predictions.size());
  out.loss = loss;
  return out;
}

bool BetterThan(double acc, double loss, double best_acc, double best_loss) {
  return acc > best_acc || (acc == best_acc && loss < best_loss);
}

}  // namespace

EvalReport ReportFromPredictions(const std::vector<AspectPrediction> &predictions) {
  std::vector<int> gold, pred;
  for (const AspectPrediction &p : predictions) {
    gold.push_back(p.gold);
    pred.push_back(p.label);
  }
  return ComputeReport(gold, pred);
}

TrainResult Train(const ModelConfig &config, const std::vector<CollapsedRecord> &train,
                  const std::vector<CollapsedRecord> &valid,
                  std::shared_ptr<const EmbeddingArchive> archive, const TrainOptions &options) {
  if (train.empty()) ThrowValidation("training set is empty");
  if (config.encoder == EncoderMode::kArchive) {
    if (!archive) ThrowValidation("encoder.mode=archive needs an embedding archive");
    ValidateArchive(*archive, train, config.dim);
    ValidateArchive(*archive, valid, config.dim);
  }
  TrainResult result{InitModel(config, Vocabulary::Build(train), archive), {}, 0, false};
  Model &model = result.model;
  const std::vector<PreparedSentence> train_set = PrepareAll(train, config);
  const std::vector<PreparedSentence> valid_set = PrepareAll(valid, config);

  AdamState adam;
  adam.options = config.optim;
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t accumulate = std::max<std::size_t>(1, config.accumulate);

  ParamStore<float> best = model.params;
  double best_acc = -1.0, best_loss = INFINITY;
  std::size_t since_best = 0, batch = 0;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.Shuffle(order.begin(), order.end());
    model.params.ZeroGrad();
    double epoch_loss = 0.0;
    std::size_t epoch_aspects = 0, pending = 0;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      const PreparedSentence &s = train_set[order[pos]];
      Tape<float> tape;
      ForwardContext<float> ctx{tape, model.params, config, &model.vocab, archive.get(), &rng};
      const SentenceOutput<float> out = ForwardSentence(ctx, s);
      const Var<float> loss = SoftmaxCrossEntropy(out.logits, s.gold);
      const double value = loss.value()[0];
      if (!std::isfinite(value)) {
        ThrowNumeric("non-finite loss in epoch " + std::to_string(epoch) + ", batch " +
                     std::to_string(batch) + " (sentence '" + s.record->record.sentence.id +
                     "')");
      }
      epoch_loss += value;
      epoch_aspects += s.gold.size();
      tape.Backward(Scale(loss, 1.0 / static_cast<double>(accumulate)));
      if (++pending == accumulate || pos + 1 == order.size()) {
        for (const auto &[name, p] : model.params.entries()) {
          if (!p.grad.AllFinite()) {
            ThrowNumeric("non-finite gradient for '" + name + "' in batch " +
                         std::to_string(batch));
          }
        }
        AdamStep(model.params, adam);
        model.params.ZeroGrad();
        pending = 0;
        ++batch;
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(std::max<std::size_t>(1, epoch_aspects));
    stats.train_accuracy = ReportFromPredictions(RunInference(model, train_set).predictions).accuracy;
    if (!valid_set.empty()) {
      const InferenceSummary v = RunInference(model, valid_set);
      const EvalReport report = ReportFromPredictions(v.predictions);
      stats.valid_loss = v.loss;
      stats.valid_accuracy = report.accuracy;
      stats.valid_macro_f1 = report.macro_f1;
    }
    result.history.push_back(stats);
    if (options.on_epoch) options.on_epoch(stats);

    if (valid_set.empty()) {
      best = model.params;
      result.best_epoch = epoch;
      continue;
    }
    if (BetterThan(stats.valid_accuracy, stats.valid_loss, best_acc, best_loss)) {
      best_acc = stats.valid_accuracy;
      best_loss = stats.valid_loss;
      best = model.params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience && config.patience > 0) {
      result.early_stopped = true;
      break;
    }
  }
  model.params = std::move(best);
  model.params.ZeroGrad();
  return result;
}

std::vector<AspectPrediction> Predict(Model &model, const std::vector<CollapsedRecord> &data) {
  if (model.config.encoder == EncoderMode::kArchive) {
    if (!model.archive) ThrowValidation("model uses an archive encoder but none is open");
    ValidateArchive(*model.archive, data, model.config.dim);
  }
  return RunInference(model, PrepareAll(data, model.config)).predictions;
}

EvalReport Evaluate(Model &model, const std::vector<CollapsedRecord> &data) {
  if (data.empty()) ThrowValidation("cannot evaluate on an empty dataset");
  return ReportFromPredictions(Predict(model, data));
}

std::string PredictionToJson(const AspectPrediction &p) {
  nlohmann::json probs = nlohmann::json::object();
  for (int c = 0; c < kNumClasses; ++c) {
    probs[PolarityName(static_cast<Polarity>(c))] = p.probs[c];
  }
  nlohmann::json j = {{"id", p.sentence_id},
                      {"aspect_index", p.aspect_index},
                      {"term", p.term},
                      {"label", PolarityName(static_cast<Polarity>(p.label))},
                      {"probs", probs}};
  return j.dump();
}

}  // namespace bisyn
