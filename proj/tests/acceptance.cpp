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

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "hgat.hpp"
#include "inter_context.hpp"
#include "support.hpp"
#include "synth.hpp"
#include "syntax_graphs.hpp"
#include "trainer.hpp"

using namespace bisyn;
namespace bt = bisyn::testing;

namespace {

constexpr double kGradTolerance = 1e-3;
constexpr double kRowSumTolerance = 1e-6;
constexpr double kGradBudgetSeconds = 60.0;
constexpr double kAlgebraBudgetSeconds = 60.0;
constexpr double kLearningBudgetSeconds = 300.0;
constexpr double kHeldOutAccuracy = 0.90;
constexpr std::size_t kCorpusSize = 50;
constexpr std::size_t kMaxEpochs = 200;
constexpr std::uint64_t kTrainSeed = 7, kHeldOutSeed = 8, kValidSeed = 9;
constexpr double kNoise = 0.5;

// Collects failures of one criterion without stopping at the first one.
class Check {
 public:
  void Expect(bool ok, const std::string &what) {
    ++count_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ = failed_ || !ok;
  }
  bool ok() const { return !failed_; }
  std::size_t count() const { return count_; }
  std::string Failures() const {
    std::string out;
    for (const std::string &f : failures_) out += (out.empty() ? "" : "; ") + f;
    return out;
  }

 private:
  bool failed_ = false;
  std::size_t count_ = 0;
  std::vector<std::string> failures_;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void Run(const char *name, const std::function<Outcome()> &body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception &e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] %s: %s (%.2fs)\n", outcome.pass ? "PASS" : "FAIL", name,
              outcome.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!outcome.pass) ++failures;
}

double Elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string Fmt(const char *format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

ModelConfig PinnedConfig() {
  ModelConfig c;
  c.dim = 32;
  c.heads = 4;
  c.epochs = kMaxEpochs;
  c.fusion = FusionMode::kCondAdd;
  c.inter = InterVariant::kBi;
  c.seed = 1;
  return c;
}

std::vector<CollapsedRecord> Corpus(std::uint64_t seed, double noise = 0.0) {
  std::vector<CollapsedRecord> out;
  for (const SentenceRecord &r : GenerateSynthetic({kCorpusSize, seed, noise})) {
    out.push_back(CollapseAspects(r));
  }
  return out;
}

ParamStore<double> GatStore(const GatDims &dims, std::uint64_t seed,
                            const std::vector<std::string> &prefixes) {
  Rng rng(seed);
  ParamStore<float> store;
  for (const std::string &p : prefixes) InitGatLayer(store, p, dims, rng);
  return store.Cast<double>();
}

Outcome GradientFidelity() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  const GatDims dims{8, 2, 16};
  const std::size_t n = 5;
  std::vector<AdjacencyMatrix> graphs;
  for (int i = 0; i < 3; ++i) graphs.push_back(bt::RandomAdjacency(n, 0.4, rng));
  const BasicTensor<double> x = bt::RandomMatrix(n, 8, rng);
  const BasicTensor<double> readout = bt::RandomMatrix(8, 1, rng);

  ParamStore<double> layer = GatStore(dims, 102, {"gat"});
  layer.Add("x", x);
  const double layer_err =
      GradCheck([&](Tape<double> &tape, ParamStore<double> &p) {
        const auto vars = LoadGatLayer(tape, p, "gat", dims.heads);
        return Sum(MatMul(GatLayer(tape.Leaf(p.Get("x")), graphs[0], vars, 0.0, {}),
                          tape.Constant(readout)));
      }, layer).max_relative_error;

  ParamStore<double> block = GatStore(dims, 103, {"l0", "l1", "l2"});
  block.Add("x", x);
  const double block_err =
      GradCheck([&](Tape<double> &tape, ParamStore<double> &p) {
        HgatBlockVars<double> vars;
        for (const char *name : {"l0", "l1", "l2"}) {
          vars.push_back(LoadGatLayer(tape, p, name, dims.heads));
        }
        return Sum(MatMul(HgatBlock(tape.Leaf(p.Get("x")), graphs, vars, {}),
                          tape.Constant(readout)));
      }, block).max_relative_error;

  ModelConfig c;
  c.dim = 8;
  c.heads = 2;
  c.ff_mult = 2;
  c.dropout_input = c.dropout_output = c.dropout_layer = 0.0;
  const CollapsedRecord record = CollapseAspects(bt::TinyTwoAspectRecord());
  const Vocabulary vocab = Vocabulary::Build({record});
  ParamStore<double> model = InitModel(c, vocab).params.Cast<double>();
  const PreparedSentence s = PrepareSentence(record, c);
  const double model_err =
      GradCheck([&](Tape<double> &tape, ParamStore<double> &p) {
        ForwardContext<double> ctx{tape, p, c, &vocab};
        return SoftmaxCrossEntropy(ForwardSentence(ctx, s).logits, s.gold);
      }, model).max_relative_error;

  const double seconds = Elapsed(start);
  const bool pass = layer_err <= kGradTolerance && block_err <= kGradTolerance &&
                    model_err <= kGradTolerance && seconds < kGradBudgetSeconds &&
                    record.record.sentence.tokens.size() == 5 && s.gold.size() == 2;
  return {pass, Fmt("max rel err layer %.2e, block %.2e, ", layer_err, block_err) +
                    Fmt("full model (5 tokens, 2 aspects) %.2e; tol 1e-3, budget 60s",
                        model_err)};
}

Outcome AttentionSoundness() {
  Rng rng(201);
  Check check;
  double worst_sum = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.Below(16);
    const std::size_t heads = 1 + rng.Below(4);
    const GatDims dims{heads * 3, heads, 8};
    ParamStore<double> store = GatStore(dims, 300 + trial, {"gat"});
    const AdjacencyMatrix adj = bt::RandomAdjacency(n, rng.Uniform(0.0, 0.6), rng);
    const BasicTensor<double> h = bt::RandomMatrix(n, dims.dim, rng);
    auto run = [&](const BasicTensor<double> &input, AttentionTrace *trace) {
      Tape<double> tape;
      GatRunOptions options;
      options.trace = trace;
      return GatLayer(tape.Constant(input), adj, LoadGatLayer(tape, store, "gat", heads), 0.0,
                      options)
          .value();
    };
    AttentionTrace trace;
    const BasicTensor<double> base = run(h, &trace);
    check.Expect(trace.weights.size() == heads, "one attention matrix per head");
    for (const BasicTensor<double> &alpha : trace.weights) {
      for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += alpha(i, j);
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        check.Expect(std::abs(sum - 1.0) <= kRowSumTolerance, "row sum");
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      BasicTensor<double> perturbed = h;
      for (std::size_t j = 0; j < n; ++j) {
        if (adj.at(j, i)) continue;
        for (std::size_t col = 0; col < dims.dim; ++col) {
          perturbed(j, col) += rng.Uniform(-5.0, 5.0);
        }
      }
      const BasicTensor<double> moved = run(perturbed, nullptr);
      bool same = true;
      for (std::size_t col = 0; col < dims.dim; ++col) same = same && moved(i, col) == base(i, col);
      check.Expect(same, "node " + std::to_string(i) + " moved under non-neighbor perturbation");
    }
  }
  return {check.ok(), Fmt("100 graphs (n<=16, Z<=4), worst |row sum - 1| = %.1e, ", worst_sum) +
                          std::to_string(check.count()) + " checks" +
                          (check.ok() ? "" : "; " + check.Failures())};
}

Outcome PartitionAlgebra() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(301);
  Check check;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.Below(16);
    const ConstituencyTree t = bt::RandomTree(n, rng);
    const DependencyTree dep = bt::RandomDependencyTree(n, rng);
    const AdjacencyMatrix da = BuildDependencyAdjacency(dep, false);
    const LayerPartition clauses = ClausePartition(t);
    const int top = t.height(t.root());
    std::vector<TokenSpan> previous;
    for (int h = 1; h <= top; ++h) {
      const LayerPartition p = BuildLayerPartition(t, h);
      const std::vector<TokenSpan> oracle = bt::BruteForceLayer(t, h);
      check.Expect(std::set<std::pair<int, int>>(
                       [&] {
                         std::set<std::pair<int, int>> s;
                         for (const TokenSpan &x : p.phrases) s.insert({x.lo, x.hi});
                         return s;
                       }()) ==
                       [&] {
                         std::set<std::pair<int, int>> s;
                         for (const TokenSpan &x : oracle) s.insert({x.lo, x.hi});
                         return s;
                       }(),
                   "layer partition differs from the oracle");
      for (const TokenSpan &fine : previous) {
        check.Expect(p.phrases[p.PhraseOf(fine.lo)].Covers(fine), "coarsening");
      }
      previous = p.phrases;

      const AdjacencyMatrix ca = BuildConstituentAdjacency(p);
      const AdjacencyMatrix dot = Fuse(ca, da, clauses, FusionMode::kDot);
      const AdjacencyMatrix add = Fuse(ca, da, clauses, FusionMode::kAdd);
      const AdjacencyMatrix cond = Fuse(ca, da, clauses, FusionMode::kCondAdd);
      for (std::size_t a = 0; a < n; ++a) {
        check.Expect(ca.at(a, a) == 1, "CA reflexive");
        for (std::size_t b = 0; b < n; ++b) {
          check.Expect(ca.at(a, b) == ca.at(b, a), "CA symmetric");
          for (std::size_t c = 0; c < n; ++c) {
            if (ca.at(a, b) && ca.at(b, c)) check.Expect(ca.at(a, c) == 1, "CA transitive");
          }
          check.Expect(dot.at(a, b) <= cond.at(a, b) && cond.at(a, b) <= add.at(a, b),
                       "dot <= cond_add <= add");
          const bool cross = clauses.PhraseOf(static_cast<int>(a)) !=
                             clauses.PhraseOf(static_cast<int>(b));
          if (cross && da.at(a, b) && !ca.at(a, b)) {
            check.Expect(cond.at(a, b) == 0, "cond_add kept a DA-only cross-clause edge");
          }
        }
      }
    }
  }
  const double seconds = Elapsed(start);
  check.Expect(seconds < kAlgebraBudgetSeconds, "runtime budget");
  return {check.ok(), "500 random trees, " + std::to_string(check.count()) +
                          " checks; budget 60s" + (check.ok() ? "" : "; " + check.Failures())};
}

std::vector<std::string> Words(const SentenceRecord &r, const SegTerm &term) {
  std::vector<std::string> out;
  for (int w : term.words) out.push_back(r.sentence.tokens[w]);
  return out;
}

Outcome LcaAndSegmentation() {
  Rng rng(401);
  Check check;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.Below(15);
    const ConstituencyTree t = bt::RandomTree(n, rng);
    const int a = static_cast<int>(rng.Below(n));
    int b = static_cast<int>(rng.Below(n - 1));
    if (b >= a) ++b;
    check.Expect(LowestCommonAncestor(t, a, b) == bt::BruteForceLca(t, a, b), "LCA mismatch");
  }
  const SentenceRecord fs = bt::FoodServiceRecord();
  const SentenceRecord tf = bt::TasteOfFoodRecord();
  const auto but = Words(fs, PhraseSegmentation(fs.con, 1, 6));
  const auto of_the = Words(tf, PhraseSegmentation(tf.con, 3, 6));
  check.Expect(but == std::vector<std::string>{"but"}, "PS(food, service)");
  check.Expect(of_the == std::vector<std::string>{"of", "the"}, "PS(taste, food)");
  auto list = [](const std::vector<std::string> &words) {
    std::string out;
    for (const std::string &w : words) out += (out.empty() ? "" : ", ") + w;
    return "[" + out + "]";
  };
  return {check.ok(), "1000 random trees match brute-force LCA; PS(food, service) = " +
                          list(but) + ", PS(taste, food) = " + list(of_the) +
                          (check.ok() ? "" : "; " + check.Failures())};
}

Outcome NoiseEdgeFixture() {
  const SentenceRecord r = bt::FoodServiceRecord();
  const AdjacencyMatrix ca = BuildConstituentAdjacency(BuildLayerPartition(r.con, 3));
  const AdjacencyMatrix da = BuildDependencyAdjacency(r.dep, false);
  const LayerPartition clauses = ClausePartition(r.con);
  const int great = 3, dreadful = 11;
  const AdjacencyMatrix add = Fuse(ca, da, clauses, FusionMode::kAdd);
  const AdjacencyMatrix cond = Fuse(ca, da, clauses, FusionMode::kCondAdd);
  const bool pass = add.at(great, dreadful) && add.at(dreadful, great) &&
                    !cond.at(great, dreadful) && !cond.at(dreadful, great);
  return {pass, std::string("layer 3: add great-dreadful = ") +
                    std::to_string(add.at(great, dreadful)) +
                    ", cond_add great-dreadful = " + std::to_string(cond.at(great, dreadful))};
}

Outcome BiRelationalGraph() {
  const std::vector<SegTerm> terms = {{{2}, SegSource::kInnerBranches},
                                      {{5, 6}, SegSource::kInnerBranches}};
  const AspectContextGraph g = BuildAspectContextGraph(3, terms, InterVariant::kBi);
  using Edge = std::pair<std::size_t, std::size_t>;
  auto edges = [](const AdjacencyMatrix &m) {
    std::set<Edge> out;
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j < m.size(); ++j) {
        if (i != j && m.at(i, j)) out.insert({i, j});
      }
    }
    return out;
  };
  // Nodes a1 t12 a2 t23 a3: the odd aspects a1 and a3 point at a2 through their terms.
  const std::set<Edge> fwd = {{0, 1}, {1, 2}, {4, 3}, {3, 2}};
  const std::set<Edge> bwd = {{2, 1}, {1, 0}, {2, 3}, {3, 4}};
  const bool pass = g.nodes.size() == 5 && edges(g.fwd) == fwd && edges(g.bwd) == bwd &&
                    g.bwd == g.fwd.Transposed();
  return {pass, "3 aspects, 2 terms: A_fwd " + std::to_string(edges(g.fwd).size()) +
                    " edges odd->even, A_bwd " + std::to_string(edges(g.bwd).size()) +
                    " edges even->odd, mutual transposes"};
}

Outcome SingleAspectDegeneracy() {
  Check check;
  ModelConfig bi = PinnedConfig();
  bi.dropout_input = bi.dropout_output = bi.dropout_layer = 0.0;
  ModelConfig off = bi;
  off.inter = InterVariant::kOff;
  std::vector<CollapsedRecord> singles;
  for (const CollapsedRecord &r : Corpus(kTrainSeed)) {
    if (r.record.sentence.aspects.size() == 1) singles.push_back(r);
  }
  const Model model = InitModel(bi, Vocabulary::Build(singles));
  ParamStore<float> params = model.params;
  for (const CollapsedRecord &r : singles) {
    Tape<float> t1, t2;
    ForwardContext<float> c1{t1, params, bi, &model.vocab};
    ForwardContext<float> c2{t2, params, off, &model.vocab};
    const SentenceOutput<float> a = ForwardSentence(c1, PrepareSentence(r, bi));
    const SentenceOutput<float> b = ForwardSentence(c2, PrepareSentence(r, off));
    bool zero = true;
    for (std::size_t i = 0; i < a.v_aa.value().size(); ++i) zero = zero && a.v_aa.value()[i] == 0.0f;
    check.Expect(zero && !a.relation_applied, r.record.sentence.id + ": v_aa not zero");
    check.Expect(std::memcmp(a.logits.value().data(), b.logits.value().data(),
                             a.logits.value().size() * sizeof(float)) == 0,
                 r.record.sentence.id + ": outputs differ");
  }
  return {check.ok() && !singles.empty(),
          std::to_string(singles.size()) +
              " single-aspect sentences: v_aa == 0 and bi/off logits bitwise equal" +
              (check.ok() ? "" : "; " + check.Failures())};
}

Outcome DeskScaleLearning() {
  const auto start = std::chrono::steady_clock::now();
  const ModelConfig config = PinnedConfig();
  TrainResult clean = Train(config, Corpus(kTrainSeed), Corpus(kValidSeed));
  double best_train = 0.0;
  std::size_t first_perfect = 0;
  for (const EpochStats &e : clean.history) {
    best_train = std::max(best_train, e.train_accuracy);
    if (first_perfect == 0 && e.train_accuracy == 1.0) first_perfect = e.epoch;
  }
  const double held_out = Evaluate(clean.model, Corpus(kHeldOutSeed)).accuracy;
  const double seconds = Elapsed(start);

  auto noisy = [&](FusionMode mode) {
    ModelConfig c = config;
    c.fusion = mode;
    TrainResult r = Train(c, Corpus(kTrainSeed, kNoise), Corpus(kValidSeed, kNoise));
    return Evaluate(r.model, Corpus(kHeldOutSeed, kNoise)).accuracy;
  };
  const double noisy_cond = noisy(FusionMode::kCondAdd);
  const double noisy_add = noisy(FusionMode::kAdd);

  const bool pass = first_perfect > 0 && held_out >= kHeldOutAccuracy &&
                    seconds < kLearningBudgetSeconds && noisy_cond >= noisy_add;
  return {pass, "train acc 100% at epoch " + std::to_string(first_perfect) +
                    Fmt(", held-out acc %.3f (>= 0.90), clean run %.1fs (< 300s); ", held_out,
                        seconds) +
                    Fmt("noisy DA: cond_add %.3f >= add %.3f", noisy_cond, noisy_add)};
}

Outcome Determinism() {
  ModelConfig config = PinnedConfig();
  config.epochs = 15;
  const auto train = Corpus(kTrainSeed), valid = Corpus(kValidSeed), test = Corpus(kHeldOutSeed);
  TrainResult a = Train(config, train, valid);
  TrainResult b = Train(config, train, valid);
  Check check;
  for (const auto &[name, p] : a.model.params.entries()) {
    const Tensor &q = b.model.params.Get(name).value;
    check.Expect(std::memcmp(p.value.data(), q.data(), q.size() * sizeof(float)) == 0,
                 "parameter " + name);
  }
  check.Expect(a.history.size() == b.history.size(), "history length");
  for (std::size_t e = 0; e < std::min(a.history.size(), b.history.size()); ++e) {
    check.Expect(a.history[e].train_loss == b.history[e].train_loss &&
                     a.history[e].valid_loss == b.history[e].valid_loss,
                 "epoch metrics");
  }
  check.Expect(Evaluate(a.model, test).ToJson() == Evaluate(b.model, test).ToJson(), "metrics");
  const auto pa = Predict(a.model, test), pb = Predict(b.model, test);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    check.Expect(PredictionToJson(pa[i]) == PredictionToJson(pb[i]), "prediction");
  }
  return {check.ok(), std::to_string(a.model.params.NumScalars()) + " parameters, " +
                          std::to_string(pa.size()) +
                          " predictions and all metrics bit-identical across two seeded runs" +
                          (check.ok() ? "" : "; " + check.Failures())};
}

}  // namespace

int main() {
  Run("gradient fidelity", GradientFidelity);
  Run("attention soundness", AttentionSoundness);
  Run("partition and CA algebra", PartitionAlgebra);
  Run("LCA and phrase segmentation", LcaAndSegmentation);
  Run("noise edge fixture", NoiseEdgeFixture);
  Run("bi-relational graph", BiRelationalGraph);
  Run("single-aspect degeneracy", SingleAspectDegeneracy);
  Run("desk-scale learning", DeskScaleLearning);
  Run("determinism", Determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
