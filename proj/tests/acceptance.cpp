/*
 * Copyright 2026 The hiaa Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hiaa/checkpoint.hpp"
#include "hiaa/datapipe.hpp"
#include "hiaa/heads.hpp"
#include "hiaa/metavoter.hpp"
#include "hiaa/metrics.hpp"
#include "hiaa/pipeline.hpp"
#include "hiaa/synth.hpp"
#include "hiaa/taxonomy.hpp"
#include "hiaa/trainer.hpp"
#include "oracles.hpp"
#include "support.hpp"

#ifndef HIAA_CLI_PATH
#error "HIAA_CLI_PATH must point at the built command-line tool"
#endif

using namespace hiaa;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Metric oracle equivalence

Outcome metric_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  int definedness_mismatch = 0;
  int undefined = 0;
  auto compare = [&](std::optional<double> a, std::optional<double> b) {
    if (a.has_value() != b.has_value()) {
      ++definedness_mismatch;
      return;
    }
    if (!a) {
      ++undefined;
      return;
    }
    worst = std::max(worst, std::abs(*a - *b));
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + rng() % 198;
    std::vector<double> a(n), b(n);
    const int variant = trial % 4;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      switch (variant) {
        case 0:  // continuous, correlated
          a[i] = normal(rng);
          b[i] = 0.6 * a[i] + normal(rng);
          break;
        case 1:  // heavy ties on both sides
          a[i] = static_cast<double>(rng() % 3);
          b[i] = static_cast<double>(rng() % 4);
          break;
        case 2:  // ties on one side, five rating levels
          a[i] = static_cast<double>(1 + rng() % 5);
          b[i] = normal(rng);
          break;
        default:  // continuous values rounded onto a coarse grid
          a[i] = std::round(normal(rng) * 4.0) / 4.0;
          b[i] = std::round((a[i] + normal(rng)) * 2.0) / 2.0;
          break;
      }
    }
    compare(pearson(a, b), test::pearson_oracle(a, b));
    compare(spearman(a, b), test::spearman_oracle(a, b));
    compare(kendall_tau_b(a, b), test::kendall_oracle(a, b));
  }
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = worst <= 1e-9 && definedness_mismatch == 0 && t < 30.0;
  o.detail = "max |diff| " + fmt("%.3g", worst) + ", definedness mismatches " +
             std::to_string(definedness_mismatch) + ", undefined cases " +
             std::to_string(undefined) + ", " + fmt("%.2f", t) + " s";
  return o;
}

// ---------------------------------------------------------------------------
// 2. Gradient correctness

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  double worst_model = 0.0, worst_voter = 0.0;
  double fine_model = 0.0, fine_voter = 0.0;  // same instances re-checked at step 1e-7
  int over_model = 0, over_voter = 0;
  std::string where_model, where_voter;
  std::size_t entries = 0;
  for (int cfg_i = 0; cfg_i < 50; ++cfg_i) {
    ModelConfig mc;
    mc.backbone.hidden = 8;
    mc.backbone.features = 2 + static_cast<int>(rng() % 5);
    mc.backbone.embed = 2 + static_cast<int>(rng() % 3);
    mc.ffn_width = 4;
    ModelParams m = init_model(rng(), mc);
    for (auto& t : m.tensors()) {
      for (Eigen::Index k = 0; k < t.size(); ++k) t.data[k] += 0.2 * u(rng);
    }
    const int pattern = cfg_i % 3;
    const int f_a = pattern == 2 ? 1 : 0;
    const int f_b = pattern == 1 ? 0 : 1;
    std::vector<ScoredSample> batch{test::random_sample(rng, f_a, "a"),
                                    test::random_sample(rng, f_b, "b")};
    Stage1Config sc;
    sc.lambda = 1.0 + u(rng);
    sc.mu = 1.0 + u(rng);
    ModelParams grads;
    stage1_batch_loss_and_grad(m, batch, sc, grads);
    auto loss = [&] {
      double total = 0.0;
      for (const ScoredSample& s : batch) {
        const Vector x = derive_features(s.feature_seed, mc.backbone.features);
        total += stage1_loss(s, stage1_forward(m, s, x), sc);
      }
      return total / static_cast<double>(batch.size());
    };
    const auto r = test::check_gradients(m.tensors(), grads.tensors(), loss);
    entries += r.checked;
    if (r.worst >= 1e-4) {
      ++over_model;
      fine_model = std::max(fine_model,
                            test::check_gradients(m.tensors(), grads.tensors(), loss, 1e-7).worst);
    }
    if (r.worst > worst_model) {
      worst_model = r.worst;
      where_model = r.where;
    }

    MetaVoterConfig vc;
    vc.hidden = 4;
    vc.seed = rng();
    MetaVoterParams v = init_metavoter(vc);
    for (auto& t : v.tensors()) {
      for (Eigen::Index k = 0; k < t.size(); ++k) t.data[k] += u(rng);
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<VoterInput> vb{{unit(rng), unit(rng), unit(rng)},
                               {unit(rng), unit(rng), unit(rng)}};
    std::vector<double> vt{unit(rng), unit(rng)};
    MetaVoterParams vg = zeros_like(v);
    metavoter_loss_and_grad(v, vb, vt, vg);
    const auto rv = test::check_gradients(v.tensors(), vg.tensors(), [&] {
      return test::voter_loss_oracle(v, vb, vt);
    });
    entries += rv.checked;
    if (rv.worst >= 1e-4) {
      ++over_voter;
      fine_voter = std::max(fine_voter, test::check_gradients(v.tensors(), vg.tensors(), [&] {
                                          return test::voter_loss_oracle(v, vb, vt);
                                        }, 1e-7).worst);
    }
    if (rv.worst > worst_voter) {
      worst_voter = rv.worst;
      where_voter = rv.where;
    }
  }
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = worst_model < 1e-4 && worst_voter < 1e-4 && t < 60.0;
  o.detail = std::to_string(entries) + " entries, worst relative error model " +
             fmt("%.2e", worst_model) + " / voter " + fmt("%.2e", worst_voter) + ", " +
             fmt("%.2f", t) + " s";
  if (worst_model >= 1e-4) {
    o.detail += "; model: " + std::to_string(over_model) + " instance(s) over tolerance, worst at " +
                where_model + ", same instance(s) at step 1e-7: " + fmt("%.2e", fine_model);
  }
  if (worst_voter >= 1e-4) {
    o.detail += "; voter: " + std::to_string(over_voter) + " instance(s) over tolerance, worst at " +
                where_voter + ", same instance(s) at step 1e-7: " + fmt("%.2e", fine_voter);
  }
  return o;
}

// ---------------------------------------------------------------------------
// 3. Gradient isolation

bool exactly_zero(const std::vector<TensorRef>& ts) {
  for (const auto& t : ts) {
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      if (t.data[k] != 0.0) return false;
    }
  }
  return true;
}

Outcome gradient_isolation() {
  std::mt19937_64 rng(303);
  int violations = 0, checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ModelConfig mc;
    mc.backbone = {4 + static_cast<int>(rng() % 8), 3, 8 + static_cast<int>(rng() % 8)};
    mc.ffn_width = 4;
    const ModelParams m = init_model(rng(), mc);
    Stage1Config sc;
    for (int f : {0, 1}) {
      const ScoredSample s = test::random_sample(rng, f, "x");
      ModelParams g = zeros_like(m);
      stage1_loss_and_grad(m, s, derive_features(s.feature_seed, mc.backbone.features), sc, g);
      const bool ok = f == 0 ? exactly_zero(g.expert.tensors()) : exactly_zero(g.reg.tensors());
      violations += !ok;
      ++checked;
    }
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = std::to_string(checked) + " samples, " + std::to_string(violations) +
             " with a non-zero inactive-branch gradient";
  return o;
}

// ---------------------------------------------------------------------------
// 4 and 6. Synthetic hierarchical recovery and ablation ordering

constexpr int kRecoveryEpochs = 100;

struct RecoveryRun {
  std::vector<MetricsReport> reports;  // lm, reg, expert, metavoter on the held-out set
  std::size_t n_train = 0, n_test = 0;
  double seconds = 0.0;
};

RecoveryRun recovery_experiment() {
  const auto t0 = Clock::now();
  RunConfig cfg;  // defaults, master seed 0
  cfg.stage1.epochs = kRecoveryEpochs;
  SynthConfig sc = cfg.synth_config();
  sc.n = 2500;
  const std::vector<ScoredSample> all = build_samples(generate_records(sc));
  const std::vector<ScoredSample> train(all.begin(), all.begin() + 2000);
  const std::vector<ScoredSample> test(all.begin() + 2000, all.end());

  ModelCheckpoint ckpt;
  ckpt.model = train_stage1(train, cfg.stage1_config());

  const int F = ckpt.model.backbone.features();
  std::vector<VoterInput> vin;
  std::vector<double> vtarget;
  for (const ScoredSample& s : train) {
    const HeadScores h = score_heads(ckpt.model, derive_features(s.feature_seed, F), s.f);
    vin.push_back({h.lm, h.reg, h.expert[index_of(Dimension::kOverallAesthetic)]});
    vtarget.push_back(s.overall());
  }
  ckpt.metavoter = train_metavoter(vin, vtarget, cfg.voter_config());

  std::vector<HeadScores> preds;
  for (const ScoredSample& s : test) {
    preds.push_back(score_sample(ckpt, derive_features(s.feature_seed, F), s.f));
  }
  RecoveryRun run;
  for (HeadKind h : {HeadKind::kLm, HeadKind::kReg, HeadKind::kExpert, HeadKind::kMetaVoter}) {
    run.reports.push_back(evaluate(test, preds, h));
  }
  run.n_train = train.size();
  run.n_test = test.size();
  run.seconds = seconds_since(t0);
  return run;
}

double plcc_of(const MetricsReport& r, const std::string& target) {
  const MetricsRow* row = r.find(target);
  if (row == nullptr || !row->metrics.correlation.plcc) return std::nan("");
  return *row->metrics.correlation.plcc;
}

Outcome synthetic_recovery(const RecoveryRun& run) {
  const MetricsReport& expert = run.reports[2];
  const double overall = plcc_of(expert, "overall");
  const double overall_node = plcc_of(expert, "overall_aesthetic");
  double worst_leaf = 1.0;
  std::string worst_name;
  for (Dimension d : kLeafOrder) {
    const double v = plcc_of(expert, std::string(name(d)));
    if (!(v >= worst_leaf)) {
      worst_leaf = v;
      worst_name = std::string(name(d));
    }
  }
  Outcome o;
  o.pass = overall >= 0.9 && overall_node >= 0.9 && worst_leaf >= 0.8 && run.seconds < 300.0;
  o.detail = "train " + std::to_string(run.n_train) + " / held-out " +
             std::to_string(run.n_test) + ", stage-1 epochs " +
             std::to_string(kRecoveryEpochs) + "; expert overall PLCC " +
             fmt("%.4f", overall) + " (f=1 node " + fmt("%.4f", overall_node) +
             "), worst leaf " + worst_name + " " + fmt("%.4f", worst_leaf) + ", " +
             fmt("%.1f", run.seconds) + " s";
  return o;
}

Outcome ablation_ordering(const RecoveryRun& run) {
  const double lm = plcc_of(run.reports[0], "overall");
  const double reg = plcc_of(run.reports[1], "overall");
  const double ex = plcc_of(run.reports[2], "overall");
  const double mv = plcc_of(run.reports[3], "overall");
  Outcome o;
  o.pass = ex >= reg && mv >= std::max({lm, reg, ex}) - 0.02;
  o.detail = "overall PLCC lm " + fmt("%.4f", lm) + ", reg " + fmt("%.4f", reg) +
             ", expert " + fmt("%.4f", ex) + ", metavoter " + fmt("%.4f", mv);
  return o;
}

// ---------------------------------------------------------------------------
// 5. MetaVoter gain

Outcome metavoter_gain() {
  int wins = 0;
  std::string ratios;
  for (int seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(5000 + seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.1);
    auto make = [&](int n, std::vector<VoterInput>& x, std::vector<double>& y) {
      for (int i = 0; i < n; ++i) {
        const double gt = u(rng);
        x.push_back({gt + noise(rng), gt + noise(rng), gt + noise(rng)});
        y.push_back(gt);
      }
    };
    std::vector<VoterInput> xtr, xte;
    std::vector<double> ytr, yte;
    make(5000, xtr, ytr);
    make(1000, xte, yte);
    MetaVoterConfig c;  // 10 epochs
    c.seed = static_cast<std::uint64_t>(seed);
    const MetaVoterParams p = train_metavoter(xtr, ytr, c);
    std::vector<double> fused;
    std::array<std::vector<double>, 3> single;
    for (const VoterInput& x : xte) {
      fused.push_back(metavoter_forward(p, x));
      for (std::size_t h = 0; h < 3; ++h) single[h].push_back(x[h]);
    }
    double best = 1e9;
    for (const auto& s : single) best = std::min(best, mae_loss(s, yte));
    const double ratio = mae_loss(fused, yte) / best;
    wins += ratio <= 0.95;
    ratios += (ratios.empty() ? "" : " ") + fmt("%.3f", ratio);
  }
  Outcome o;
  o.pass = wins >= 4;
  o.detail = std::to_string(wins) + "/5 seeds at MAE ratio <= 0.95 (ratios " + ratios + ")";
  return o;
}

// ---------------------------------------------------------------------------
// 7. Rating mapping distribution

Outcome rating_distribution() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::array<int, 5> counts{};
  int ambiguous = 0;
  for (int i = 0; i < 100000; ++i) {
    const double s = u(rng);
    const int z = code_of(rating_from_score(s));
    ++counts[static_cast<std::size_t>(z - 1)];
    int hits = 0, agreeing = 0;
    for (int k = 1; k <= 5; ++k) {
      const bool in = k == 1 ? (s >= 0.0 && s <= 0.2) : (s > (k - 1) / 5.0 && s <= k / 5.0);
      hits += in;
      agreeing += in && k == z;
    }
    ambiguous += !(hits == 1 && agreeing == 1);
  }
  double worst = 0.0;
  for (int c : counts) worst = std::max(worst, std::abs(c / 100000.0 - 0.2));
  const std::array<double, 6> bounds{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const std::array<int, 6> expected{1, 1, 2, 3, 4, 5};
  bool boundaries = true;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    boundaries = boundaries && code_of(rating_from_score(bounds[i])) == expected[i];
  }
  Outcome o;
  o.pass = worst <= 0.01 && ambiguous == 0 && boundaries;
  o.detail = "max |freq - 0.2| " + fmt("%.4f", worst) + ", mapping errors " +
             std::to_string(ambiguous) + ", boundaries " + (boundaries ? "ok" : "wrong");
  return o;
}

// ---------------------------------------------------------------------------
// 8. Determinism of the CLI pipeline

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool run_pipeline(const std::filesystem::path& dir) {
  const std::string cli = HIAA_CLI_PATH;
  const std::string g = " --seed 1234 ";
  const std::vector<std::string> steps = {
      g + "synth --n 1000 --out rec.jsonl",
      g + "ingest --records rec.jsonl --out samples.jsonl",
      g + "genqa --samples samples.jsonl --out qa.jsonl",
      g + "split --samples samples.jsonl --out split.json",
      g + "train --samples samples.jsonl --split split.json --out stage1.json",
      g + "train-voter --samples samples.jsonl --split split.json --model stage1.json --out model.json",
      g + "eval --samples samples.jsonl --split split.json --model model.json --out report.json",
      g + "report --report report.json --out report.txt",
  };
  for (const std::string& s : steps) {
    const std::string cmd = "cd '" + dir.string() + "' && '" + cli + "'" + s + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return false;
  }
  return true;
}

Outcome cli_determinism() {
  const auto t0 = Clock::now();
  test::TempDir a("accept-a"), b("accept-b");
  const bool ok = run_pipeline(a.path()) && run_pipeline(b.path());
  const double t = seconds_since(t0);
  Outcome o;
  if (!ok) {
    o.detail = "a pipeline step failed";
    return o;
  }
  int identical = 0;
  const std::vector<std::string> files = {"rec.jsonl", "samples.jsonl", "qa.jsonl",
                                          "split.json", "stage1.json", "model.json",
                                          "report.json", "report.txt"};
  for (const std::string& f : files) identical += slurp(a / f) == slurp(b / f) && !slurp(a / f).empty();
  const std::string report = slurp(a / "report.json");
  bool four_heads = true;
  for (const char* h : {"\"lm\"", "\"reg\"", "\"expert\"", "\"metavoter\""}) {
    four_heads = four_heads && report.find(h) != std::string::npos;
  }
  o.pass = identical == static_cast<int>(files.size()) && four_heads && t < 180.0;
  o.detail = std::to_string(identical) + "/" + std::to_string(files.size()) +
             " artifacts byte-identical across two runs, four head reports " +
             (four_heads ? "present" : "missing") + ", " + fmt("%.1f", t) + " s for both runs";
  return o;
}

// ---------------------------------------------------------------------------
// 9. LM score bounds and symmetry

Outcome lm_score_properties() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> logit(-10.0, 10.0);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  int out_of_bounds = 0;
  double worst_sym = 0.0, worst_shift = 0.0;
  for (int i = 0; i < 10000; ++i) {
    Eigen::RowVectorXd p(5);
    for (int k = 0; k < 5; ++k) p[k] = logit(rng);
    const double s = lm_score(p);
    out_of_bounds += !(s > 1.0 && s < 5.0);
    const Eigen::RowVectorXd rev = p.reverse();
    worst_sym = std::max(worst_sym, std::abs(s + lm_score(rev) - 6.0));
    const Eigen::RowVectorXd shifted = p.array() + shift(rng);
    worst_shift = std::max(worst_shift, std::abs(lm_score(shifted) - s));
  }
  Outcome o;
  o.pass = out_of_bounds == 0 && worst_sym <= 1e-12 && worst_shift <= 1e-12;
  o.detail = std::to_string(out_of_bounds) + " outside (1,5), max symmetry error " +
             fmt("%.2e", worst_sym) + ", max shift error " + fmt("%.2e", worst_shift);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  RecoveryRun recovery;
  bool recovery_done = false;
  auto get_recovery = [&]() -> const RecoveryRun& {
    if (!recovery_done) {
      recovery = recovery_experiment();
      recovery_done = true;
    }
    return recovery;
  };
  const std::vector<Criterion> criteria = {
      {1, "metric oracle equivalence", metric_oracles},
      {2, "gradient correctness", gradient_checks},
      {3, "gradient isolation between loss branches", gradient_isolation},
      {4, "synthetic hierarchical recovery", [&] { return synthetic_recovery(get_recovery()); }},
      {5, "MetaVoter gain over the best single head", metavoter_gain},
      {6, "ablation ordering", [&] { return ablation_ordering(get_recovery()); }},
      {7, "rating mapping distribution", rating_distribution},
      {8, "CLI pipeline determinism", cli_determinism},
      {9, "LM score bounds and symmetry", lm_score_properties},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s criterion %d: %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
