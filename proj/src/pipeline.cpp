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

#include "hiaa/pipeline.hpp"

#include <random>
#include <string>
#include <vector>

#include "hiaa/checkpoint.hpp"
#include "hiaa/datapipe.hpp"
#include "hiaa/error.hpp"
#include "hiaa/metrics.hpp"
#include "json_io.hpp"

namespace hiaa {
namespace {

using detail::json;

template <typename T>
void read_key(const json& obj, const std::string& key, T& out) {
  const json& v = obj.at(key);
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw Error(Errc::kConfigError, "");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw Error(Errc::kConfigError, "");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned()) {
          throw Error(Errc::kConfigError, "");
        }
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw Error(Errc::kConfigError, "");
    }
    out = v.get<T>();
  } catch (const std::exception&) {
    throw Error(Errc::kConfigError, "config key '" + key + "' has the wrong type");
  }
}

OptimizerKind parse_optimizer(const std::string& key, const std::string& s) {
  auto k = optimizer_from_name(s);
  if (!k) throw Error(Errc::kConfigError, key + ": unknown optimizer '" + s + "'");
  return *k;
}

std::vector<ScoredSample> subset(const std::vector<ScoredSample>& all,
                                 const Split& split, const std::string& which) {
  if (which == "all") return all;
  if (which == "train") return select_samples(all, split.train_ids);
  if (which == "test") return select_samples(all, split.test_ids);
  throw Error(Errc::kConfigError, "eval.subset must be test, train or all");
}

json scores_row(const ScoredSample& s, const HeadScores& h) {
  json row;
  row["sample_id"] = s.sample_id;
  row["f"] = s.f;
  row["lm"] = h.lm;
  row["reg"] = h.reg;
  json ex = json::object();
  json lm = json::object();
  for (Dimension d : kAllDimensions) {
    ex[std::string(name(d))] = h.expert[index_of(d)];
    lm[std::string(name(d))] = h.lm_dims[index_of(d)];
  }
  row["expert"] = std::move(ex);
  row["lm_dims"] = std::move(lm);
  if (h.fused) row["fused"] = *h.fused;
  return row;
}

}  // namespace

SynthConfig RunConfig::synth_config() const {
  SynthConfig c;
  c.n = synth_n;
  c.seed = synth_seed();
  c.noise_sigma = synth_noise_sigma;
  c.overall_only_fraction = synth_overall_only_fraction;
  c.features = model.backbone.features;
  c.generator_seed = synth_generator_seed;
  return c;
}

Stage1Config RunConfig::stage1_config() const {
  Stage1Config c = stage1;
  c.seed = stage1_seed();
  c.model = model;
  return c;
}

MetaVoterConfig RunConfig::voter_config() const {
  MetaVoterConfig c = voter;
  c.seed = voter_seed();
  return c;
}

void RunConfig::validate() const {
  if (synth_n < 1) throw Error(Errc::kConfigError, "synth.n must be >= 1");
  if (!(synth_noise_sigma >= 0.0)) {
    throw Error(Errc::kConfigError, "synth.noise_sigma must be >= 0");
  }
  if (!(synth_overall_only_fraction >= 0.0 && synth_overall_only_fraction < 1.0)) {
    throw Error(Errc::kConfigError, "synth.overall_only_fraction must lie in [0,1)");
  }
  auto frac_ok = [](double q) { return q > 0.0 && q < 1.0; };
  if (!frac_ok(split_test_fraction)) {
    throw Error(Errc::kConfigError, "split.test_fraction must lie in (0,1)");
  }
  for (const auto& [src, q] : split_fractions) {
    if (!frac_ok(q)) {
      throw Error(Errc::kConfigError, "split.fractions." + src + " must lie in (0,1)");
    }
  }
  if (model.backbone.features < 1 || model.backbone.embed < 1 ||
      model.backbone.hidden < 1 || model.ffn_width < 1) {
    throw Error(Errc::kConfigError, "model sizes must be positive");
  }
  stage1.validate();
  voter.validate();
  if (eval_subset != "test" && eval_subset != "train" && eval_subset != "all") {
    throw Error(Errc::kConfigError, "eval.subset must be test, train or all");
  }
}

RunConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::kConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::kConfigError, "config must be a JSON object");

  RunConfig c;
  std::string opt1 = std::string(optimizer_name(c.stage1.optimizer));
  std::string opt2 = std::string(optimizer_name(c.voter.optimizer));
  for (const auto& [key, value] : doc.items()) {
    if (key == "seed") read_key(doc, key, c.seed);
    else if (key == "synth.n") read_key(doc, key, c.synth_n);
    else if (key == "synth.noise_sigma") read_key(doc, key, c.synth_noise_sigma);
    else if (key == "synth.overall_only_fraction") read_key(doc, key, c.synth_overall_only_fraction);
    else if (key == "synth.generator_seed") read_key(doc, key, c.synth_generator_seed);
    else if (key == "split.test_fraction") read_key(doc, key, c.split_test_fraction);
    else if (key == "split.fractions") {
      if (!value.is_object()) {
        throw Error(Errc::kConfigError, "split.fractions must map source to fraction");
      }
      for (const auto& [src, q] : value.items()) {
        if (!q.is_number()) {
          throw Error(Errc::kConfigError, "split.fractions." + src + " must be a number");
        }
        c.split_fractions[src] = q.get<double>();
      }
    }
    else if (key == "model.features") read_key(doc, key, c.model.backbone.features);
    else if (key == "model.embed") read_key(doc, key, c.model.backbone.embed);
    else if (key == "model.hidden") read_key(doc, key, c.model.backbone.hidden);
    else if (key == "model.ffn_width") read_key(doc, key, c.model.ffn_width);
    else if (key == "stage1.lambda") read_key(doc, key, c.stage1.lambda);
    else if (key == "stage1.mu") read_key(doc, key, c.stage1.mu);
    else if (key == "stage1.learning_rate") read_key(doc, key, c.stage1.learning_rate);
    else if (key == "stage1.batch_size") read_key(doc, key, c.stage1.batch_size);
    else if (key == "stage1.epochs") read_key(doc, key, c.stage1.epochs);
    else if (key == "stage1.optimizer") read_key(doc, key, opt1);
    else if (key == "voter.hidden") read_key(doc, key, c.voter.hidden);
    else if (key == "voter.momentum") read_key(doc, key, c.voter.momentum);
    else if (key == "voter.epsilon") read_key(doc, key, c.voter.epsilon);
    else if (key == "voter.epochs") read_key(doc, key, c.voter.epochs);
    else if (key == "voter.learning_rate") read_key(doc, key, c.voter.learning_rate);
    else if (key == "voter.batch_size") read_key(doc, key, c.voter.batch_size);
    else if (key == "voter.optimizer") read_key(doc, key, opt2);
    else if (key == "eval.subset") read_key(doc, key, c.eval_subset);
    else throw Error(Errc::kConfigError, "unknown config key '" + key + "'");
  }
  c.stage1.optimizer = parse_optimizer("stage1.optimizer", opt1);
  c.voter.optimizer = parse_optimizer("voter.optimizer", opt2);
  c.validate();
  return c;
}

std::string config_to_json(const RunConfig& c) {
  json doc;
  doc["seed"] = c.seed;
  doc["synth.n"] = c.synth_n;
  doc["synth.noise_sigma"] = c.synth_noise_sigma;
  doc["synth.overall_only_fraction"] = c.synth_overall_only_fraction;
  doc["synth.generator_seed"] = c.synth_generator_seed;
  doc["split.test_fraction"] = c.split_test_fraction;
  json fr = json::object();
  for (const auto& [src, q] : c.split_fractions) fr[src] = q;
  doc["split.fractions"] = std::move(fr);
  doc["model.features"] = c.model.backbone.features;
  doc["model.embed"] = c.model.backbone.embed;
  doc["model.hidden"] = c.model.backbone.hidden;
  doc["model.ffn_width"] = c.model.ffn_width;
  doc["stage1.lambda"] = c.stage1.lambda;
  doc["stage1.mu"] = c.stage1.mu;
  doc["stage1.learning_rate"] = c.stage1.learning_rate;
  doc["stage1.batch_size"] = c.stage1.batch_size;
  doc["stage1.epochs"] = c.stage1.epochs;
  doc["stage1.optimizer"] = std::string(optimizer_name(c.stage1.optimizer));
  doc["voter.hidden"] = c.voter.hidden;
  doc["voter.momentum"] = c.voter.momentum;
  doc["voter.epsilon"] = c.voter.epsilon;
  doc["voter.epochs"] = c.voter.epochs;
  doc["voter.learning_rate"] = c.voter.learning_rate;
  doc["voter.batch_size"] = c.voter.batch_size;
  doc["voter.optimizer"] = std::string(optimizer_name(c.voter.optimizer));
  doc["eval.subset"] = c.eval_subset;
  return doc.dump();
}

void run_synth(const RunConfig& config, const std::filesystem::path& out) {
  write_records(out, generate_records(config.synth_config()));
}

void run_ingest(const std::filesystem::path& records,
                const std::filesystem::path& out) {
  write_samples(out, build_samples(read_records(records)));
}

void run_genqa(const RunConfig& config, const std::filesystem::path& samples,
               const std::filesystem::path& out) {
  const std::vector<ScoredSample> all = read_samples(samples);
  std::mt19937_64 rng(config.split_seed());
  std::vector<QAPair> qa;
  qa.reserve(all.size());
  for (const ScoredSample& s : all) {
    const std::size_t count =
        (s.f == 0 ? overall_paraphrases() : conditional_paraphrases()).size();
    qa.push_back(make_qa(s, static_cast<std::size_t>(rng() % count)));
  }
  write_qa(out, qa);
}

void run_split(const RunConfig& config, const std::filesystem::path& samples,
               const std::filesystem::path& out) {
  const std::vector<ScoredSample> all = read_samples(samples);
  write_split(out, split_dataset(all, config.split_fractions, config.split_seed(),
                                 config.split_test_fraction));
}

void run_train(const RunConfig& config, const std::filesystem::path& samples,
               const std::filesystem::path& split, const std::filesystem::path& out,
               const ProgressFn& progress) {
  const std::vector<ScoredSample> all = read_samples(samples);
  const Split sp = read_split(split);
  const std::vector<ScoredSample> train = select_samples(all, sp.train_ids);
  ModelCheckpoint ckpt;
  ckpt.config_json = config_to_json(config);
  ckpt.model = train_stage1(train, config.stage1_config(), [&](const EpochStats& e) {
    if (progress) {
      progress("stage1 epoch " + std::to_string(e.epoch) +
               " mean loss " + std::to_string(e.mean_loss));
    }
  });
  save_checkpoint(ckpt, out);
}

void run_train_voter(const RunConfig& config, const std::filesystem::path& samples,
                     const std::filesystem::path& split,
                     const std::filesystem::path& model,
                     const std::filesystem::path& out) {
  const std::vector<ScoredSample> all = read_samples(samples);
  const Split sp = read_split(split);
  const std::vector<ScoredSample> train = select_samples(all, sp.train_ids);
  if (train.empty()) throw Error(Errc::kEmptyTrainingSet, "empty training split");
  ModelCheckpoint ckpt = load_checkpoint(model);
  const int f_size = ckpt.model.backbone.features();
  std::vector<VoterInput> inputs;
  std::vector<double> targets;
  inputs.reserve(train.size());
  targets.reserve(train.size());
  for (const ScoredSample& s : train) {
    const HeadScores h =
        score_heads(ckpt.model, derive_features(s.feature_seed, f_size), s.f);
    inputs.push_back({h.lm, h.reg, h.expert[index_of(Dimension::kOverallAesthetic)]});
    targets.push_back(s.overall());
  }
  ckpt.metavoter = train_metavoter(inputs, targets, config.voter_config());
  ckpt.config_json = config_to_json(config);
  save_checkpoint(ckpt, out);
}

void run_score(const std::filesystem::path& samples,
               const std::filesystem::path& model, bool fused,
               const std::filesystem::path& out) {
  const ModelCheckpoint ckpt = load_checkpoint(model);
  if (fused && !ckpt.metavoter) {
    throw Error(Errc::kMissingInput,
                "fused scoring needs a checkpoint with a trained MetaVoter");
  }
  const std::vector<ScoredSample> all = read_samples(samples);
  const int f_size = ckpt.model.backbone.features();
  std::vector<json> rows;
  rows.reserve(all.size());
  for (const ScoredSample& s : all) {
    HeadScores h = score_sample(ckpt, derive_features(s.feature_seed, f_size), s.f);
    if (!fused) h.fused.reset();
    rows.push_back(scores_row(s, h));
  }
  detail::write_jsonl(out, rows);
}

void run_eval(const RunConfig& config, const std::filesystem::path& samples,
              const std::filesystem::path& split,
              const std::filesystem::path& model,
              const std::filesystem::path& out) {
  const std::vector<ScoredSample> all = read_samples(samples);
  const Split sp = read_split(split);
  const std::vector<ScoredSample> eval_set = subset(all, sp, config.eval_subset);
  const ModelCheckpoint ckpt = load_checkpoint(model);
  const int f_size = ckpt.model.backbone.features();
  std::vector<HeadScores> preds;
  preds.reserve(eval_set.size());
  for (const ScoredSample& s : eval_set) {
    preds.push_back(score_sample(ckpt, derive_features(s.feature_seed, f_size), s.f));
  }
  EvalBundle bundle;
  bundle.config_json = config_to_json(config);
  for (HeadKind h : {HeadKind::kLm, HeadKind::kReg, HeadKind::kExpert}) {
    bundle.reports.push_back(evaluate(eval_set, preds, h));
  }
  if (ckpt.metavoter) {
    bundle.reports.push_back(evaluate(eval_set, preds, HeadKind::kMetaVoter));
  }
  write_report(out, bundle);
}

void run_report(const std::filesystem::path& report,
                const std::filesystem::path& out) {
  detail::write_text_file(out, report_to_text(read_report(report)));
}

}  // namespace hiaa
