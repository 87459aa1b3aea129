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

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "hiaa/checkpoint.hpp"
#include "hiaa/error.hpp"
#include "hiaa/metrics.hpp"
#include "hiaa/pipeline.hpp"
#include "hiaa/synth.hpp"
#include "support.hpp"

using namespace hiaa;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Errc code_of_call(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an hiaa::Error");
  return Errc::kConfigError;
}

ModelCheckpoint small_checkpoint(bool with_voter) {
  ModelConfig mc;
  mc.backbone = {5, 3, 7};
  mc.ffn_width = 3;
  ModelCheckpoint c;
  c.config_json = R"({"seed":1})";
  c.model = init_model(4, mc);
  c.model.reg.bias = 0.123456789012345678;
  if (with_voter) {
    MetaVoterConfig vc;
    vc.hidden = 5;
    c.metavoter = init_metavoter(vc);
    c.metavoter->bn1.running_mean.setConstant(0.3);
  }
  return c;
}

}  // namespace

TEST_CASE("checkpoint round trip is bit exact") {
  test::TempDir dir("ckpt");
  for (bool voter : {false, true}) {
    const ModelCheckpoint c = small_checkpoint(voter);
    save_checkpoint(c, dir / "m.json");
    const ModelCheckpoint back = load_checkpoint(dir / "m.json");
    CHECK(back.metavoter.has_value() == voter);
    CHECK(back.model.backbone.w1 == c.model.backbone.w1);
    CHECK(back.model.expert.overall.w1 == c.model.expert.overall.w1);
    CHECK(back.model.reg.bias == c.model.reg.bias);
    CHECK(back.config_json == c.config_json);
    if (voter) {
      CHECK(back.metavoter->bn1.running_mean == c.metavoter->bn1.running_mean);
      CHECK(back.metavoter->w2 == c.metavoter->w2);
    }
    CHECK(checkpoint_to_json(back) == checkpoint_to_json(c));
  }
}

TEST_CASE("checkpoint errors") {
  test::TempDir dir("ckpt-err");
  CHECK(code_of_call([&] { load_checkpoint(dir / "missing.json"); }) == Errc::kMissingInput);

  const std::string text = checkpoint_to_json(small_checkpoint(true));
  {
    std::ofstream(dir / "trunc.json") << text.substr(0, text.size() / 2);
  }
  CHECK(code_of_call([&] { load_checkpoint(dir / "trunc.json"); }) == Errc::kCorruptFile);

  std::string future = text;
  const auto pos = future.find("\"format_version\": 1");
  REQUIRE(pos != std::string::npos);
  future.replace(pos, 19, "\"format_version\": 2");
  CHECK(code_of_call([&] { checkpoint_from_json(future); }) == Errc::kVersionMismatch);

  ModelCheckpoint broken = small_checkpoint(false);
  broken.model.lm.bias = Vector::Zero(4);
  CHECK(code_of_call([&] { checkpoint_from_json(checkpoint_to_json(broken)); }) ==
        Errc::kCorruptFile);
}

TEST_CASE("score_sample adds the fused score only with a MetaVoter") {
  const ModelCheckpoint without = small_checkpoint(false);
  const ModelCheckpoint with = small_checkpoint(true);
  const Vector x = derive_features(3, 5);
  CHECK_FALSE(score_sample(without, x, 1).fused.has_value());
  const HeadScores h = score_sample(with, x, 1);
  REQUIRE(h.fused.has_value());
  CHECK(*h.fused == metavoter_forward(*with.metavoter, {h.lm, h.reg, h.expert[11]}));
}

TEST_CASE("synthetic generator") {
  SynthConfig c;
  c.n = 10;
  c.seed = 1;
  const auto a = generate_records(c);
  const auto b = generate_records(c);
  REQUIRE(a.size() == 10);
  test::TempDir dir("synth");
  write_records(dir / "a.jsonl", a);
  write_records(dir / "b.jsonl", b);
  CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));

  c.n = 200;
  c.noise_sigma = 0.0;
  const auto clean = generate_records(c);
  int manual = 0;
  for (const auto& r : clean) {
    if (!r.is_manual()) continue;
    ++manual;
    auto v = [&](Dimension d) { return r.rater_scores.at(d).front(); };
    double facial = 0.0;
    for (Dimension d : children(Dimension::kFacialAesthetic)) facial += v(d);
    CHECK(v(Dimension::kFacialAesthetic) == facial / 5.0);
    const double app = (v(Dimension::kOutfit) + v(Dimension::kBodyShape) + v(Dimension::kLooks)) / 3.0;
    CHECK(v(Dimension::kGeneralAppearanceAesthetic) == app);
    const double overall = (v(Dimension::kFacialAesthetic) + v(Dimension::kGeneralAppearanceAesthetic) +
                            v(Dimension::kEnvironment)) / 3.0;
    CHECK(v(Dimension::kOverallAesthetic) == doctest::Approx(overall).epsilon(1e-15));
  }
  CHECK(manual == 200 - 108);

  c.n = 108586;
  c.overall_only_fraction = 0.539;
  std::size_t overall_only = 0;
  for (const auto& r : generate_records(c)) overall_only += !r.is_manual();
  CHECK(overall_only == 58528);  // llround(0.539 * 108586)

  SynthConfig bad;
  bad.n = 0;
  CHECK_THROWS_AS(generate_records(bad), Error);
}

TEST_CASE("synthetic records ingest cleanly") {
  SynthConfig c;
  c.n = 300;
  const auto samples = build_samples(generate_records(c));
  int f0 = 0;
  for (const auto& s : samples) f0 += s.f == 0;
  CHECK(f0 == 162);
}

TEST_CASE("run configuration parsing") {
  const RunConfig d = config_from_json("{}");
  CHECK(d.seed == 0);
  CHECK(d.stage1.epochs == 1);
  CHECK(d.voter.epochs == 10);
  const RunConfig c = config_from_json(
      R"({"seed": 5, "stage1.epochs": 3, "voter.optimizer": "sgd",
          "split.fractions": {"ava": 0.25}, "model.hidden": 12})");
  CHECK(c.seed == 5);
  CHECK(c.stage1_seed() == 8);
  CHECK(c.stage1_config().seed == 8);
  CHECK(c.stage1_config().model.backbone.hidden == 12);
  CHECK(c.voter_config().seed == 9);
  CHECK(c.synth_config().seed == 6);
  CHECK(c.split_seed() == 7);
  CHECK(c.voter.optimizer == OptimizerKind::kSgd);
  CHECK(c.split_fractions.at("ava") == 0.25);

  const RunConfig again = config_from_json(config_to_json(c));
  CHECK(config_to_json(again) == config_to_json(c));

  CHECK(code_of_call([] { config_from_json(R"({"stage1.epoch": 3})"); }) == Errc::kConfigError);
  CHECK(code_of_call([] { config_from_json(R"({"stage1.epochs": "3"})"); }) == Errc::kConfigError);
  CHECK(code_of_call([] { config_from_json(R"({"stage1.epochs": 0})"); }) == Errc::kConfigError);
  CHECK(code_of_call([] { config_from_json(R"({"seed": -1})"); }) == Errc::kConfigError);
  CHECK(code_of_call([] { config_from_json("[1]"); }) == Errc::kConfigError);
  CHECK(code_of_call([] { config_from_json("{"); }) == Errc::kConfigError);
  CHECK(code_of_call([] { config_from_json(R"({"stage1.optimizer": "rmsprop"})"); }) ==
        Errc::kConfigError);
}

TEST_CASE("pipeline commands end to end") {
  test::TempDir dir("pipe");
  RunConfig cfg = config_from_json(R"({"seed": 3, "synth.n": 240, "model.hidden": 16,
                                       "stage1.epochs": 2, "voter.epochs": 2})");
  run_synth(cfg, dir / "rec.jsonl");
  run_ingest(dir / "rec.jsonl", dir / "s.jsonl");
  run_genqa(cfg, dir / "s.jsonl", dir / "qa.jsonl");
  run_split(cfg, dir / "s.jsonl", dir / "split.json");
  run_train(cfg, dir / "s.jsonl", dir / "split.json", dir / "m.json");

  const std::string records_before = slurp(dir / "rec.jsonl");
  const std::string samples_before = slurp(dir / "s.jsonl");

  CHECK(code_of_call([&] { run_score(dir / "s.jsonl", dir / "m.json", true, dir / "f.jsonl"); }) ==
        Errc::kMissingInput);
  CHECK_FALSE(std::filesystem::exists(dir / "f.jsonl"));
  run_score(dir / "s.jsonl", dir / "m.json", false, dir / "scores.jsonl");
  CHECK(std::filesystem::file_size(dir / "scores.jsonl") > 0);

  run_train_voter(cfg, dir / "s.jsonl", dir / "split.json", dir / "m.json", dir / "mv.json");
  run_score(dir / "s.jsonl", dir / "mv.json", true, dir / "f.jsonl");
  CHECK(slurp(dir / "f.jsonl").find("\"fused\"") != std::string::npos);

  run_eval(cfg, dir / "s.jsonl", dir / "split.json", dir / "mv.json", dir / "r.json");
  const EvalBundle b = read_report(dir / "r.json");
  REQUIRE(b.reports.size() == 4);
  CHECK(b.reports[3].head == "metavoter");
  CHECK(config_from_json(b.config_json).seed == 3);
  CHECK(load_checkpoint(dir / "mv.json").config_json == config_to_json(cfg));

  run_eval(cfg, dir / "s.jsonl", dir / "split.json", dir / "mv.json", dir / "r2.json");
  CHECK(slurp(dir / "r.json") == slurp(dir / "r2.json"));

  run_report(dir / "r.json", dir / "r.txt");
  CHECK(slurp(dir / "r.txt").find("[metavoter]") != std::string::npos);

  CHECK(slurp(dir / "rec.jsonl") == records_before);
  CHECK(slurp(dir / "s.jsonl") == samples_before);

  CHECK(code_of_call([&] { run_ingest(dir / "nope.jsonl", dir / "x.jsonl"); }) ==
        Errc::kMissingInput);
}
