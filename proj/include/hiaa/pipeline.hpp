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

#ifndef HIAA_PIPELINE_HPP_
#define HIAA_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>

#include "hiaa/metavoter.hpp"
#include "hiaa/synth.hpp"
#include "hiaa/trainer.hpp"

namespace hiaa {

// Fully resolved run configuration. Serialized as a flat JSON object of
// dotted keys ("stage1.epochs", "voter.hidden", ...). One master seed
// derives every module seed through fixed offsets.
struct RunConfig {
  std::uint64_t seed = 0;

  int synth_n = 1000;
  double synth_noise_sigma = 0.02;
  double synth_overall_only_fraction = 0.54;
  std::uint64_t synth_generator_seed = 20240101;

  double split_test_fraction = kDefaultTestFraction;
  std::map<std::string, double> split_fractions;

  ModelConfig model;
  Stage1Config stage1;
  MetaVoterConfig voter;

  std::string eval_subset = "test";  // test | train | all

  std::uint64_t synth_seed() const { return seed + 1; }
  std::uint64_t split_seed() const { return seed + 2; }
  std::uint64_t stage1_seed() const { return seed + 3; }
  std::uint64_t voter_seed() const { return seed + 4; }

  SynthConfig synth_config() const;
  Stage1Config stage1_config() const;
  MetaVoterConfig voter_config() const;

  void validate() const;
};

// Throws Error(kConfigError) for unknown keys or ill-typed values.
RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& config);

using ProgressFn = std::function<void(const std::string&)>;

void run_synth(const RunConfig& config, const std::filesystem::path& out);
void run_ingest(const std::filesystem::path& records,
                const std::filesystem::path& out);
void run_genqa(const RunConfig& config, const std::filesystem::path& samples,
               const std::filesystem::path& out);
void run_split(const RunConfig& config, const std::filesystem::path& samples,
               const std::filesystem::path& out);
void run_train(const RunConfig& config, const std::filesystem::path& samples,
               const std::filesystem::path& split, const std::filesystem::path& out,
               const ProgressFn& progress = {});
void run_train_voter(const RunConfig& config, const std::filesystem::path& samples,
                     const std::filesystem::path& split,
                     const std::filesystem::path& model,
                     const std::filesystem::path& out);
// Fused scoring requires a checkpoint with a MetaVoter section
// (Error(kMissingInput) otherwise, before anything is written).
void run_score(const std::filesystem::path& samples,
               const std::filesystem::path& model, bool fused,
               const std::filesystem::path& out);
void run_eval(const RunConfig& config, const std::filesystem::path& samples,
              const std::filesystem::path& split,
              const std::filesystem::path& model,
              const std::filesystem::path& out);
void run_report(const std::filesystem::path& report,
                const std::filesystem::path& out);

}  // namespace hiaa

#endif  // HIAA_PIPELINE_HPP_
