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

// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hiaa/hiaa.h"

namespace {

using json = nlohmann::ordered_json;

struct Failure {
  hiaa_status status;
  std::string category;
  std::string message;
};

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  }
  return s;
}

int report_failure(const Failure& f) {
  std::cerr << "error\t" << hiaa_status_name(f.status) << '\t' << f.category << '\t'
            << one_line(f.message) << '\n';
  return static_cast<int>(f.status);
}

void check(hiaa_status st) {
  if (st != HIAA_OK) throw Failure{st, hiaa_last_error_category(), hiaa_last_error()};
}

// Scalar overrides parse as JSON when possible ("3", "0.5", "\"adam\"") and
// fall back to a plain string otherwise ("adam").
json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  std::string out;
};

class Overrides {
 public:
  void add(const std::string& key, json value) { values_.emplace_back(key, std::move(value)); }

  std::string resolve(const Globals& g) const {
    json doc = json::object();
    if (!g.config_path.empty()) {
      std::ifstream in(g.config_path, std::ios::binary);
      if (!in) {
        throw Failure{HIAA_ERR_MISSING_INPUT, "MissingInput",
                      "cannot open config file " + g.config_path};
      }
      std::stringstream buf;
      buf << in.rdbuf();
      try {
        doc = json::parse(buf.str());
      } catch (const json::parse_error& e) {
        throw Failure{HIAA_ERR_CONFIG, "ConfigError",
                      "config file is not valid JSON: " + std::string(e.what())};
      }
      if (!doc.is_object()) {
        throw Failure{HIAA_ERR_CONFIG, "ConfigError", "config file must hold a JSON object"};
      }
    }
    for (const std::string& kv : g.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Failure{HIAA_ERR_CONFIG, "ConfigError", "--set expects key=value, got " + kv};
      }
      doc[kv.substr(0, eq)] = parse_value(kv.substr(eq + 1));
    }
    for (const auto& [key, value] : values_) doc[key] = value;
    if (g.seed) doc["seed"] = *g.seed;

    char* resolved = nullptr;
    check(hiaa_config_resolve(doc.dump().c_str(), &resolved));
    std::string out(resolved);
    hiaa_string_free(resolved);
    return out;
  }

 private:
  std::vector<std::pair<std::string, json>> values_;
};

template <typename T>
void bind_override(CLI::App* cmd, Overrides& ov, std::vector<std::function<void()>>& hooks,
                   const std::string& flag, const std::string& key,
                   const std::string& help) {
  auto holder = std::make_shared<std::optional<T>>();
  cmd->add_option_function<T>(flag, [holder](const T& v) { *holder = v; }, help);
  hooks.push_back([holder, &ov, key] {
    if (*holder) ov.add(key, json(**holder));
  });
}

const std::string& need_out(const Globals& g) {
  if (g.out.empty()) throw Failure{HIAA_ERR_CONFIG, "ConfigError", "--out is required"};
  return g.out;
}

void print_progress(const char* message, void*) { std::cerr << message << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human image aesthetic assessment: data, training and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "JSON configuration file (flat dotted keys)");
  app.add_option("--seed", g.seed, "master seed; overrides the config key 'seed'");
  app.add_option("--set", g.sets, "override any config key: --set stage1.epochs=5");
  app.add_option("--out", g.out, "output path");

  Overrides ov;
  std::vector<std::function<void()>> hooks;
  std::string records, samples, split, model, report;
  bool fused = false;
  bool verbose = false;
  app.add_flag("--verbose", verbose, "print training progress to stderr");

  auto* synth = app.add_subcommand("synth", "generate synthetic annotation records");
  bind_override<int>(synth, ov, hooks, "--n", "synth.n", "number of records");
  bind_override<double>(synth, ov, hooks, "--noise-sigma", "synth.noise_sigma",
                        "observation noise");
  bind_override<double>(synth, ov, hooks, "--overall-only-fraction",
                        "synth.overall_only_fraction", "fraction of overall-only records");

  auto* ingest = app.add_subcommand("ingest", "normalize records into scored samples");
  ingest->add_option("--records", records, "annotation records (JSONL)")->required();

  auto* genqa = app.add_subcommand("genqa", "build question/answer pairs");
  genqa->add_option("--samples", samples, "scored samples (JSONL)")->required();

  auto* split_cmd = app.add_subcommand("split", "per-source train/test split");
  split_cmd->add_option("--samples", samples, "scored samples (JSONL)")->required();
  bind_override<double>(split_cmd, ov, hooks, "--test-fraction", "split.test_fraction",
                        "default test fraction per source");

  auto* train = app.add_subcommand("train", "stage-1 training of backbone and heads");
  train->add_option("--samples", samples, "scored samples (JSONL)")->required();
  train->add_option("--split", split, "split file (JSON)")->required();
  bind_override<int>(train, ov, hooks, "--epochs", "stage1.epochs", "training epochs");
  bind_override<double>(train, ov, hooks, "--lr", "stage1.learning_rate", "learning rate");
  bind_override<int>(train, ov, hooks, "--batch-size", "stage1.batch_size", "batch size");
  bind_override<double>(train, ov, hooks, "--lambda", "stage1.lambda",
                        "regression loss weight");
  bind_override<double>(train, ov, hooks, "--mu", "stage1.mu", "expert loss weight");
  bind_override<std::string>(train, ov, hooks, "--optimizer", "stage1.optimizer",
                             "adam or sgd");

  auto* voter = app.add_subcommand("train-voter", "stage-2 MetaVoter training");
  voter->add_option("--samples", samples, "scored samples (JSONL)")->required();
  voter->add_option("--split", split, "split file (JSON)")->required();
  voter->add_option("--model", model, "stage-1 checkpoint")->required();
  bind_override<int>(voter, ov, hooks, "--epochs", "voter.epochs", "training epochs");
  bind_override<double>(voter, ov, hooks, "--lr", "voter.learning_rate", "learning rate");

  auto* score = app.add_subcommand("score", "score samples with a checkpoint");
  score->add_option("--samples", samples, "scored samples (JSONL)")->required();
  score->add_option("--model", model, "checkpoint")->required();
  score->add_flag("--fused", fused, "include the MetaVoter score");

  auto* eval = app.add_subcommand("eval", "metrics report for every head");
  eval->add_option("--samples", samples, "scored samples (JSONL)")->required();
  eval->add_option("--split", split, "split file (JSON)")->required();
  eval->add_option("--model", model, "checkpoint")->required();
  bind_override<std::string>(eval, ov, hooks, "--subset", "eval.subset",
                             "test, train or all");

  auto* report_cmd = app.add_subcommand("report", "render a metrics report as a table");
  report_cmd->add_option("--report", report, "report produced by eval")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_failure({HIAA_ERR_CONFIG, "ConfigError", e.what()});
  }

  try {
    for (auto& hook : hooks) hook();
    const std::string config = ov.resolve(g);
    const char* cfg = config.c_str();

    if (synth->parsed()) {
      check(hiaa_cmd_synth(cfg, need_out(g).c_str()));
    } else if (ingest->parsed()) {
      check(hiaa_cmd_ingest(records.c_str(), need_out(g).c_str()));
    } else if (genqa->parsed()) {
      check(hiaa_cmd_genqa(cfg, samples.c_str(), need_out(g).c_str()));
    } else if (split_cmd->parsed()) {
      check(hiaa_cmd_split(cfg, samples.c_str(), need_out(g).c_str()));
    } else if (train->parsed()) {
      check(hiaa_cmd_train(cfg, samples.c_str(), split.c_str(), need_out(g).c_str(),
                           verbose ? print_progress : nullptr, nullptr));
    } else if (voter->parsed()) {
      check(hiaa_cmd_train_voter(cfg, samples.c_str(), split.c_str(), model.c_str(),
                                 need_out(g).c_str()));
    } else if (score->parsed()) {
      check(hiaa_cmd_score(samples.c_str(), model.c_str(), fused ? 1 : 0,
                           need_out(g).c_str()));
    } else if (eval->parsed()) {
      check(hiaa_cmd_eval(cfg, samples.c_str(), split.c_str(), model.c_str(),
                          need_out(g).c_str()));
    } else if (report_cmd->parsed()) {
      check(hiaa_cmd_report(report.c_str(), need_out(g).c_str()));
    }
  } catch (const Failure& f) {
    return report_failure(f);
  }
  return 0;
}
