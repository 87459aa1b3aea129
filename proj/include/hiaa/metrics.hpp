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

#ifndef HIAA_METRICS_HPP_
#define HIAA_METRICS_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hiaa/datapipe.hpp"
#include "hiaa/heads.hpp"
#include "hiaa/taxonomy.hpp"

namespace hiaa {

struct RegressionMetrics {
  double mse = 0.0;
  double mae = 0.0;
};

// Correlations are std::nullopt ("undefined") when either input is constant.
struct CorrelationMetrics {
  std::optional<double> plcc;
  std::optional<double> srcc;
  std::optional<double> krcc;
};

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
};

RegressionMetrics regression_metrics(std::span<const double> pred,
                                     std::span<const double> gt);

// Pearson, Spearman (mean ranks for ties) and Kendall tau-b. Needs at least
// three pairs.
CorrelationMetrics correlation_metrics(std::span<const double> pred,
                                       std::span<const double> gt);

std::optional<double> pearson(std::span<const double> a, std::span<const double> b);
std::optional<double> spearman(std::span<const double> a, std::span<const double> b);
// O(n log n) tau-b via merge-sort discordance counting.
std::optional<double> kendall_tau_b(std::span<const double> a,
                                    std::span<const double> b);
// 1-based ranks; tied values share their mean rank.
std::vector<double> average_ranks(std::span<const double> v);

// Macro averages always divide by the five rating classes; a class with a
// zero precision/recall denominator contributes 0.
ClassificationMetrics classification_metrics(std::span<const RatingLevel> pred,
                                             std::span<const RatingLevel> gt);

enum class HeadKind { kLm, kReg, kExpert, kMetaVoter };

std::string_view head_name(HeadKind head);
std::optional<HeadKind> head_from_name(std::string_view s);

struct TargetMetrics {
  std::size_t n = 0;
  RegressionMetrics regression;
  CorrelationMetrics correlation;
  ClassificationMetrics classification;
};

struct MetricsRow {
  std::string target;  // dimension name or "overall"
  TargetMetrics metrics;
};

struct MetricsReport {
  std::string head;
  std::size_t n = 0;
  std::vector<MetricsRow> rows;

  const MetricsRow* find(std::string_view target) const;
};

// Evaluates one head. The "overall" row covers every sample; the twelve
// dimension rows (LM and expert heads only) cover f == 1 samples.
// Predicted levels come from rating_from_score on clamped scores.
MetricsReport evaluate(std::span<const ScoredSample> samples,
                       std::span<const HeadScores> predictions, HeadKind head);

// A bundle of per-head reports plus the resolved configuration.
struct EvalBundle {
  std::string config_json;  // serialized config echo, may be empty
  std::vector<MetricsReport> reports;
};

std::string report_to_json(const EvalBundle& bundle);
EvalBundle report_from_json(const std::string& text);
void write_report(const std::filesystem::path& path, const EvalBundle& bundle);
EvalBundle read_report(const std::filesystem::path& path);

// Aligned plain-text tables: one block per head, dimension columns grouped
// facial / general appearance / environment / overall.
std::string report_to_text(const EvalBundle& bundle);

}  // namespace hiaa

#endif  // HIAA_METRICS_HPP_
