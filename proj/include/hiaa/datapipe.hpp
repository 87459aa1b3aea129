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

#ifndef HIAA_DATAPIPE_HPP_
#define HIAA_DATAPIPE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hiaa/taxonomy.hpp"

namespace hiaa {

inline constexpr int kMinRaters = 9;
inline constexpr double kDefaultTestFraction = 0.1334;
inline constexpr const char* kManualSource = "manual";

// One image's raw annotation. Manual records carry per-rater scores for all
// twelve dimensions; source-dataset records carry a single raw overall score
// on the source's native scale.
struct AnnotationRecord {
  std::string sample_id;
  std::string source;
  std::map<Dimension, std::vector<double>> rater_scores;
  std::optional<double> raw_overall;
  std::int64_t feature_seed = 0;

  bool is_manual() const { return !raw_overall.has_value(); }
};

// A normalized record. f == 0: overall only; f == 1: all twelve dimensions.
struct ScoredSample {
  std::string sample_id;
  std::string source;
  int f = 0;
  std::map<Dimension, double> scores;
  std::map<Dimension, RatingLevel> levels;
  std::int64_t feature_seed = 0;

  double overall() const { return scores.at(Dimension::kOverallAesthetic); }
};

struct QAPair {
  std::string sample_id;
  std::string question;
  std::string answer;
  std::vector<std::pair<Dimension, RatingLevel>> slot_levels;
};

struct Split {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::uint64_t seed = 0;
  std::map<std::string, double> fractions;
};

std::vector<double> minmax_normalize(std::span<const double> raw);

double aggregate_mos(std::span<const double> rater_scores);

// Validates the record invariants; throws Error(kInvalidRecord).
void validate_record(const AnnotationRecord& record);

// Normalizes source-dataset records per source tag and aggregates manual
// records into twelve-dimension MOS. Output order follows input order.
std::vector<ScoredSample> build_samples(
    std::span<const AnnotationRecord> records);

// Drops records for which keep(record) is false; stand-in for the face
// filtration step.
std::vector<AnnotationRecord> filter_records(
    std::span<const AnnotationRecord> records,
    const std::function<bool(const AnnotationRecord&)>& keep);

std::span<const std::string_view> overall_paraphrases();
std::span<const std::string_view> conditional_paraphrases();

QAPair make_qa(const ScoredSample& sample, std::size_t paraphrase_index);

// Inverse of the answer template. f selects the expected shape.
std::vector<std::pair<Dimension, RatingLevel>> parse_answer(
    const std::string& answer, int f);

// Seeded per-source shuffle then split; test count per source is
// round(fraction * source size). Sources missing from the map use
// default_fraction.
Split split_dataset(std::span<const ScoredSample> samples,
                    const std::map<std::string, double>& test_fraction_per_source,
                    std::uint64_t seed,
                    double default_fraction = kDefaultTestFraction);

// Selects samples by id, preserving the id list's order.
std::vector<ScoredSample> select_samples(std::span<const ScoredSample> samples,
                                         std::span<const std::string> ids);

// File formats. Readers throw Error(kMissingInput) for absent files and
// Error(kCorruptFile) for malformed content.
std::vector<AnnotationRecord> read_records(const std::filesystem::path& path);
void write_records(const std::filesystem::path& path,
                   std::span<const AnnotationRecord> records);
std::vector<ScoredSample> read_samples(const std::filesystem::path& path);
void write_samples(const std::filesystem::path& path,
                   std::span<const ScoredSample> samples);
void write_qa(const std::filesystem::path& path, std::span<const QAPair> qa);
std::vector<QAPair> read_qa(const std::filesystem::path& path);
Split read_split(const std::filesystem::path& path);
void write_split(const std::filesystem::path& path, const Split& split);

}  // namespace hiaa

#endif  // HIAA_DATAPIPE_HPP_
