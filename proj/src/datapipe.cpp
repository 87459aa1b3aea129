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

#include "hiaa/datapipe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "hiaa/error.hpp"
#include "json_io.hpp"

namespace hiaa {
namespace {

using detail::json;

constexpr std::array<std::string_view, 8> kOverallQuestions = {
    "Rate the aesthetics of this human picture.",
    "How would you rate the aesthetics of this human image?",
    "What is your aesthetic rating of the person in this picture?",
    "Can you judge the aesthetic quality of this human photo?",
    "How aesthetically pleasing is this picture of a person?",
    "Please give an aesthetic rating for this human image.",
    "What do you think of the aesthetics of this portrait?",
    "Evaluate the overall aesthetics of the human in this image.",
};

constexpr std::array<std::string_view, 8> kConditionalQuestions = {
    "Can you evaluate the aesthetics of the human image from 12 different "
    "dimensions?",
    "Rate this human picture on each of the 12 aesthetic dimensions.",
    "Please assess the aesthetics of this person across all 12 dimensions.",
    "How does this human image score on the 12-dimensional aesthetic "
    "standard?",
    "Give a rating level for each of the 12 aesthetic dimensions of this "
    "picture.",
    "Evaluate the facial, general appearance and environment aesthetics of "
    "this human image in 12 dimensions.",
    "Break down the aesthetics of this human photo into its 12 dimensions "
    "and rate each.",
    "What are the 12 fine-grained aesthetic ratings of this human image?",
};

constexpr std::string_view kOverallPrefix = "The aesthetics of the image is ";

bool is_finite_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

RatingLevel parse_level_word(std::string_view word) {
  auto z = level_from_name(word);
  if (!z) {
    throw Error(Errc::kCorruptFile,
                "unknown rating level '" + std::string(word) + "'");
  }
  return *z;
}

template <typename T>
T get_field(const json& row, const char* key, const std::string& where) {
  auto it = row.find(key);
  if (it == row.end()) {
    throw Error(Errc::kCorruptFile, where + ": missing field '" + key + "'");
  }
  try {
    return it->template get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::kCorruptFile,
                where + ": bad field '" + key + "': " + e.what());
  }
}

}  // namespace

std::vector<double> minmax_normalize(std::span<const double> raw) {
  if (raw.size() < 2) {
    throw Error(Errc::kTooFewValues,
                "min-max normalization needs at least 2 values");
  }
  for (double v : raw) {
    if (!std::isfinite(v)) {
      throw Error(Errc::kNonFiniteInput, "non-finite raw score");
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    throw Error(Errc::kDegenerateRange,
                "all raw scores equal " + std::to_string(lo));
  }
  std::vector<double> out;
  out.reserve(raw.size());
  for (double v : raw) out.push_back((v - lo) / (hi - lo));
  return out;
}

double aggregate_mos(std::span<const double> rater_scores) {
  if (rater_scores.empty()) {
    throw Error(Errc::kEmptyRaterList, "no rater scores");
  }
  double sum = 0.0;
  for (double v : rater_scores) {
    if (!is_finite_unit(v)) {
      throw Error(Errc::kOutOfRange, "rater score outside [0,1]");
    }
    sum += v;
  }
  return sum / static_cast<double>(rater_scores.size());
}

void validate_record(const AnnotationRecord& r) {
  const std::string where = "record '" + r.sample_id + "'";
  if (r.sample_id.empty()) {
    throw Error(Errc::kInvalidRecord, "record with empty sample_id");
  }
  if (r.source.empty()) {
    throw Error(Errc::kInvalidRecord, where + ": empty source");
  }
  if (!r.is_manual()) {
    if (!r.rater_scores.empty()) {
      throw Error(Errc::kInvalidRecord,
                  where + ": carries both raw_overall and rater_scores");
    }
    if (!std::isfinite(*r.raw_overall)) {
      throw Error(Errc::kInvalidRecord, where + ": non-finite raw_overall");
    }
    return;
  }
  for (Dimension d : kAllDimensions) {
    auto it = r.rater_scores.find(d);
    if (it == r.rater_scores.end()) {
      throw Error(Errc::kInvalidRecord,
                  where + ": missing dimension " + std::string(name(d)));
    }
    if (it->second.size() < static_cast<std::size_t>(kMinRaters)) {
      throw Error(Errc::kInvalidRecord,
                  where + ": fewer than 9 raters for " + std::string(name(d)));
    }
    for (double v : it->second) {
      if (!is_finite_unit(v)) {
        throw Error(Errc::kInvalidRecord,
                    where + ": rater score outside [0,1] for " +
                        std::string(name(d)));
      }
    }
  }
}

std::vector<ScoredSample> build_samples(
    std::span<const AnnotationRecord> records) {
  std::set<std::string> seen;
  for (const AnnotationRecord& r : records) {
    validate_record(r);
    if (!seen.insert(r.sample_id).second) {
      throw Error(Errc::kInvalidRecord, "duplicate sample_id " + r.sample_id);
    }
  }

  // Phase one: collect each source's raw scores so extrema are known before
  // any record of that source is mapped.
  std::map<std::string, std::vector<std::size_t>> by_source;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].is_manual()) by_source[records[i].source].push_back(i);
  }
  std::unordered_map<std::size_t, double> normalized;
  for (const auto& [source, idx] : by_source) {
    std::vector<double> raw;
    raw.reserve(idx.size());
    for (std::size_t i : idx) raw.push_back(*records[i].raw_overall);
    std::vector<double> norm;
    try {
      norm = minmax_normalize(raw);
    } catch (const Error& e) {
      throw Error(e.code(), "source '" + source + "': " + e.what());
    }
    for (std::size_t k = 0; k < idx.size(); ++k) normalized[idx[k]] = norm[k];
  }

  std::vector<ScoredSample> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const AnnotationRecord& r = records[i];
    ScoredSample s;
    s.sample_id = r.sample_id;
    s.source = r.source;
    s.feature_seed = r.feature_seed;
    if (r.is_manual()) {
      s.f = 1;
      for (Dimension d : kAllDimensions) {
        s.scores[d] = aggregate_mos(r.rater_scores.at(d));
      }
    } else {
      s.f = 0;
      s.scores[Dimension::kOverallAesthetic] = normalized.at(i);
    }
    for (const auto& [d, v] : s.scores) s.levels[d] = rating_from_score(v);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<AnnotationRecord> filter_records(
    std::span<const AnnotationRecord> records,
    const std::function<bool(const AnnotationRecord&)>& keep) {
  std::vector<AnnotationRecord> out;
  for (const AnnotationRecord& r : records) {
    if (keep(r)) out.push_back(r);
  }
  return out;
}

std::span<const std::string_view> overall_paraphrases() {
  return kOverallQuestions;
}

std::span<const std::string_view> conditional_paraphrases() {
  return kConditionalQuestions;
}

QAPair make_qa(const ScoredSample& sample, std::size_t paraphrase_index) {
  const auto questions =
      sample.f == 0 ? overall_paraphrases() : conditional_paraphrases();
  if (paraphrase_index >= questions.size()) {
    throw Error(Errc::kIndexOutOfRange,
                "paraphrase index " + std::to_string(paraphrase_index) +
                    " >= " + std::to_string(questions.size()));
  }
  QAPair qa;
  qa.sample_id = sample.sample_id;
  qa.question = std::string(questions[paraphrase_index]);
  if (sample.f == 0) {
    const RatingLevel z = sample.levels.at(Dimension::kOverallAesthetic);
    qa.slot_levels.emplace_back(Dimension::kOverallAesthetic, z);
    qa.answer = std::string(kOverallPrefix) + std::string(level_name(z)) + ".";
  } else if (sample.f == 1) {
    for (Dimension d : kAllDimensions) {
      const RatingLevel z = sample.levels.at(d);
      qa.slot_levels.emplace_back(d, z);
      if (!qa.answer.empty()) qa.answer += '\n';
      qa.answer += std::string(display_name(d)) + ": " +
                   std::string(level_name(z));
    }
  } else {
    throw Error(Errc::kBadFlag, "sample " + sample.sample_id + " has f=" +
                                    std::to_string(sample.f));
  }
  return qa;
}

std::vector<std::pair<Dimension, RatingLevel>> parse_answer(
    const std::string& answer, int f) {
  std::vector<std::pair<Dimension, RatingLevel>> out;
  if (f == 0) {
    std::string_view a = answer;
    if (!a.starts_with(kOverallPrefix) || !a.ends_with(".")) {
      throw Error(Errc::kCorruptFile, "not an overall answer: " + answer);
    }
    a.remove_prefix(kOverallPrefix.size());
    a.remove_suffix(1);
    out.emplace_back(Dimension::kOverallAesthetic, parse_level_word(a));
    return out;
  }
  if (f != 1) throw Error(Errc::kBadFlag, "f must be 0 or 1");
  std::istringstream lines(answer);
  std::string line;
  std::size_t slot = 0;
  while (std::getline(lines, line)) {
    if (slot >= kAllDimensions.size()) {
      throw Error(Errc::kCorruptFile, "more than 12 answer lines");
    }
    const Dimension d = kAllDimensions[slot];
    const std::string label = std::string(display_name(d)) + ": ";
    if (!std::string_view(line).starts_with(label)) {
      throw Error(Errc::kCorruptFile, "expected '" + label + "' in: " + line);
    }
    out.emplace_back(d, parse_level_word(std::string_view(line).substr(label.size())));
    ++slot;
  }
  if (slot != kAllDimensions.size()) {
    throw Error(Errc::kCorruptFile, "expected 12 answer lines");
  }
  return out;
}

Split split_dataset(std::span<const ScoredSample> samples,
                    const std::map<std::string, double>& fractions,
                    std::uint64_t seed, double default_fraction) {
  if (samples.empty()) throw Error(Errc::kEmpty, "no samples to split");
  auto check = [](const std::string& src, double q) {
    if (!(q > 0.0 && q < 1.0)) {
      throw Error(Errc::kBadFraction, "test fraction for '" + src +
                                          "' must lie in (0,1), got " +
                                          std::to_string(q));
    }
  };
  check("<default>", default_fraction);
  for (const auto& [src, q] : fractions) check(src, q);

  std::map<std::string, std::vector<std::size_t>> by_source;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    by_source[samples[i].source].push_back(i);
  }

  Split split;
  split.seed = seed;
  std::vector<bool> in_test(samples.size(), false);
  for (auto& [source, idx] : by_source) {
    auto it = fractions.find(source);
    const double q = it == fractions.end() ? default_fraction : it->second;
    split.fractions[source] = q;
    std::mt19937_64 rng(seed ^ fnv1a(source));
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_test = static_cast<std::size_t>(
        std::llround(q * static_cast<double>(idx.size())));
    for (std::size_t k = 0; k < n_test; ++k) in_test[idx[k]] = true;
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (in_test[i] ? split.test_ids : split.train_ids)
        .push_back(samples[i].sample_id);
  }
  return split;
}

std::vector<ScoredSample> select_samples(std::span<const ScoredSample> samples,
                                         std::span<const std::string> ids) {
  std::unordered_map<std::string_view, const ScoredSample*> index;
  for (const ScoredSample& s : samples) index[s.sample_id] = &s;
  std::vector<ScoredSample> out;
  out.reserve(ids.size());
  for (const std::string& id : ids) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw Error(Errc::kMissingInput, "sample '" + id + "' not found");
    }
    out.push_back(*it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::vector<AnnotationRecord> read_records(const std::filesystem::path& path) {
  std::vector<AnnotationRecord> out;
  std::size_t lineno = 0;
  for (const json& row : detail::read_jsonl(path)) {
    ++lineno;
    const std::string where = path.string() + " record " + std::to_string(lineno);
    if (!row.is_object()) throw Error(Errc::kCorruptFile, where + ": not an object");
    AnnotationRecord r;
    r.sample_id = get_field<std::string>(row, "sample_id", where);
    r.source = get_field<std::string>(row, "source", where);
    r.feature_seed = get_field<std::int64_t>(row, "feature_seed", where);
    const bool has_raw = row.contains("raw_overall");
    const bool has_raters = row.contains("rater_scores");
    if (has_raw == has_raters) {
      throw Error(Errc::kCorruptFile,
                  where + ": exactly one of raw_overall / rater_scores required");
    }
    if (has_raw) {
      r.raw_overall = get_field<double>(row, "raw_overall", where);
    } else {
      const json& rs = row.at("rater_scores");
      if (!rs.is_object()) {
        throw Error(Errc::kCorruptFile, where + ": rater_scores not an object");
      }
      for (const auto& [key, values] : rs.items()) {
        auto d = dimension_from_name(key);
        if (!d) throw Error(Errc::kCorruptFile, where + ": unknown dimension " + key);
        try {
          r.rater_scores[*d] = values.get<std::vector<double>>();
        } catch (const json::exception& e) {
          throw Error(Errc::kCorruptFile, where + ": " + e.what());
        }
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_records(const std::filesystem::path& path,
                   std::span<const AnnotationRecord> records) {
  std::vector<json> rows;
  rows.reserve(records.size());
  for (const AnnotationRecord& r : records) {
    json row;
    row["sample_id"] = r.sample_id;
    row["source"] = r.source;
    row["feature_seed"] = r.feature_seed;
    if (r.raw_overall) {
      row["raw_overall"] = *r.raw_overall;
    } else {
      json rs = json::object();
      for (const auto& [d, v] : r.rater_scores) rs[std::string(name(d))] = v;
      row["rater_scores"] = std::move(rs);
    }
    rows.push_back(std::move(row));
  }
  detail::write_jsonl(path, rows);
}

std::vector<ScoredSample> read_samples(const std::filesystem::path& path) {
  std::vector<ScoredSample> out;
  std::size_t lineno = 0;
  for (const json& row : detail::read_jsonl(path)) {
    ++lineno;
    const std::string where = path.string() + " sample " + std::to_string(lineno);
    ScoredSample s;
    s.sample_id = get_field<std::string>(row, "sample_id", where);
    s.source = get_field<std::string>(row, "source", where);
    s.f = get_field<int>(row, "f", where);
    s.feature_seed = get_field<std::int64_t>(row, "feature_seed", where);
    const auto scores = get_field<std::map<std::string, double>>(row, "scores", where);
    for (const auto& [key, v] : scores) {
      auto d = dimension_from_name(key);
      if (!d || !is_finite_unit(v)) {
        throw Error(Errc::kCorruptFile, where + ": bad score entry " + key);
      }
      s.scores[*d] = v;
      s.levels[*d] = rating_from_score(v);
    }
    const bool shape_ok =
        (s.f == 0 && s.scores.size() == 1 &&
         s.scores.count(Dimension::kOverallAesthetic) == 1) ||
        (s.f == 1 && s.scores.size() == kAllDimensions.size());
    if (!shape_ok) {
      throw Error(Errc::kCorruptFile, where + ": scores do not match f");
    }
    if (row.contains("levels")) {
      const auto levels =
          get_field<std::map<std::string, std::string>>(row, "levels", where);
      for (const auto& [key, word] : levels) {
        auto d = dimension_from_name(key);
        auto z = level_from_name(word);
        if (!d || !z || s.levels.count(*d) == 0 || s.levels.at(*d) != *z) {
          throw Error(Errc::kCorruptFile,
                      where + ": level for " + key + " inconsistent with score");
        }
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_samples(const std::filesystem::path& path,
                   std::span<const ScoredSample> samples) {
  std::vector<json> rows;
  rows.reserve(samples.size());
  for (const ScoredSample& s : samples) {
    json row;
    row["sample_id"] = s.sample_id;
    row["source"] = s.source;
    row["f"] = s.f;
    row["feature_seed"] = s.feature_seed;
    json scores = json::object();
    json levels = json::object();
    for (Dimension d : kAllDimensions) {
      auto it = s.scores.find(d);
      if (it == s.scores.end()) continue;
      scores[std::string(name(d))] = it->second;
      levels[std::string(name(d))] = std::string(level_name(s.levels.at(d)));
    }
    row["scores"] = std::move(scores);
    row["levels"] = std::move(levels);
    rows.push_back(std::move(row));
  }
  detail::write_jsonl(path, rows);
}

void write_qa(const std::filesystem::path& path, std::span<const QAPair> qa) {
  std::vector<json> rows;
  rows.reserve(qa.size());
  for (const QAPair& p : qa) {
    json row;
    row["sample_id"] = p.sample_id;
    row["question"] = p.question;
    row["answer"] = p.answer;
    json slots = json::array();
    for (const auto& [d, z] : p.slot_levels) {
      slots.push_back({std::string(name(d)), std::string(level_name(z))});
    }
    row["slot_levels"] = std::move(slots);
    rows.push_back(std::move(row));
  }
  detail::write_jsonl(path, rows);
}

std::vector<QAPair> read_qa(const std::filesystem::path& path) {
  std::vector<QAPair> out;
  std::size_t lineno = 0;
  for (const json& row : detail::read_jsonl(path)) {
    ++lineno;
    const std::string where = path.string() + " qa " + std::to_string(lineno);
    QAPair p;
    p.sample_id = get_field<std::string>(row, "sample_id", where);
    p.question = get_field<std::string>(row, "question", where);
    p.answer = get_field<std::string>(row, "answer", where);
    const auto slots = get_field<std::vector<std::vector<std::string>>>(
        row, "slot_levels", where);
    for (const auto& pair : slots) {
      auto d = pair.size() == 2 ? dimension_from_name(pair[0]) : std::nullopt;
      auto z = pair.size() == 2 ? level_from_name(pair[1]) : std::nullopt;
      if (!d || !z) throw Error(Errc::kCorruptFile, where + ": bad slot entry");
      p.slot_levels.emplace_back(*d, *z);
    }
    out.push_back(std::move(p));
  }
  return out;
}

Split read_split(const std::filesystem::path& path) {
  const json doc = detail::parse_json(detail::read_text_file(path), path);
  const std::string where = path.string();
  Split s;
  s.train_ids = get_field<std::vector<std::string>>(doc, "train", where);
  s.test_ids = get_field<std::vector<std::string>>(doc, "test", where);
  s.seed = get_field<std::uint64_t>(doc, "seed", where);
  s.fractions = get_field<std::map<std::string, double>>(doc, "fractions", where);
  return s;
}

void write_split(const std::filesystem::path& path, const Split& split) {
  json doc;
  doc["seed"] = split.seed;
  json fr = json::object();
  for (const auto& [src, q] : split.fractions) fr[src] = q;
  doc["fractions"] = std::move(fr);
  doc["train"] = split.train_ids;
  doc["test"] = split.test_ids;
  detail::write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace hiaa
