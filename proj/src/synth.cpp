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

#include "hiaa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "hiaa/backbone.hpp"
#include "hiaa/error.hpp"

namespace hiaa {
namespace {

constexpr double kCommonWeight = 1.2;
constexpr double kLeafWeight = 1.0;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::int64_t feature_seed_for(std::uint64_t seed, std::size_t i) {
  // splitmix64 of (seed, i)
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ULL + (i + 1) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<std::int64_t>(z >> 1);
}

}  // namespace

const std::vector<SourceScale>& synthetic_sources() {
  static const std::vector<SourceScale> kSources = {
      {"scut_fbp5500", 1.0, 5.0}, {"mebeauty", 1.0, 10.0},
      {"ava", 1.0, 10.0},         {"tad66k", 1.0, 10.0},
      {"baid", 0.0, 10.0},        {"agiqa", 0.0, 5.0},
  };
  return kSources;
}

SyntheticGenerator::SyntheticGenerator(std::uint64_t generator_seed, int features)
    : features_(features) {
  if (features < 1) throw Error(Errc::kConfigError, "features must be >= 1");
  std::mt19937_64 rng(generator_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  common_ = Vector(features);
  for (int j = 0; j < features; ++j) common_[j] = normal(rng);
  leaf_dirs_ = Matrix(kNumLeaves, features);
  for (int i = 0; i < kNumLeaves; ++i) {
    for (int j = 0; j < features; ++j) leaf_dirs_(i, j) = normal(rng);
  }
}

DimensionScores SyntheticGenerator::truth(const Vector& x) const {
  if (x.size() != features_) {
    throw Error(Errc::kShapeMismatch, "generator feature size mismatch");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(features_));
  const double shared = kCommonWeight * common_.dot(x);
  DimensionScores out{};
  for (int i = 0; i < kNumLeaves; ++i) {
    const double z = (shared + kLeafWeight * leaf_dirs_.row(i).dot(x)) * scale;
    out[index_of(kLeafOrder[i])] = sigmoid(z);
  }
  auto mean_of = [&](Dimension parent) {
    double s = 0.0;
    for (Dimension c : children(parent)) s += out[index_of(c)];
    return s / static_cast<double>(children(parent).size());
  };
  out[index_of(Dimension::kFacialAesthetic)] = mean_of(Dimension::kFacialAesthetic);
  out[index_of(Dimension::kGeneralAppearanceAesthetic)] =
      mean_of(Dimension::kGeneralAppearanceAesthetic);
  out[index_of(Dimension::kOverallAesthetic)] = mean_of(Dimension::kOverallAesthetic);
  return out;
}

std::vector<AnnotationRecord> generate_records(const SynthConfig& config) {
  if (config.n < 1) throw Error(Errc::kConfigError, "synth n must be >= 1");
  if (!(config.noise_sigma >= 0.0)) {
    throw Error(Errc::kConfigError, "noise_sigma must be >= 0");
  }
  if (!(config.overall_only_fraction >= 0.0 && config.overall_only_fraction < 1.0)) {
    throw Error(Errc::kConfigError, "overall_only_fraction must lie in [0,1)");
  }
  if (config.raters < kMinRaters) {
    throw Error(Errc::kConfigError, "at least 9 raters per record");
  }
  const SyntheticGenerator gen(config.generator_seed, config.features);
  const auto n = static_cast<std::size_t>(config.n);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Choose which records are overall-only, then spread them round-robin over
  // as many sources as keep at least two records per source.
  auto n_overall = static_cast<std::size_t>(
      std::llround(config.overall_only_fraction * static_cast<double>(n)));
  if (n_overall == 1) n_overall = 0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> source_of(n, -1);
  const auto& sources = synthetic_sources();
  const std::size_t n_sources =
      std::max<std::size_t>(1, std::min(sources.size(), n_overall / 2));
  for (std::size_t k = 0; k < n_overall; ++k) {
    source_of[order[k]] = static_cast<int>(k % n_sources);
  }

  const double rater_sigma =
      config.noise_sigma * std::sqrt(static_cast<double>(config.raters));
  std::vector<AnnotationRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    AnnotationRecord r;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%06zu", i + 1);
    r.sample_id = id;
    r.feature_seed = feature_seed_for(config.seed, i);
    const DimensionScores truth =
        gen.truth(derive_features(r.feature_seed, config.features));
    if (source_of[i] >= 0) {
      const SourceScale& src = sources[static_cast<std::size_t>(source_of[i])];
      r.source = src.name;
      const double obs = std::clamp(
          truth[index_of(Dimension::kOverallAesthetic)] +
              config.noise_sigma * normal(rng),
          0.0, 1.0);
      r.raw_overall = src.lo + (src.hi - src.lo) * obs;
    } else {
      r.source = kManualSource;
      for (Dimension d : kAllDimensions) {
        std::vector<double> raters(static_cast<std::size_t>(config.raters));
        for (double& v : raters) {
          v = std::clamp(truth[index_of(d)] + rater_sigma * normal(rng), 0.0, 1.0);
        }
        r.rater_scores[d] = std::move(raters);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace hiaa
