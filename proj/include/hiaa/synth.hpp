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

#ifndef HIAA_SYNTH_HPP_
#define HIAA_SYNTH_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hiaa/datapipe.hpp"
#include "hiaa/heads.hpp"
#include "hiaa/tensor.hpp"

namespace hiaa {

// Synthetic stand-in corpus with a known hierarchical ground truth:
//   leaf_i  = sigmoid((a * c.x + b * g_i.x) / sqrt(F))
//   facial  = mean of the five facial leaves
//   appear. = mean of outfit, body_shape, looks
//   overall = mean(environment, facial, appearance)
// Per-rater scores are clamp(truth + noise) with per-rater standard
// deviation noise_sigma * sqrt(raters), so the MOS carries noise_sigma.
struct SynthConfig {
  int n = 1000;
  std::uint64_t seed = 1;
  double noise_sigma = 0.02;
  double overall_only_fraction = 0.54;
  int features = 32;
  int raters = kMinRaters;
  std::uint64_t generator_seed = 20240101;  // fixes the hidden map
};

struct SourceScale {
  std::string name;
  double lo;
  double hi;
};

// The six source datasets and their native score ranges.
const std::vector<SourceScale>& synthetic_sources();

class SyntheticGenerator {
 public:
  SyntheticGenerator(std::uint64_t generator_seed, int features);

  // Noise-free scores of all twelve dimensions, canonical order.
  DimensionScores truth(const Vector& features) const;

 private:
  int features_;
  Vector common_;
  Matrix leaf_dirs_;  // 9 x F, rows in kLeafOrder
};

std::vector<AnnotationRecord> generate_records(const SynthConfig& config);

}  // namespace hiaa

#endif  // HIAA_SYNTH_HPP_
