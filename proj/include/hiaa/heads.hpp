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

#ifndef HIAA_HEADS_HPP_
#define HIAA_HEADS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "hiaa/backbone.hpp"
#include "hiaa/taxonomy.hpp"
#include "hiaa/tensor.hpp"

namespace hiaa {

// ---------------------------------------------------------------------------
// LM head: per-slot 5-way classifier over the rating words. Logit i belongs
// to rating level code i + 1.

struct LMHeadParams {
  Matrix weight;  // 5 x D
  Vector bias;    // 5

  std::vector<TensorRef> tensors();
};

Matrix lm_logits(const LMHeadParams& params, const HiddenStates& h);

// Probability-weighted rating code, sum_i i * softmax(logits)_i, in (1, 5).
double lm_score(const Eigen::Ref<const Eigen::RowVectorXd>& logits);

// Fixed affine map [1,5] -> [0,1].
double normalize_lm_score(double s_lm);

// ---------------------------------------------------------------------------
// Regression head: linear readout of the last slot.

struct RegHeadParams {
  Vector weight;  // D
  double bias = 0.0;

  std::vector<TensorRef> tensors();
};

double reg_score(const RegHeadParams& params, const HiddenStates& h);

// ---------------------------------------------------------------------------
// Expert head: a linear leaf layer over the mean slot vector, then three
// small FFNs that see only their children's scalar scores.

struct ExpertFfn {
  Matrix w1;  // W x inputs
  Vector b1;  // W
  Vector w2;  // W
  double b2 = 0.0;

  double forward(const Vector& in, Vector* pre = nullptr) const;
};

struct ExpertHeadParams {
  Matrix leaf_weight;  // 9 x D, rows in kLeafOrder
  Vector leaf_bias;    // 9
  ExpertFfn facial;      // 5 -> W -> 1
  ExpertFfn appearance;  // 3 -> W -> 1
  ExpertFfn overall;     // (environment, facial, appearance) -> W -> 1

  std::vector<TensorRef> tensors();
};

using DimensionScores = std::array<double, kNumDimensions>;

struct ExpertTrace {
  Vector pooled;     // mean slot vector
  Vector leaves;     // 9, kLeafOrder
  Vector facial_in, appearance_in, overall_in;
  Vector facial_pre, appearance_pre, overall_pre;
};

// Raw (unclamped) scores in canonical dimension order. Requires a
// twelve-slot hidden state.
DimensionScores expert_scores(const ExpertHeadParams& params,
                              const HiddenStates& h,
                              ExpertTrace* trace = nullptr);

// Backpropagates dL/d(scores) into parameter gradients; returns dL/dh.
Matrix expert_backward(const ExpertHeadParams& params, const ExpertTrace& trace,
                       const DimensionScores& d_scores,
                       ExpertHeadParams& grads);

// ---------------------------------------------------------------------------

struct ModelConfig {
  BackboneConfig backbone;
  int ffn_width = 16;  // W
};

// Backbone plus the three scoring heads.
struct ModelParams {
  BackboneParams backbone;
  LMHeadParams lm;
  RegHeadParams reg;
  ExpertHeadParams expert;

  ModelConfig config() const;

  // Every trainable tensor, names prefixed by section.
  std::vector<TensorRef> tensors();
};

ModelParams init_model(std::uint64_t seed, const ModelConfig& config);
ModelParams zeros_like(const ModelParams& params);

// Per-sample outputs of every head.
struct HeadScores {
  double lm = 0.0;          // normalized S_LM of the overall slot, in [0,1]
  DimensionScores lm_dims{};  // normalized per-slot S_LM, twelve_dim prompt
  double reg = 0.0;         // S_reg from the overall prompt
  DimensionScores expert{};   // raw expert node scores
  std::optional<double> fused;  // MetaVoter output when available
};

// Scores one sample. The LM overall score is read from the single slot of
// the overall prompt when f == 0 and from the overall_aesthetic slot of the
// twelve-dimension prompt when f == 1.
HeadScores score_heads(const ModelParams& model, const Vector& features, int f);

}  // namespace hiaa

#endif  // HIAA_HEADS_HPP_
