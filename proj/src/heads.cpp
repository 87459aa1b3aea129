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

#include "hiaa/heads.hpp"

#include <cmath>
#include <random>
#include <string>

#include "hiaa/error.hpp"
#include "init.hpp"

namespace hiaa {
namespace {

constexpr int kFacialLeaves = 5;
constexpr int kAppearanceLeaves = 3;
constexpr int kEnvironmentLeaf = 8;  // position of environment in kLeafOrder

void append_prefixed(std::vector<TensorRef>& out, const std::string& prefix,
                     std::vector<TensorRef> tensors) {
  for (TensorRef& t : tensors) {
    t.name = prefix + "." + t.name;
    out.push_back(std::move(t));
  }
}

ExpertFfn init_ffn(int inputs, int width, std::mt19937_64& rng) {
  ExpertFfn ffn;
  ffn.w1 = detail::glorot_uniform(width, inputs, rng);
  ffn.b1 = Vector::Zero(width);
  ffn.w2 = detail::glorot_uniform(1, width, rng).transpose();
  ffn.b2 = 0.0;
  return ffn;
}

ExpertFfn ffn_zeros_like(const ExpertFfn& f) {
  ExpertFfn z;
  z.w1 = Matrix::Zero(f.w1.rows(), f.w1.cols());
  z.b1 = Vector::Zero(f.b1.size());
  z.w2 = Vector::Zero(f.w2.size());
  z.b2 = 0.0;
  return z;
}

// Returns dL/d(inputs).
Vector ffn_backward(const ExpertFfn& ffn, const Vector& in, const Vector& pre,
                    double d_out, ExpertFfn& grad) {
  const Vector act = pre.cwiseMax(0.0);
  grad.w2 += d_out * act;
  grad.b2 += d_out;
  Vector d_pre = d_out * ffn.w2;
  for (Eigen::Index i = 0; i < pre.size(); ++i) {
    if (!(pre[i] > 0.0)) d_pre[i] = 0.0;
  }
  grad.w1.noalias() += d_pre * in.transpose();
  grad.b1 += d_pre;
  return ffn.w1.transpose() * d_pre;
}

void require_hidden(const HiddenStates& h, Eigen::Index d, const char* head) {
  if (h.states.cols() != d || h.states.rows() < 1) {
    throw Error(Errc::kShapeMismatch,
                std::string(head) + ": hidden width " +
                    std::to_string(h.states.cols()) + " != " + std::to_string(d));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<TensorRef> LMHeadParams::tensors() {
  return {tensor_ref("weight", weight), tensor_ref("bias", bias)};
}

Matrix lm_logits(const LMHeadParams& params, const HiddenStates& h) {
  require_hidden(h, params.weight.cols(), "lm head");
  if (params.weight.rows() != kNumLevels || params.bias.size() != kNumLevels) {
    throw Error(Errc::kShapeMismatch, "lm head must have 5 outputs");
  }
  Matrix logits = h.states * params.weight.transpose();
  logits.rowwise() += params.bias.transpose();
  return logits;
}

double lm_score(const Eigen::Ref<const Eigen::RowVectorXd>& logits) {
  if (logits.size() != kNumLevels) {
    throw Error(Errc::kShapeMismatch, "lm_score expects 5 logits");
  }
  if (!logits.allFinite()) {
    throw Error(Errc::kNonFiniteInput, "non-finite logit");
  }
  const double m = logits.maxCoeff();
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < kNumLevels; ++i) {
    const double w = std::exp(logits[i] - m);
    num += (i + 1) * w;
    den += w;
  }
  return num / den;
}

double normalize_lm_score(double s_lm) {
  if (!(s_lm >= 1.0 && s_lm <= 5.0)) {
    throw Error(Errc::kOutOfRange,
                "S_LM " + std::to_string(s_lm) + " outside [1,5]");
  }
  return (s_lm - 1.0) / 4.0;
}

// ---------------------------------------------------------------------------

std::vector<TensorRef> RegHeadParams::tensors() {
  return {tensor_ref("weight", weight), tensor_ref("bias", bias)};
}

double reg_score(const RegHeadParams& params, const HiddenStates& h) {
  require_hidden(h, params.weight.size(), "regression head");
  return params.weight.dot(h.states.row(h.states.rows() - 1)) + params.bias;
}

// ---------------------------------------------------------------------------

double ExpertFfn::forward(const Vector& in, Vector* pre) const {
  Vector z = w1 * in + b1;
  const double out = w2.dot(z.cwiseMax(0.0)) + b2;
  if (pre != nullptr) *pre = std::move(z);
  return out;
}

std::vector<TensorRef> ExpertHeadParams::tensors() {
  return {tensor_ref("leaf_weight", leaf_weight),
          tensor_ref("leaf_bias", leaf_bias),
          tensor_ref("facial.w1", facial.w1),
          tensor_ref("facial.b1", facial.b1),
          tensor_ref("facial.w2", facial.w2),
          tensor_ref("facial.b2", facial.b2),
          tensor_ref("appearance.w1", appearance.w1),
          tensor_ref("appearance.b1", appearance.b1),
          tensor_ref("appearance.w2", appearance.w2),
          tensor_ref("appearance.b2", appearance.b2),
          tensor_ref("overall.w1", overall.w1),
          tensor_ref("overall.b1", overall.b1),
          tensor_ref("overall.w2", overall.w2),
          tensor_ref("overall.b2", overall.b2)};
}

DimensionScores expert_scores(const ExpertHeadParams& params,
                              const HiddenStates& h, ExpertTrace* trace) {
  if (h.slot_count() != kNumDimensions) {
    throw Error(Errc::kWrongPromptKind,
                "expert head needs the twelve-dimension prompt, got " +
                    std::to_string(h.slot_count()) + " slot(s)");
  }
  require_hidden(h, params.leaf_weight.cols(), "expert head");
  if (params.leaf_weight.rows() != kNumLeaves ||
      params.leaf_bias.size() != kNumLeaves ||
      params.facial.w1.cols() != kFacialLeaves ||
      params.appearance.w1.cols() != kAppearanceLeaves ||
      params.overall.w1.cols() != 3) {
    throw Error(Errc::kShapeMismatch, "expert head parameter shapes");
  }
  ExpertTrace local;
  ExpertTrace& t = trace != nullptr ? *trace : local;
  t.pooled = h.states.colwise().mean().transpose();
  t.leaves = params.leaf_weight * t.pooled + params.leaf_bias;
  t.facial_in = t.leaves.head(kFacialLeaves);
  t.appearance_in = t.leaves.segment(kFacialLeaves, kAppearanceLeaves);
  const double facial = params.facial.forward(t.facial_in, &t.facial_pre);
  const double appearance =
      params.appearance.forward(t.appearance_in, &t.appearance_pre);
  t.overall_in = Vector(3);
  t.overall_in << t.leaves[kEnvironmentLeaf], facial, appearance;
  const double overall = params.overall.forward(t.overall_in, &t.overall_pre);

  DimensionScores out{};
  for (int i = 0; i < kNumLeaves; ++i) out[index_of(kLeafOrder[i])] = t.leaves[i];
  out[index_of(Dimension::kFacialAesthetic)] = facial;
  out[index_of(Dimension::kGeneralAppearanceAesthetic)] = appearance;
  out[index_of(Dimension::kOverallAesthetic)] = overall;
  return out;
}

Matrix expert_backward(const ExpertHeadParams& params, const ExpertTrace& t,
                       const DimensionScores& d_scores,
                       ExpertHeadParams& grads) {
  Vector d_leaves(kNumLeaves);
  for (int i = 0; i < kNumLeaves; ++i) {
    d_leaves[i] = d_scores[index_of(kLeafOrder[i])];
  }
  const Vector d_overall_in =
      ffn_backward(params.overall, t.overall_in, t.overall_pre,
                   d_scores[index_of(Dimension::kOverallAesthetic)], grads.overall);
  d_leaves[kEnvironmentLeaf] += d_overall_in[0];
  const double d_facial =
      d_scores[index_of(Dimension::kFacialAesthetic)] + d_overall_in[1];
  const double d_appearance =
      d_scores[index_of(Dimension::kGeneralAppearanceAesthetic)] + d_overall_in[2];
  d_leaves.head(kFacialLeaves) +=
      ffn_backward(params.facial, t.facial_in, t.facial_pre, d_facial, grads.facial);
  d_leaves.segment(kFacialLeaves, kAppearanceLeaves) +=
      ffn_backward(params.appearance, t.appearance_in, t.appearance_pre,
                   d_appearance, grads.appearance);

  grads.leaf_weight.noalias() += d_leaves * t.pooled.transpose();
  grads.leaf_bias += d_leaves;
  const Vector d_pooled = params.leaf_weight.transpose() * d_leaves;
  // Mean pooling spreads the gradient evenly over the twelve slots.
  Matrix d_h(kNumDimensions, d_pooled.size());
  d_h.rowwise() = (d_pooled / static_cast<double>(kNumDimensions)).transpose();
  return d_h;
}

// ---------------------------------------------------------------------------

ModelConfig ModelParams::config() const {
  ModelConfig c;
  c.backbone.features = backbone.features();
  c.backbone.embed = backbone.embed();
  c.backbone.hidden = backbone.hidden();
  c.ffn_width = static_cast<int>(expert.facial.w1.rows());
  return c;
}

std::vector<TensorRef> ModelParams::tensors() {
  std::vector<TensorRef> out;
  append_prefixed(out, "backbone", backbone.tensors());
  append_prefixed(out, "lm_head", lm.tensors());
  append_prefixed(out, "reg_head", reg.tensors());
  append_prefixed(out, "expert_head", expert.tensors());
  return out;
}

ModelParams init_model(std::uint64_t seed, const ModelConfig& config) {
  if (config.ffn_width < 1) {
    throw Error(Errc::kShapeMismatch, "ffn width must be positive");
  }
  ModelParams m;
  m.backbone = init_backbone(seed, config.backbone);
  // Heads draw from a separate stream so backbone sizes do not shift them.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const int d = config.backbone.hidden;
  m.lm.weight = detail::glorot_uniform(kNumLevels, d, rng);
  m.lm.bias = Vector::Zero(kNumLevels);
  m.reg.weight = detail::glorot_uniform(1, d, rng).transpose();
  m.reg.bias = 0.0;
  m.expert.leaf_weight = detail::glorot_uniform(kNumLeaves, d, rng);
  m.expert.leaf_bias = Vector::Zero(kNumLeaves);
  m.expert.facial = init_ffn(kFacialLeaves, config.ffn_width, rng);
  m.expert.appearance = init_ffn(kAppearanceLeaves, config.ffn_width, rng);
  m.expert.overall = init_ffn(3, config.ffn_width, rng);
  return m;
}

ModelParams zeros_like(const ModelParams& p) {
  ModelParams z;
  z.backbone = zeros_like(p.backbone);
  z.lm.weight = Matrix::Zero(p.lm.weight.rows(), p.lm.weight.cols());
  z.lm.bias = Vector::Zero(p.lm.bias.size());
  z.reg.weight = Vector::Zero(p.reg.weight.size());
  z.reg.bias = 0.0;
  z.expert.leaf_weight =
      Matrix::Zero(p.expert.leaf_weight.rows(), p.expert.leaf_weight.cols());
  z.expert.leaf_bias = Vector::Zero(p.expert.leaf_bias.size());
  z.expert.facial = ffn_zeros_like(p.expert.facial);
  z.expert.appearance = ffn_zeros_like(p.expert.appearance);
  z.expert.overall = ffn_zeros_like(p.expert.overall);
  return z;
}

HeadScores score_heads(const ModelParams& model, const Vector& features, int f) {
  if (f != 0 && f != 1) throw Error(Errc::kBadFlag, "f must be 0 or 1");
  const HiddenStates h1 = encode(model.backbone, features, PromptKind::kOverall);
  const HiddenStates h12 = encode(model.backbone, features, PromptKind::kTwelveDim);
  const Matrix logits1 = lm_logits(model.lm, h1);
  const Matrix logits12 = lm_logits(model.lm, h12);

  HeadScores s;
  for (int k = 0; k < kNumDimensions; ++k) {
    s.lm_dims[k] = normalize_lm_score(lm_score(logits12.row(k)));
  }
  s.lm = f == 0 ? normalize_lm_score(lm_score(logits1.row(0)))
                : s.lm_dims[index_of(Dimension::kOverallAesthetic)];
  s.reg = reg_score(model.reg, h1);
  s.expert = expert_scores(model.expert, h12);
  return s;
}

}  // namespace hiaa
