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

#include "hiaa/backbone.hpp"

#include <cmath>
#include <random>

#include "hiaa/error.hpp"
#include "init.hpp"

namespace hiaa {

std::vector<TensorRef> BackboneParams::tensors() {
  return {tensor_ref("slot_embeddings", slot_embeddings),
          tensor_ref("w1", w1), tensor_ref("b1", b1),
          tensor_ref("w2", w2), tensor_ref("b2", b2)};
}

Vector derive_features(std::int64_t feature_seed, int features) {
  if (features < 1) throw Error(Errc::kShapeMismatch, "feature size must be >= 1");
  std::mt19937_64 rng(static_cast<std::uint64_t>(feature_seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(features);
  for (int i = 0; i < features; ++i) x[i] = normal(rng);
  return x;
}

BackboneParams init_backbone(std::uint64_t seed, const BackboneConfig& config) {
  if (config.features < 1 || config.embed < 1 || config.hidden < 1) {
    throw Error(Errc::kShapeMismatch, "backbone sizes must be positive");
  }
  const int in = config.features + config.embed;
  const int d = config.hidden;
  std::mt19937_64 rng(seed);
  BackboneParams p;
  p.slot_embeddings = detail::glorot_uniform(kNumSlotEmbeddings, config.embed, rng);
  p.w1 = detail::glorot_uniform(d, in, rng);
  p.b1 = Vector::Zero(d);
  p.w2 = detail::glorot_uniform(d, d, rng);
  p.b2 = Vector::Zero(d);
  return p;
}

HiddenStates encode(const BackboneParams& params, const Vector& features,
                    PromptKind prompt, BackboneTrace* trace) {
  const int f = params.features();
  const int e = params.embed();
  if (features.size() != f || params.slot_embeddings.rows() != kNumSlotEmbeddings ||
      params.b1.size() != params.hidden() || params.w2.rows() != params.hidden() ||
      params.w2.cols() != params.hidden() || params.b2.size() != params.hidden()) {
    throw Error(Errc::kShapeMismatch, "backbone parameter/feature shapes disagree");
  }
  const int slots = slot_count(prompt);
  Matrix inputs(slots, f + e);
  for (int k = 0; k < slots; ++k) {
    const int emb = prompt == PromptKind::kOverall ? kOverallSlotEmbedding : k;
    inputs.row(k).head(f) = features.transpose();
    inputs.row(k).tail(e) = params.slot_embeddings.row(emb);
  }
  Matrix pre = inputs * params.w1.transpose();
  pre.rowwise() += params.b1.transpose();
  Matrix act = pre.array().tanh().matrix();
  HiddenStates h;
  h.states = act * params.w2.transpose();
  h.states.rowwise() += params.b2.transpose();
  if (trace != nullptr) {
    trace->prompt = prompt;
    trace->inputs = std::move(inputs);
    trace->activations = std::move(act);
  }
  return h;
}

void backbone_backward(const BackboneParams& params, const BackboneTrace& trace,
                       const Matrix& d_states, BackboneParams& grads) {
  const int e = params.embed();
  grads.w2.noalias() += d_states.transpose() * trace.activations;
  grads.b2 += d_states.colwise().sum().transpose();
  Matrix d_act = d_states * params.w2;
  Matrix d_pre =
      (d_act.array() * (1.0 - trace.activations.array().square())).matrix();
  grads.w1.noalias() += d_pre.transpose() * trace.inputs;
  grads.b1 += d_pre.colwise().sum().transpose();
  Matrix d_inputs = d_pre * params.w1;
  for (int k = 0; k < d_inputs.rows(); ++k) {
    const int emb =
        trace.prompt == PromptKind::kOverall ? kOverallSlotEmbedding : k;
    grads.slot_embeddings.row(emb) += d_inputs.row(k).tail(e);
  }
}

BackboneParams zeros_like(const BackboneParams& params) {
  BackboneParams z;
  z.slot_embeddings = Matrix::Zero(params.slot_embeddings.rows(),
                                   params.slot_embeddings.cols());
  z.w1 = Matrix::Zero(params.w1.rows(), params.w1.cols());
  z.b1 = Vector::Zero(params.b1.size());
  z.w2 = Matrix::Zero(params.w2.rows(), params.w2.cols());
  z.b2 = Vector::Zero(params.b2.size());
  return z;
}

}  // namespace hiaa
