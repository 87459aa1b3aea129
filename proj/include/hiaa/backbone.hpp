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

#ifndef HIAA_BACKBONE_HPP_
#define HIAA_BACKBONE_HPP_

#include <cstdint>
#include <vector>

#include "hiaa/tensor.hpp"

namespace hiaa {

// Desk-scale stand-in for the vision-language model: a per-slot
// feed-forward encoder  row_k = W2 tanh(W1 [x; e_k] + b1) + b2.

struct BackboneConfig {
  int features = 32;  // F
  int embed = 16;     // E
  int hidden = 64;    // D
};

enum class PromptKind { kOverall, kTwelveDim };

inline constexpr int kOverallSlotEmbedding = 12;
inline constexpr int kNumSlotEmbeddings = 13;

constexpr int slot_count(PromptKind p) {
  return p == PromptKind::kOverall ? 1 : 12;
}

struct BackboneParams {
  Matrix slot_embeddings;  // 13 x E; rows 0..11 dimension slots, 12 overall
  Matrix w1;               // D x (F + E)
  Vector b1;               // D
  Matrix w2;               // D x D
  Vector b2;               // D

  int features() const { return static_cast<int>(w1.cols() - slot_embeddings.cols()); }
  int embed() const { return static_cast<int>(slot_embeddings.cols()); }
  int hidden() const { return static_cast<int>(w1.rows()); }

  std::vector<TensorRef> tensors();
};

// One hidden vector per answer slot.
struct HiddenStates {
  Matrix states;  // slot_count x D

  int slot_count() const { return static_cast<int>(states.rows()); }
  Vector last_token() const { return states.row(states.rows() - 1).transpose(); }
};

// Activations kept from the forward pass for backpropagation.
struct BackboneTrace {
  PromptKind prompt = PromptKind::kOverall;
  Matrix inputs;       // slot_count x (F + E)
  Matrix activations;  // slot_count x D, tanh outputs
};

// Standard-normal draws from a mt19937_64 stream seeded with feature_seed.
Vector derive_features(std::int64_t feature_seed, int features);

// Glorot-uniform weights, zero biases, slot embeddings drawn from the same
// stream.
BackboneParams init_backbone(std::uint64_t seed, const BackboneConfig& config);

HiddenStates encode(const BackboneParams& params, const Vector& features,
                    PromptKind prompt, BackboneTrace* trace = nullptr);

// Accumulates parameter gradients into grads given dL/d(states).
void backbone_backward(const BackboneParams& params, const BackboneTrace& trace,
                       const Matrix& d_states, BackboneParams& grads);

BackboneParams zeros_like(const BackboneParams& params);

}  // namespace hiaa

#endif  // HIAA_BACKBONE_HPP_
