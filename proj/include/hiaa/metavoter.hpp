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

#ifndef HIAA_METAVOTER_HPP_
#define HIAA_METAVOTER_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hiaa/optimizer.hpp"
#include "hiaa/tensor.hpp"

namespace hiaa {

// Score fusion network:
//   y = w3 . relu(bn2(W2 relu(bn1(W1 u + b1)) + b2)) + b3
// with u = (S'_LM, S_reg, S_exp).

struct BatchNorm {
  Vector gamma;
  Vector beta;
  Vector running_mean;
  Vector running_var;
};

struct MetaVoterParams {
  Matrix w1;  // H x 3
  Vector b1;
  BatchNorm bn1;
  Matrix w2;  // H x H
  Vector b2;
  BatchNorm bn2;
  Vector w3;  // H
  double b3 = 0.0;
  double momentum = 0.1;
  double epsilon = 1e-5;

  int hidden() const { return static_cast<int>(w1.rows()); }

  // Trainable tensors only; running statistics are excluded.
  std::vector<TensorRef> tensors();
};

struct MetaVoterConfig {
  int hidden = 16;
  double momentum = 0.1;
  double epsilon = 1e-5;
  int epochs = 10;
  double learning_rate = 1e-3;
  int batch_size = 32;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::kAdam;

  void validate() const;
};

using VoterInput = std::array<double, 3>;  // (S'_LM, S_reg, S_exp)

MetaVoterParams init_metavoter(const MetaVoterConfig& config);
MetaVoterParams zeros_like(const MetaVoterParams& params);

// Eval mode: running statistics, no mutation.
double metavoter_forward(const MetaVoterParams& params, const VoterInput& input);

// Train mode: batch statistics (biased variance); updates the running
// statistics as running <- (1 - m) running + m batch. Needs >= 2 inputs.
std::vector<double> metavoter_forward_train(MetaVoterParams& params,
                                            std::span<const VoterInput> batch);

// Mean absolute error of train-mode outputs over the batch. The
// subgradient of |r| at r == 0 is taken as 0. Gradients of the trainable
// tensors are written into grads (overwritten); params are not mutated.
double metavoter_loss_and_grad(const MetaVoterParams& params,
                               std::span<const VoterInput> batch,
                               std::span<const double> targets,
                               MetaVoterParams& grads);

double mae_loss(std::span<const double> predicted, std::span<const double> target);

// Minibatch training on MAE. A trailing batch of size 1 is merged into the
// previous batch so batch statistics always exist. After the last epoch the
// running statistics are replaced by full-data statistics of the final
// parameters.
MetaVoterParams train_metavoter(std::span<const VoterInput> inputs,
                                std::span<const double> targets,
                                const MetaVoterConfig& config);

}  // namespace hiaa

#endif  // HIAA_METAVOTER_HPP_
