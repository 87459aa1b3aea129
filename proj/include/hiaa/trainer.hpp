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

#ifndef HIAA_TRAINER_HPP_
#define HIAA_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hiaa/datapipe.hpp"
#include "hiaa/heads.hpp"
#include "hiaa/optimizer.hpp"

namespace hiaa {

struct Stage1Config {
  double lambda = 1.0;  // weight of the regression MSE on overall-only samples
  double mu = 1.0;      // weight of the expert MSE on twelve-dimension samples
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 1;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  ModelConfig model;

  void validate() const;
};

// Head outputs computed from the prompt kind that matches f.
struct Stage1Outputs {
  Matrix logits;                      // slot_count x 5
  double reg = 0.0;                   // meaningful when f == 0
  DimensionScores expert{};           // meaningful when f == 1
};

// Mean over slots of -log softmax(logits_k)[target_k - 1].
double cross_entropy_loss(const Matrix& logits,
                          std::span<const RatingLevel> targets);

double mse_loss(std::span<const double> predicted, std::span<const double> target);

// Switched loss: f == 0 -> CE + lambda * MSE(S_reg), f == 1 -> CE + mu *
// MSE(expert nodes).
double stage1_loss(const ScoredSample& sample, const Stage1Outputs& outputs,
                   const Stage1Config& config);

Stage1Outputs stage1_forward(const ModelParams& model, const ScoredSample& sample,
                             const Vector& features);

// Loss of one sample with its gradient accumulated (scaled by weight) into
// grads. Only the active branch's head receives gradient.
double stage1_loss_and_grad(const ModelParams& model, const ScoredSample& sample,
                            const Vector& features, const Stage1Config& config,
                            ModelParams& grads, double weight = 1.0);

// Mean loss over a batch; grads is overwritten with the mean gradient.
double stage1_batch_loss_and_grad(const ModelParams& model,
                                  std::span<const ScoredSample> batch,
                                  const Stage1Config& config, ModelParams& grads);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
};

// Seeded shuffle each epoch, minibatch updates on the mean switched loss.
// Throws Error(kNumericFailure) if the loss becomes non-finite.
ModelParams train_stage1(std::span<const ScoredSample> train,
                         const Stage1Config& config,
                         const std::function<void(const EpochStats&)>& on_epoch = {});

// Same as train_stage1 but continues from the given parameters.
ModelParams train_stage1_from(ModelParams model,
                              std::span<const ScoredSample> train,
                              const Stage1Config& config,
                              const std::function<void(const EpochStats&)>& on_epoch = {});

}  // namespace hiaa

#endif  // HIAA_TRAINER_HPP_
