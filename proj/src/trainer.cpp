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

#include "hiaa/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "hiaa/error.hpp"

namespace hiaa {
namespace {

constexpr std::uint64_t kShuffleStream = 0x2545f4914f6cdd1dULL;

// Row-wise softmax with max subtraction.
Eigen::RowVectorXd softmax_row(const Eigen::Ref<const Eigen::RowVectorXd>& z) {
  Eigen::RowVectorXd e = (z.array() - z.maxCoeff()).exp().matrix();
  return e / e.sum();
}

std::vector<RatingLevel> target_levels(const ScoredSample& s) {
  std::vector<RatingLevel> out;
  if (s.f == 0) {
    out.push_back(s.levels.at(Dimension::kOverallAesthetic));
  } else {
    for (Dimension d : kAllDimensions) out.push_back(s.levels.at(d));
  }
  return out;
}

std::vector<double> target_scores(const ScoredSample& s) {
  std::vector<double> out;
  for (Dimension d : kAllDimensions) out.push_back(s.scores.at(d));
  return out;
}

void check_flag(const ScoredSample& s) {
  if (s.f != 0 && s.f != 1) {
    throw Error(Errc::kBadFlag, "sample " + s.sample_id + " has f=" +
                                    std::to_string(s.f));
  }
}

}  // namespace

void Stage1Config::validate() const {
  if (!(lambda >= 0.0) || !(mu >= 0.0)) {
    throw Error(Errc::kConfigError, "lambda and mu must be >= 0");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(Errc::kConfigError, "learning_rate must be finite and >= 0");
  }
  if (batch_size < 1) throw Error(Errc::kConfigError, "batch_size must be >= 1");
  if (epochs < 1) throw Error(Errc::kConfigError, "epochs must be >= 1");
}

double cross_entropy_loss(const Matrix& logits,
                          std::span<const RatingLevel> targets) {
  if (logits.rows() != static_cast<Eigen::Index>(targets.size())) {
    throw Error(Errc::kLengthMismatch, "cross entropy: " +
                                           std::to_string(logits.rows()) +
                                           " slots vs " +
                                           std::to_string(targets.size()) +
                                           " targets");
  }
  if (logits.cols() != kNumLevels || targets.empty()) {
    throw Error(Errc::kShapeMismatch, "cross entropy expects N x 5 logits");
  }
  double total = 0.0;
  for (Eigen::Index k = 0; k < logits.rows(); ++k) {
    const auto row = logits.row(k);
    const double m = row.maxCoeff();
    const double log_sum = m + std::log((row.array() - m).exp().sum());
    total += log_sum - row[code_of(targets[k]) - 1];
  }
  return total / static_cast<double>(logits.rows());
}

double mse_loss(std::span<const double> predicted, std::span<const double> target) {
  if (predicted.size() != target.size()) {
    throw Error(Errc::kLengthMismatch, "mse: length mismatch");
  }
  if (predicted.empty()) throw Error(Errc::kEmpty, "mse: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double r = predicted[i] - target[i];
    total += r * r;
  }
  return total / static_cast<double>(predicted.size());
}

double stage1_loss(const ScoredSample& sample, const Stage1Outputs& outputs,
                   const Stage1Config& config) {
  check_flag(sample);
  const std::vector<RatingLevel> levels = target_levels(sample);
  const double ce = cross_entropy_loss(outputs.logits, levels);
  if (sample.f == 0) {
    const double pred = outputs.reg;
    const double gt = sample.overall();
    return ce + config.lambda * mse_loss({&pred, 1}, {&gt, 1});
  }
  const std::vector<double> gt = target_scores(sample);
  return ce + config.mu * mse_loss(outputs.expert, gt);
}

Stage1Outputs stage1_forward(const ModelParams& model, const ScoredSample& sample,
                             const Vector& features) {
  check_flag(sample);
  Stage1Outputs out;
  if (sample.f == 0) {
    const HiddenStates h = encode(model.backbone, features, PromptKind::kOverall);
    out.logits = lm_logits(model.lm, h);
    out.reg = reg_score(model.reg, h);
  } else {
    const HiddenStates h = encode(model.backbone, features, PromptKind::kTwelveDim);
    out.logits = lm_logits(model.lm, h);
    out.expert = expert_scores(model.expert, h);
  }
  return out;
}

double stage1_loss_and_grad(const ModelParams& model, const ScoredSample& sample,
                            const Vector& features, const Stage1Config& config,
                            ModelParams& grads, double weight) {
  check_flag(sample);
  const PromptKind prompt =
      sample.f == 0 ? PromptKind::kOverall : PromptKind::kTwelveDim;
  BackboneTrace trace;
  const HiddenStates h = encode(model.backbone, features, prompt, &trace);
  const Matrix logits = lm_logits(model.lm, h);
  const std::vector<RatingLevel> levels = target_levels(sample);
  const double ce = cross_entropy_loss(logits, levels);
  const auto slots = static_cast<double>(logits.rows());

  // Cross-entropy: d/dlogits = (softmax - onehot) / N.
  Matrix d_logits(logits.rows(), logits.cols());
  for (Eigen::Index k = 0; k < logits.rows(); ++k) {
    d_logits.row(k) = softmax_row(logits.row(k));
    d_logits(k, code_of(levels[k]) - 1) -= 1.0;
  }
  d_logits *= weight / slots;
  grads.lm.weight.noalias() += d_logits.transpose() * h.states;
  grads.lm.bias += d_logits.colwise().sum().transpose();
  Matrix d_states = d_logits * model.lm.weight;

  double loss = ce;
  if (sample.f == 0) {
    const double s_reg = reg_score(model.reg, h);
    const double r = s_reg - sample.overall();
    loss += config.lambda * r * r;
    const double d_reg = weight * config.lambda * 2.0 * r;
    const Eigen::Index last = h.states.rows() - 1;
    grads.reg.weight += d_reg * h.states.row(last).transpose();
    grads.reg.bias += d_reg;
    d_states.row(last) += d_reg * model.reg.weight.transpose();
  } else {
    ExpertTrace et;
    const DimensionScores pred = expert_scores(model.expert, h, &et);
    DimensionScores d_pred{};
    double sq = 0.0;
    for (int k = 0; k < kNumDimensions; ++k) {
      const double r = pred[k] - sample.scores.at(kAllDimensions[k]);
      sq += r * r;
      d_pred[k] = weight * config.mu * 2.0 * r / kNumDimensions;
    }
    loss += config.mu * sq / kNumDimensions;
    d_states += expert_backward(model.expert, et, d_pred, grads.expert);
  }
  backbone_backward(model.backbone, trace, d_states, grads.backbone);
  return loss;
}

double stage1_batch_loss_and_grad(const ModelParams& model,
                                  std::span<const ScoredSample> batch,
                                  const Stage1Config& config, ModelParams& grads) {
  if (batch.empty()) throw Error(Errc::kEmptyTrainingSet, "empty batch");
  grads = zeros_like(model);
  const double w = 1.0 / static_cast<double>(batch.size());
  const int f = model.backbone.features();
  double total = 0.0;
  for (const ScoredSample& s : batch) {
    total += stage1_loss_and_grad(model, s, derive_features(s.feature_seed, f),
                                  config, grads, w);
  }
  return total * w;
}

ModelParams train_stage1(std::span<const ScoredSample> train,
                         const Stage1Config& config,
                         const std::function<void(const EpochStats&)>& on_epoch) {
  config.validate();
  return train_stage1_from(init_model(config.seed, config.model), train, config,
                           on_epoch);
}

ModelParams train_stage1_from(ModelParams model,
                              std::span<const ScoredSample> train,
                              const Stage1Config& config,
                              const std::function<void(const EpochStats&)>& on_epoch) {
  config.validate();
  if (train.empty()) throw Error(Errc::kEmptyTrainingSet, "no training samples");
  const int f = model.backbone.features();
  std::vector<Vector> features;
  features.reserve(train.size());
  for (const ScoredSample& s : train) {
    check_flag(s);
    features.push_back(derive_features(s.feature_seed, f));
  }

  Optimizer opt({config.optimizer, config.learning_rate});
  std::mt19937_64 rng(config.seed ^ kShuffleStream);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  ModelParams grads = zeros_like(model);
  const auto params_list = model.tensors();
  const auto grads_list = grads.tensors();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      zero_tensors(grads_list);
      const double w = 1.0 / static_cast<double>(end - start);
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        batch_loss += stage1_loss_and_grad(model, train[order[i]],
                                           features[order[i]], config, grads, w);
      }
      if (!std::isfinite(batch_loss)) {
        throw Error(Errc::kNumericFailure,
                    "non-finite stage-1 loss in epoch " + std::to_string(epoch + 1));
      }
      epoch_loss += batch_loss;
      opt.step(params_list, grads_list);
    }
    if (on_epoch) {
      on_epoch({epoch + 1, epoch_loss / static_cast<double>(train.size())});
    }
  }
  return model;
}

}  // namespace hiaa
