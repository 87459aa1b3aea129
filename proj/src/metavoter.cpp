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

#include "hiaa/metavoter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "hiaa/error.hpp"
#include "init.hpp"

namespace hiaa {
namespace {

constexpr std::uint64_t kVoterShuffleStream = 0xd1b54a32d192ed03ULL;

using RowVector = Eigen::RowVectorXd;

struct BnCache {
  Matrix xhat;
  RowVector inv_std;
};

BatchNorm make_bn(int h) {
  return {Vector::Ones(h), Vector::Zero(h), Vector::Zero(h), Vector::Ones(h)};
}

// Batch-statistics normalization; returns gamma * xhat + beta.
Matrix bn_train(const BatchNorm& bn, const Matrix& z, double eps, BnCache& cache,
                RowVector& mean, RowVector& var) {
  const auto n = static_cast<double>(z.rows());
  mean = z.colwise().sum() / n;
  Matrix centered = z.rowwise() - mean;
  var = centered.array().square().colwise().sum().matrix() / n;
  cache.inv_std = (var.array() + eps).rsqrt().matrix();
  cache.xhat = centered.array().rowwise() * cache.inv_std.array();
  Matrix y = cache.xhat.array().rowwise() * bn.gamma.transpose().array();
  y.rowwise() += bn.beta.transpose();
  return y;
}

Matrix bn_eval(const BatchNorm& bn, const Matrix& z, double eps) {
  const RowVector scale =
      (bn.gamma.array() / (bn.running_var.array() + eps).sqrt()).matrix().transpose();
  Matrix y = (z.rowwise() - bn.running_mean.transpose()).array().rowwise() *
             scale.array();
  y.rowwise() += bn.beta.transpose();
  return y;
}

Matrix bn_backward(const BatchNorm& bn, const BnCache& cache, const Matrix& dy,
                   BatchNorm& grad) {
  const auto n = static_cast<double>(dy.rows());
  grad.gamma += (dy.array() * cache.xhat.array()).colwise().sum().matrix().transpose();
  grad.beta += dy.colwise().sum().transpose();
  const Matrix dxhat = dy.array().rowwise() * bn.gamma.transpose().array();
  const RowVector sum_dxhat = dxhat.colwise().sum();
  const RowVector sum_dxhat_xhat =
      (dxhat.array() * cache.xhat.array()).colwise().sum().matrix();
  Matrix dz = (n * dxhat.array()).matrix();
  dz.rowwise() -= sum_dxhat;
  dz -= (cache.xhat.array().rowwise() * sum_dxhat_xhat.array()).matrix();
  return (dz.array().rowwise() * (cache.inv_std.array() / n)).matrix();
}

Matrix to_matrix(std::span<const VoterInput> batch) {
  Matrix x(static_cast<Eigen::Index>(batch.size()), 3);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (int j = 0; j < 3; ++j) {
      if (!std::isfinite(batch[i][j])) {
        throw Error(Errc::kNonFiniteInput, "non-finite MetaVoter input");
      }
      x(static_cast<Eigen::Index>(i), j) = batch[i][j];
    }
  }
  return x;
}

Matrix affine(const Matrix& x, const Matrix& w, const Vector& b) {
  Matrix z = x * w.transpose();
  z.rowwise() += b.transpose();
  return z;
}

struct TrainPass {
  Matrix x, z1, y1, a1, z2, y2, a2;
  BnCache c1, c2;
  RowVector mean1, var1, mean2, var2;
  Vector out;
};

TrainPass forward_train_pass(const MetaVoterParams& p,
                             std::span<const VoterInput> batch) {
  if (batch.size() < 2) {
    throw Error(Errc::kBatchTooSmall,
                "train-mode MetaVoter needs a batch of at least 2");
  }
  TrainPass t;
  t.x = to_matrix(batch);
  t.z1 = affine(t.x, p.w1, p.b1);
  t.y1 = bn_train(p.bn1, t.z1, p.epsilon, t.c1, t.mean1, t.var1);
  t.a1 = t.y1.cwiseMax(0.0);
  t.z2 = affine(t.a1, p.w2, p.b2);
  t.y2 = bn_train(p.bn2, t.z2, p.epsilon, t.c2, t.mean2, t.var2);
  t.a2 = t.y2.cwiseMax(0.0);
  t.out = (t.a2 * p.w3).array() + p.b3;
  return t;
}

void update_running(BatchNorm& bn, const RowVector& mean, const RowVector& var,
                    double m) {
  bn.running_mean = (1.0 - m) * bn.running_mean + m * mean.transpose();
  bn.running_var = (1.0 - m) * bn.running_var + m * var.transpose();
}

BatchNorm bn_zeros_like(const BatchNorm& bn) {
  const auto h = bn.gamma.size();
  return {Vector::Zero(h), Vector::Zero(h), Vector::Zero(h), Vector::Zero(h)};
}

}  // namespace

std::vector<TensorRef> MetaVoterParams::tensors() {
  return {tensor_ref("w1", w1),          tensor_ref("b1", b1),
          tensor_ref("bn1.gamma", bn1.gamma), tensor_ref("bn1.beta", bn1.beta),
          tensor_ref("w2", w2),          tensor_ref("b2", b2),
          tensor_ref("bn2.gamma", bn2.gamma), tensor_ref("bn2.beta", bn2.beta),
          tensor_ref("w3", w3),          tensor_ref("b3", b3)};
}

void MetaVoterConfig::validate() const {
  if (hidden < 1) throw Error(Errc::kConfigError, "voter hidden width must be >= 1");
  if (!(momentum >= 0.0 && momentum <= 1.0)) {
    throw Error(Errc::kConfigError, "voter momentum must lie in [0,1]");
  }
  if (!(epsilon > 0.0)) throw Error(Errc::kConfigError, "voter epsilon must be > 0");
  if (epochs < 1) throw Error(Errc::kConfigError, "voter epochs must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(Errc::kConfigError, "voter learning_rate must be finite and >= 0");
  }
  if (batch_size < 2) {
    throw Error(Errc::kConfigError, "voter batch_size must be >= 2");
  }
}

MetaVoterParams init_metavoter(const MetaVoterConfig& config) {
  config.validate();
  const int h = config.hidden;
  std::mt19937_64 rng(config.seed);
  MetaVoterParams p;
  p.w1 = detail::glorot_uniform(h, 3, rng);
  p.b1 = Vector::Zero(h);
  p.bn1 = make_bn(h);
  p.w2 = detail::glorot_uniform(h, h, rng);
  p.b2 = Vector::Zero(h);
  p.bn2 = make_bn(h);
  p.w3 = detail::glorot_uniform(1, h, rng).transpose();
  p.b3 = 0.0;
  p.momentum = config.momentum;
  p.epsilon = config.epsilon;
  return p;
}

MetaVoterParams zeros_like(const MetaVoterParams& p) {
  MetaVoterParams z;
  z.w1 = Matrix::Zero(p.w1.rows(), p.w1.cols());
  z.b1 = Vector::Zero(p.b1.size());
  z.bn1 = bn_zeros_like(p.bn1);
  z.w2 = Matrix::Zero(p.w2.rows(), p.w2.cols());
  z.b2 = Vector::Zero(p.b2.size());
  z.bn2 = bn_zeros_like(p.bn2);
  z.w3 = Vector::Zero(p.w3.size());
  z.b3 = 0.0;
  z.momentum = p.momentum;
  z.epsilon = p.epsilon;
  return z;
}

double metavoter_forward(const MetaVoterParams& p, const VoterInput& input) {
  const Matrix x = to_matrix({&input, 1});
  const Matrix a1 = bn_eval(p.bn1, affine(x, p.w1, p.b1), p.epsilon).cwiseMax(0.0);
  const Matrix a2 = bn_eval(p.bn2, affine(a1, p.w2, p.b2), p.epsilon).cwiseMax(0.0);
  return a2.row(0).dot(p.w3) + p.b3;
}

std::vector<double> metavoter_forward_train(MetaVoterParams& p,
                                            std::span<const VoterInput> batch) {
  const TrainPass t = forward_train_pass(p, batch);
  update_running(p.bn1, t.mean1, t.var1, p.momentum);
  update_running(p.bn2, t.mean2, t.var2, p.momentum);
  return {t.out.data(), t.out.data() + t.out.size()};
}

double mae_loss(std::span<const double> predicted, std::span<const double> target) {
  if (predicted.size() != target.size()) {
    throw Error(Errc::kLengthMismatch, "mae: length mismatch");
  }
  if (predicted.empty()) throw Error(Errc::kEmpty, "mae: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    total += std::abs(predicted[i] - target[i]);
  }
  return total / static_cast<double>(predicted.size());
}

double metavoter_loss_and_grad(const MetaVoterParams& p,
                               std::span<const VoterInput> batch,
                               std::span<const double> targets,
                               MetaVoterParams& grads) {
  if (batch.size() != targets.size()) {
    throw Error(Errc::kLengthMismatch, "MetaVoter inputs vs targets");
  }
  const TrainPass t = forward_train_pass(p, batch);
  const auto n = static_cast<double>(batch.size());
  grads = zeros_like(p);

  Vector d_out(t.out.size());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < t.out.size(); ++i) {
    const double r = t.out[i] - targets[static_cast<std::size_t>(i)];
    loss += std::abs(r);
    d_out[i] = (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0)) / n;
  }

  grads.w3 = t.a2.transpose() * d_out;
  grads.b3 = d_out.sum();
  Matrix dy2 = d_out * p.w3.transpose();
  dy2 = (t.y2.array() > 0.0).select(dy2, 0.0);
  const Matrix dz2 = bn_backward(p.bn2, t.c2, dy2, grads.bn2);
  grads.w2 = dz2.transpose() * t.a1;
  grads.b2 = dz2.colwise().sum().transpose();
  Matrix dy1 = dz2 * p.w2;
  dy1 = (t.y1.array() > 0.0).select(dy1, 0.0);
  const Matrix dz1 = bn_backward(p.bn1, t.c1, dy1, grads.bn1);
  grads.w1 = dz1.transpose() * t.x;
  grads.b1 = dz1.colwise().sum().transpose();
  return loss / n;
}

MetaVoterParams train_metavoter(std::span<const VoterInput> inputs,
                                std::span<const double> targets,
                                const MetaVoterConfig& config) {
  config.validate();
  if (inputs.empty()) throw Error(Errc::kEmptyTrainingSet, "no MetaVoter data");
  if (inputs.size() != targets.size()) {
    throw Error(Errc::kLengthMismatch, "MetaVoter inputs vs targets");
  }
  if (inputs.size() < 2) {
    throw Error(Errc::kBatchTooSmall, "MetaVoter training needs >= 2 samples");
  }
  MetaVoterParams p = init_metavoter(config);
  MetaVoterParams grads = zeros_like(p);
  Optimizer opt({config.optimizer, config.learning_rate});
  std::mt19937_64 rng(config.seed ^ kVoterShuffleStream);
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), 0);
  const auto bs = static_cast<std::size_t>(config.batch_size);

  std::vector<VoterInput> bx;
  std::vector<double> by;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      std::size_t end = std::min(order.size(), start + bs);
      if (order.size() - end == 1) end = order.size();
      bx.clear();
      by.clear();
      for (std::size_t i = start; i < end; ++i) {
        bx.push_back(inputs[order[i]]);
        by.push_back(targets[order[i]]);
      }
      const double loss = metavoter_loss_and_grad(p, bx, by, grads);
      if (!std::isfinite(loss)) {
        throw Error(Errc::kNumericFailure, "non-finite MetaVoter loss");
      }
      metavoter_forward_train(p, bx);
      opt.step(p.tensors(), grads.tensors());
      if (end == order.size()) break;
    }
  }

  // Population statistics of the final network, layer by layer.
  const Matrix x = to_matrix(inputs);
  const Matrix z1 = affine(x, p.w1, p.b1);
  p.bn1.running_mean = z1.colwise().mean().transpose();
  p.bn1.running_var =
      (z1.rowwise() - p.bn1.running_mean.transpose()).array().square().colwise().mean().transpose();
  const Matrix a1 = bn_eval(p.bn1, z1, p.epsilon).cwiseMax(0.0);
  const Matrix z2 = affine(a1, p.w2, p.b2);
  p.bn2.running_mean = z2.colwise().mean().transpose();
  p.bn2.running_var =
      (z2.rowwise() - p.bn2.running_mean.transpose()).array().square().colwise().mean().transpose();
  return p;
}

}  // namespace hiaa
