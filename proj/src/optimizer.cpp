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

#include "hiaa/optimizer.hpp"

#include <cmath>

#include "hiaa/error.hpp"

namespace hiaa {

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

std::optional<OptimizerKind> optimizer_from_name(std::string_view s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  return std::nullopt;
}

void Optimizer::step(const std::vector<TensorRef>& params,
                     const std::vector<TensorRef>& grads) {
  if (params.size() != grads.size()) {
    throw Error(Errc::kShapeMismatch, "optimizer: parameter/gradient count");
  }
  ++t_;
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerKind::kSgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i].map() -= lr * grads[i].map();
    }
    return;
  }

  if (m_.empty()) {
    for (const TensorRef& p : params) {
      m_.push_back(Matrix::Zero(p.rows, p.cols));
      v_.push_back(Matrix::Zero(p.rows, p.cols));
    }
  }
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto g = grads[i].map();
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g.cwiseProduct(g);
    params[i].map().array() -=
        lr * (m_[i].array() / c1) /
        ((v_[i].array() / c2).sqrt() + config_.epsilon);
  }
}

}  // namespace hiaa
