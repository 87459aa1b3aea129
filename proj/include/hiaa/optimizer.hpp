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

#ifndef HIAA_OPTIMIZER_HPP_
#define HIAA_OPTIMIZER_HPP_

#include <optional>
#include <string_view>
#include <vector>

#include "hiaa/tensor.hpp"

namespace hiaa {

enum class OptimizerKind { kSgd, kAdam };

std::string_view optimizer_name(OptimizerKind kind);
std::optional<OptimizerKind> optimizer_from_name(std::string_view s);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First-order update over a fixed list of tensors. Moment buffers are
// allocated on the first step and keyed by tensor position.
class Optimizer {
 public:
  explicit Optimizer(const OptimizerConfig& config) : config_(config) {}

  void step(const std::vector<TensorRef>& params,
            const std::vector<TensorRef>& grads);

  long steps_taken() const { return t_; }

 private:
  OptimizerConfig config_;
  long t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace hiaa

#endif  // HIAA_OPTIMIZER_HPP_
