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

#ifndef HIAA_SRC_INIT_HPP_
#define HIAA_SRC_INIT_HPP_

#include <cmath>
#include <random>

#include "hiaa/tensor.hpp"

namespace hiaa::detail {

// Uniform in [-a, a] with a = sqrt(6 / (fan_in + fan_out)); entries are
// drawn in column-major order.
inline Matrix glorot_uniform(Eigen::Index fan_out, Eigen::Index fan_in,
                             std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-a, a);
  Matrix m(fan_out, fan_in);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

}  // namespace hiaa::detail

#endif  // HIAA_SRC_INIT_HPP_
