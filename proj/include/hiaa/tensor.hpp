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

#ifndef HIAA_TENSOR_HPP_
#define HIAA_TENSOR_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hiaa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Non-owning view of one named parameter tensor (column-major storage).
struct TensorRef {
  std::string name;
  double* data;
  Eigen::Index rows;
  Eigen::Index cols;

  Eigen::Index size() const { return rows * cols; }
  Eigen::Map<Matrix> map() const { return {data, rows, cols}; }
};

inline TensorRef tensor_ref(std::string name, Matrix& m) {
  return {std::move(name), m.data(), m.rows(), m.cols()};
}
inline TensorRef tensor_ref(std::string name, Vector& v) {
  return {std::move(name), v.data(), v.rows(), 1};
}
inline TensorRef tensor_ref(std::string name, double& x) {
  return {std::move(name), &x, 1, 1};
}

// Sets every entry of every tensor to zero.
inline void zero_tensors(const std::vector<TensorRef>& tensors) {
  for (const TensorRef& t : tensors) t.map().setZero();
}

}  // namespace hiaa

#endif  // HIAA_TENSOR_HPP_
