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

#ifndef HIAA_TESTS_SUPPORT_HPP_
#define HIAA_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hiaa/datapipe.hpp"
#include "hiaa/taxonomy.hpp"
#include "hiaa/tensor.hpp"

namespace hiaa::test {

inline ScoredSample random_sample(std::mt19937_64& rng, int f, const std::string& id) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScoredSample s;
  s.sample_id = id;
  s.source = f == 1 ? std::string(kManualSource) : std::string("src");
  s.f = f;
  s.feature_seed = static_cast<std::int64_t>(rng() >> 1);
  if (f == 1) {
    for (Dimension d : kAllDimensions) s.scores[d] = u(rng);
  } else {
    s.scores[Dimension::kOverallAesthetic] = u(rng);
  }
  for (const auto& [d, v] : s.scores) s.levels[d] = rating_from_score(v);
  return s;
}

struct GradCheck {
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0;
};

// Central finite differences over every entry of every tensor. The
// relative error is |a - n| / max(|a|, |n|, 1e-6).
inline GradCheck check_gradients(const std::vector<TensorRef>& params,
                                 const std::vector<TensorRef>& analytic,
                                 const std::function<long double()>& loss,
                                 double step = 1e-5) {
  GradCheck out;
  for (std::size_t t = 0; t < params.size(); ++t) {
    const TensorRef& p = params[t];
    const TensorRef& g = analytic[t];
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      const double saved = p.data[k];
      p.data[k] = saved + step;
      const long double up = loss();
      p.data[k] = saved - step;
      const long double down = loss();
      p.data[k] = saved;
      const double numeric = static_cast<double>((up - down) / (2.0L * step));
      const double a = g.data[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      const double rel = std::abs(a - numeric) / denom;
      ++out.checked;
      if (rel > out.worst) {
        out.worst = rel;
        out.where = p.name + "[" + std::to_string(k) + "] analytic=" + std::to_string(a) +
                    " numeric=" + std::to_string(numeric);
      }
    }
  }
  return out;
}

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("hiaa-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace hiaa::test

#endif  // HIAA_TESTS_SUPPORT_HPP_
