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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hiaa/error.hpp"
#include "hiaa/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hiaa;

namespace {

std::vector<RatingLevel> levels(std::initializer_list<int> codes) {
  std::vector<RatingLevel> out;
  for (int c : codes) out.push_back(level_from_code(c));
  return out;
}

void check_close(std::optional<double> a, std::optional<double> b) {
  REQUIRE(a.has_value() == b.has_value());
  if (a) CHECK(std::abs(*a - *b) < 1e-9);
}

}  // namespace

TEST_CASE("regression metrics") {
  const std::vector<double> g{0.1, 0.5, 0.9};
  auto r = regression_metrics(g, g);
  CHECK(r.mse == 0.0);
  CHECK(r.mae == 0.0);
  const std::vector<double> p{0.4, 0.8, 1.2};
  r = regression_metrics(p, g);
  CHECK(r.mse == doctest::Approx(0.09));
  CHECK(r.mae == doctest::Approx(0.3));
  r = regression_metrics(std::vector<double>{0, 1}, std::vector<double>{1, 0});
  CHECK(r.mse == 1.0);
  CHECK(r.mae == 1.0);
  CHECK_THROWS_AS(regression_metrics(p, std::vector<double>{0.1}), Error);
}

TEST_CASE("correlation examples") {
  const std::vector<double> g{0.1, 0.4, 0.2, 0.9, 0.5};
  auto c = correlation_metrics(g, g);
  CHECK(*c.plcc == doctest::Approx(1.0));
  CHECK(*c.srcc == doctest::Approx(1.0));
  CHECK(*c.krcc == doctest::Approx(1.0));

  std::vector<double> rev;
  for (double v : g) rev.push_back(2.0 - 3.0 * v);
  c = correlation_metrics(rev, g);
  CHECK(*c.plcc == doctest::Approx(-1.0));
  CHECK(*c.srcc == doctest::Approx(-1.0));
  CHECK(*c.krcc == doctest::Approx(-1.0));

  const std::vector<double> a{1, 2, 3, 4}, b{1, 3, 2, 4};
  CHECK(*kendall_tau_b(a, b) == doctest::Approx(4.0 / 6.0));

  const std::vector<double> flat{0.3, 0.3, 0.3};
  c = correlation_metrics(flat, std::vector<double>{0.1, 0.2, 0.3});
  CHECK_FALSE(c.plcc.has_value());
  CHECK_FALSE(c.srcc.has_value());
  CHECK_FALSE(c.krcc.has_value());

  CHECK_THROWS_AS(correlation_metrics(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
                  Error);
  CHECK_THROWS_AS(
      correlation_metrics(std::vector<double>{1, NAN, 2}, std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("average ranks") {
  const std::vector<double> v{10, 20, 10, 30, 20, 20};
  const auto r = average_ranks(v);
  CHECK(r == std::vector<double>{1.5, 4.0, 1.5, 6.0, 4.0, 4.0});
  CHECK(r == test::ranks_oracle(v));
}

TEST_CASE("correlations agree with brute-force oracles") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 60;
    const bool ties = trial % 2 == 0;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (ties) {
        a[i] = static_cast<double>(rng() % 4);
        b[i] = static_cast<double>(rng() % 3);
      } else {
        a[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
        b[i] = a[i] + std::uniform_real_distribution<double>(-1, 1)(rng);
      }
    }
    check_close(pearson(a, b), test::pearson_oracle(a, b));
    check_close(spearman(a, b), test::spearman_oracle(a, b));
    check_close(kendall_tau_b(a, b), test::kendall_oracle(a, b));
  }
}

TEST_CASE("classification metrics") {
  auto all = levels({1, 2, 3, 4, 5});
  auto m = classification_metrics(all, all);
  CHECK(m.accuracy == 1.0);
  CHECK(m.precision_macro == 1.0);
  CHECK(m.recall_macro == 1.0);
  CHECK(m.f1_macro == 1.0);

  std::vector<RatingLevel> gt, pred;
  for (int z = 1; z <= 5; ++z) {
    for (int k = 0; k < 20; ++k) {
      gt.push_back(level_from_code(z));
      pred.push_back(RatingLevel::kFair);
    }
  }
  m = classification_metrics(pred, gt);
  CHECK(m.accuracy == doctest::Approx(0.2));
  CHECK(m.recall_macro == doctest::Approx(0.2));
  CHECK(m.precision_macro == doctest::Approx(0.04));
  CHECK(m.f1_macro == doctest::Approx(1.0 / 15.0));

  m = classification_metrics(levels({4}), levels({4}));
  CHECK(m.accuracy == 1.0);
  CHECK(m.precision_macro == doctest::Approx(0.2));
  CHECK(m.recall_macro == doctest::Approx(0.2));
  CHECK(m.f1_macro == doctest::Approx(0.2));
}

TEST_CASE("evaluate row populations") {
  std::mt19937_64 rng(2);
  std::vector<ScoredSample> samples;
  std::vector<HeadScores> preds;
  for (int i = 0; i < 30; ++i) {
    samples.push_back(test::random_sample(rng, i % 3 == 0 ? 0 : 1, std::to_string(i)));
    HeadScores h;
    h.lm = samples.back().overall();
    h.reg = samples.back().overall();
    for (Dimension d : kAllDimensions) {
      auto it = samples.back().scores.find(d);
      const double v = it == samples.back().scores.end() ? 0.5 : it->second;
      h.expert[index_of(d)] = v;
      h.lm_dims[index_of(d)] = v;
    }
    h.fused = samples.back().overall();
    preds.push_back(h);
  }
  for (HeadKind head : {HeadKind::kLm, HeadKind::kReg, HeadKind::kExpert, HeadKind::kMetaVoter}) {
    const MetricsReport r = evaluate(samples, preds, head);
    CHECK(r.head == head_name(head));
    const MetricsRow* overall = r.find("overall");
    REQUIRE(overall != nullptr);
    CHECK(overall->metrics.n == 30);
    CHECK(overall->metrics.regression.mse == 0.0);
    CHECK(*overall->metrics.correlation.plcc == doctest::Approx(1.0));
    CHECK(overall->metrics.classification.accuracy == 1.0);
    const bool per_dim = head == HeadKind::kLm || head == HeadKind::kExpert;
    CHECK(r.rows.size() == (per_dim ? 13u : 1u));
    if (per_dim) {
      const MetricsRow* looks = r.find("looks");
      REQUIRE(looks != nullptr);
      CHECK(looks->metrics.n == 20);
      CHECK(looks->metrics.regression.mae == 0.0);
      CHECK(*looks->metrics.correlation.krcc == doctest::Approx(1.0));
    }
  }
  preds[4].fused.reset();
  try {
    evaluate(samples, preds, HeadKind::kMetaVoter);
    FAIL("expected MissingPrediction");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kMissingPrediction);
  }
  preds.pop_back();
  CHECK_THROWS_AS(evaluate(samples, preds, HeadKind::kReg), Error);
}

TEST_CASE("predictions are clamped before scoring") {
  std::vector<ScoredSample> s;
  std::vector<HeadScores> p;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 4; ++i) {
    s.push_back(test::random_sample(rng, 0, std::to_string(i)));
    HeadScores h;
    h.reg = i % 2 == 0 ? -3.0 : 7.0;
    p.push_back(h);
  }
  const auto r = evaluate(s, p, HeadKind::kReg);
  CHECK(r.rows[0].metrics.regression.mae <= 1.0);
}

TEST_CASE("report serialization round trip") {
  std::mt19937_64 rng(3);
  std::vector<ScoredSample> samples;
  std::vector<HeadScores> preds;
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 12; ++i) {
    samples.push_back(test::random_sample(rng, i % 2, std::to_string(i)));
    HeadScores h;
    h.lm = u(rng);
    h.reg = u(rng);
    for (auto& v : h.expert) v = u(rng);
    for (auto& v : h.lm_dims) v = u(rng);
    preds.push_back(h);
  }
  EvalBundle b;
  b.config_json = R"({"seed":4})";
  b.reports.push_back(evaluate(samples, preds, HeadKind::kLm));
  b.reports.push_back(evaluate(samples, preds, HeadKind::kReg));
  // Force an undefined correlation so null handling is covered.
  std::vector<HeadScores> flat = preds;
  for (auto& h : flat) h.lm = 0.5;
  b.reports.push_back(evaluate(samples, flat, HeadKind::kLm));

  const std::string text = report_to_json(b);
  const EvalBundle back = report_from_json(text);
  REQUIRE(back.reports.size() == b.reports.size());
  for (std::size_t i = 0; i < b.reports.size(); ++i) {
    REQUIRE(back.reports[i].rows.size() == b.reports[i].rows.size());
    for (std::size_t k = 0; k < b.reports[i].rows.size(); ++k) {
      const auto& x = b.reports[i].rows[k].metrics;
      const auto& y = back.reports[i].rows[k].metrics;
      CHECK(std::abs(x.regression.mse - y.regression.mse) < 1e-12);
      CHECK(std::abs(x.classification.f1_macro - y.classification.f1_macro) < 1e-12);
      CHECK(x.correlation.plcc.has_value() == y.correlation.plcc.has_value());
      if (x.correlation.plcc) CHECK(std::abs(*x.correlation.plcc - *y.correlation.plcc) < 1e-12);
    }
  }
  CHECK(report_to_json(back) == text);
  CHECK_FALSE(back.reports[2].rows[0].metrics.correlation.plcc.has_value());

  const std::string table = report_to_text(b);
  CHECK(table.find("[lm]") != std::string::npos);
  CHECK(table.find("[reg]") != std::string::npos);
  CHECK(table.find("n/a") != std::string::npos);
  CHECK(table.find("general appearance") != std::string::npos);
}
