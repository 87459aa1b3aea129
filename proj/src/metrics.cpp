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

#include "hiaa/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "hiaa/error.hpp"
#include "json_io.hpp"

namespace hiaa {
namespace {

using detail::json;

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(Errc::kLengthMismatch, std::string(what) + ": " +
                                           std::to_string(a) + " predictions vs " +
                                           std::to_string(b) + " targets");
  }
  if (a == 0) throw Error(Errc::kEmpty, std::string(what) + ": empty input");
}

std::optional<double> clamp_corr(double r) {
  return std::clamp(r, -1.0, 1.0);
}

// Counts inversions of v[lo, hi) while merge-sorting it.
std::int64_t merge_count(std::vector<double>& v, std::vector<double>& buf,
                         std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
            buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

std::int64_t tie_pairs_sorted(std::span<const double> sorted) {
  std::int64_t pairs = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto t = static_cast<std::int64_t>(j - i);
    pairs += t * (t - 1) / 2;
    i = j;
  }
  return pairs;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

json opt_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> opt_from_json(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

json row_to_json(const MetricsRow& row) {
  const TargetMetrics& m = row.metrics;
  json j;
  j["target"] = row.target;
  j["n"] = m.n;
  j["mse"] = m.regression.mse;
  j["mae"] = m.regression.mae;
  j["plcc"] = opt_json(m.correlation.plcc);
  j["srcc"] = opt_json(m.correlation.srcc);
  j["krcc"] = opt_json(m.correlation.krcc);
  j["accuracy"] = m.classification.accuracy;
  j["precision_macro"] = m.classification.precision_macro;
  j["recall_macro"] = m.classification.recall_macro;
  j["f1_macro"] = m.classification.f1_macro;
  return j;
}

MetricsRow row_from_json(const json& j) {
  MetricsRow row;
  row.target = j.at("target").get<std::string>();
  TargetMetrics& m = row.metrics;
  m.n = j.at("n").get<std::size_t>();
  m.regression.mse = j.at("mse").get<double>();
  m.regression.mae = j.at("mae").get<double>();
  m.correlation.plcc = opt_from_json(j.at("plcc"));
  m.correlation.srcc = opt_from_json(j.at("srcc"));
  m.correlation.krcc = opt_from_json(j.at("krcc"));
  m.classification.accuracy = j.at("accuracy").get<double>();
  m.classification.precision_macro = j.at("precision_macro").get<double>();
  m.classification.recall_macro = j.at("recall_macro").get<double>();
  m.classification.f1_macro = j.at("f1_macro").get<double>();
  return row;
}

TargetMetrics target_metrics(const std::vector<double>& pred,
                             const std::vector<double>& gt) {
  TargetMetrics m;
  m.n = pred.size();
  m.regression = regression_metrics(pred, gt);
  if (pred.size() >= 3) m.correlation = correlation_metrics(pred, gt);
  std::vector<RatingLevel> pl, gl;
  pl.reserve(pred.size());
  gl.reserve(gt.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    pl.push_back(rating_from_score(pred[i]));
    gl.push_back(rating_from_score(gt[i]));
  }
  m.classification = classification_metrics(pl, gl);
  return m;
}

}  // namespace

RegressionMetrics regression_metrics(std::span<const double> pred,
                                     std::span<const double> gt) {
  check_lengths(pred.size(), gt.size(), "regression metrics");
  RegressionMetrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - gt[i];
    m.mse += r * r;
    m.mae += std::abs(r);
  }
  m.mse /= static_cast<double>(pred.size());
  m.mae /= static_cast<double>(pred.size());
  return m;
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  check_lengths(a.size(), b.size(), "pearson");
  const auto n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return clamp_corr(sab / std::sqrt(saa * sbb));
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i + 1;
    while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
    // Positions i..j-1 (0-based) share the mean of ranks i+1..j.
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = mean_rank;
    i = j;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> a, std::span<const double> b) {
  check_lengths(a.size(), b.size(), "spearman");
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  return pearson(ra, rb);
}

std::optional<double> kendall_tau_b(std::span<const double> a,
                                    std::span<const double> b) {
  check_lengths(a.size(), b.size(), "kendall");
  const std::size_t n = a.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
    return a[x] < a[y] || (a[x] == a[y] && b[x] < b[y]);
  });

  std::int64_t ties_a = 0, ties_ab = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && a[idx[j]] == a[idx[i]]) ++j;
    const auto t = static_cast<std::int64_t>(j - i);
    ties_a += t * (t - 1) / 2;
    for (std::size_t k = i; k < j;) {
      std::size_t l = k + 1;
      while (l < j && b[idx[l]] == b[idx[k]]) ++l;
      const auto u = static_cast<std::int64_t>(l - k);
      ties_ab += u * (u - 1) / 2;
      k = l;
    }
    i = j;
  }

  std::vector<double> bv(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) bv[i] = b[idx[i]];
  const std::int64_t swaps = merge_count(bv, buf, 0, n);
  const std::int64_t ties_b = tie_pairs_sorted(bv);

  const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const double den = std::sqrt(static_cast<double>(total - ties_a)) *
                     std::sqrt(static_cast<double>(total - ties_b));
  if (den == 0.0) return std::nullopt;
  // concordant - discordant = total - ties_a - ties_b + ties_ab - 2 * swaps
  const auto num = static_cast<double>(total - ties_a - ties_b + ties_ab - 2 * swaps);
  return clamp_corr(num / den);
}

CorrelationMetrics correlation_metrics(std::span<const double> pred,
                                       std::span<const double> gt) {
  check_lengths(pred.size(), gt.size(), "correlation metrics");
  if (pred.size() < 3) {
    throw Error(Errc::kTooFewValues, "correlation metrics need >= 3 pairs");
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!std::isfinite(pred[i]) || !std::isfinite(gt[i])) {
      throw Error(Errc::kNonFiniteInput, "non-finite value in correlation input");
    }
  }
  return {pearson(pred, gt), spearman(pred, gt), kendall_tau_b(pred, gt)};
}

ClassificationMetrics classification_metrics(std::span<const RatingLevel> pred,
                                             std::span<const RatingLevel> gt) {
  check_lengths(pred.size(), gt.size(), "classification metrics");
  std::array<double, kNumLevels> tp{}, pred_count{}, gt_count{};
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const int p = code_of(pred[i]) - 1;
    const int g = code_of(gt[i]) - 1;
    pred_count[p] += 1.0;
    gt_count[g] += 1.0;
    if (p == g) {
      tp[p] += 1.0;
      ++correct;
    }
  }
  ClassificationMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(pred.size());
  for (int c = 0; c < kNumLevels; ++c) {
    const double prec = pred_count[c] > 0 ? tp[c] / pred_count[c] : 0.0;
    const double rec = gt_count[c] > 0 ? tp[c] / gt_count[c] : 0.0;
    const double f1 = prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    m.precision_macro += prec;
    m.recall_macro += rec;
    m.f1_macro += f1;
  }
  m.precision_macro /= kNumLevels;
  m.recall_macro /= kNumLevels;
  m.f1_macro /= kNumLevels;
  return m;
}

std::string_view head_name(HeadKind head) {
  switch (head) {
    case HeadKind::kLm: return "lm";
    case HeadKind::kReg: return "reg";
    case HeadKind::kExpert: return "expert";
    case HeadKind::kMetaVoter: return "metavoter";
  }
  return "unknown";
}

std::optional<HeadKind> head_from_name(std::string_view s) {
  for (HeadKind h : {HeadKind::kLm, HeadKind::kReg, HeadKind::kExpert,
                     HeadKind::kMetaVoter}) {
    if (head_name(h) == s) return h;
  }
  return std::nullopt;
}

const MetricsRow* MetricsReport::find(std::string_view target) const {
  for (const MetricsRow& r : rows) {
    if (r.target == target) return &r;
  }
  return nullptr;
}

MetricsReport evaluate(std::span<const ScoredSample> samples,
                       std::span<const HeadScores> predictions, HeadKind head) {
  if (predictions.size() != samples.size()) {
    throw Error(Errc::kMissingPrediction,
                std::to_string(samples.size()) + " samples but " +
                    std::to_string(predictions.size()) + " predictions");
  }
  if (samples.empty()) throw Error(Errc::kEmpty, "nothing to evaluate");

  auto overall_pred = [head](const HeadScores& s, const std::string& id) {
    switch (head) {
      case HeadKind::kLm: return s.lm;
      case HeadKind::kReg: return s.reg;
      case HeadKind::kExpert: return s.expert[index_of(Dimension::kOverallAesthetic)];
      case HeadKind::kMetaVoter:
        if (!s.fused) {
          throw Error(Errc::kMissingPrediction, "no fused score for " + id);
        }
        return *s.fused;
    }
    return 0.0;
  };

  MetricsReport report;
  report.head = std::string(head_name(head));
  report.n = samples.size();

  std::vector<double> pred, gt;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    pred.push_back(clamp01(overall_pred(predictions[i], samples[i].sample_id)));
    gt.push_back(samples[i].overall());
  }
  report.rows.push_back({"overall", target_metrics(pred, gt)});

  if (head == HeadKind::kLm || head == HeadKind::kExpert) {
    for (Dimension d : kAllDimensions) {
      pred.clear();
      gt.clear();
      for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].f != 1) continue;
        const HeadScores& s = predictions[i];
        const double v = head == HeadKind::kLm ? s.lm_dims[index_of(d)]
                                               : s.expert[index_of(d)];
        pred.push_back(clamp01(v));
        gt.push_back(samples[i].scores.at(d));
      }
      if (pred.empty()) continue;
      report.rows.push_back({std::string(name(d)), target_metrics(pred, gt)});
    }
  }
  return report;
}

std::string report_to_json(const EvalBundle& bundle) {
  json doc;
  doc["format_version"] = 1;
  doc["level_source"] = "rating_from_score(clamp(head score, 0, 1))";
  doc["config"] = bundle.config_json.empty()
                      ? json::object()
                      : json::parse(bundle.config_json);
  json reports = json::array();
  for (const MetricsReport& r : bundle.reports) {
    json jr;
    jr["head"] = r.head;
    jr["n"] = r.n;
    json rows = json::array();
    for (const MetricsRow& row : r.rows) rows.push_back(row_to_json(row));
    jr["rows"] = std::move(rows);
    reports.push_back(std::move(jr));
  }
  doc["reports"] = std::move(reports);
  return doc.dump(2) + "\n";
}

EvalBundle report_from_json(const std::string& text) {
  const json doc = detail::parse_json(text, "report");
  EvalBundle bundle;
  try {
    if (doc.contains("config") && !doc.at("config").empty()) {
      bundle.config_json = doc.at("config").dump();
    }
    for (const json& jr : doc.at("reports")) {
      MetricsReport r;
      r.head = jr.at("head").get<std::string>();
      r.n = jr.at("n").get<std::size_t>();
      for (const json& row : jr.at("rows")) r.rows.push_back(row_from_json(row));
      bundle.reports.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kCorruptFile, std::string("report: ") + e.what());
  }
  return bundle;
}

void write_report(const std::filesystem::path& path, const EvalBundle& bundle) {
  detail::write_text_file(path, report_to_json(bundle));
}

EvalBundle read_report(const std::filesystem::path& path) {
  return report_from_json(detail::read_text_file(path));
}

std::string report_to_text(const EvalBundle& bundle) {
  constexpr std::array<const char*, kNumDimensions> kLetters = {
      "A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L"};
  constexpr int kLabelWidth = 10;
  constexpr int kCellWidth = 8;

  auto cell = [](std::optional<double> v) {
    char buf[32];
    if (!v) return std::string("n/a");
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return std::string(buf);
  };
  auto pad = [](const std::string& s, int width) {
    return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), ' ') + s;
  };

  std::ostringstream out;
  out << "Dimensions: ";
  for (int k = 0; k < kNumDimensions; ++k) {
    out << kLetters[k] << "=" << name(kAllDimensions[k])
        << (k + 1 < kNumDimensions ? ", " : "\n");
  }
  out << "Levels: rating_from_score(clamp(head score, 0, 1))\n";

  for (const MetricsReport& r : bundle.reports) {
    out << "\n[" << r.head << "]  n=" << r.n << "\n";
    std::vector<const MetricsRow*> cols;
    std::vector<std::string> labels;
    for (int k = 0; k < kNumDimensions; ++k) {
      if (const MetricsRow* row = r.find(name(kAllDimensions[k]))) {
        cols.push_back(row);
        labels.emplace_back(kLetters[k]);
      }
    }
    if (const MetricsRow* row = r.find("overall")) {
      cols.push_back(row);
      labels.emplace_back("all");
    }
    if (cols.size() > 1) {
      // Group banner: facial A-F, general appearance G-J, environment K,
      // overall L.
      const int group_cells[4] = {6, 4, 1, 1};
      const char* group_names[4] = {"facial", "general appearance", "env", "overall"};
      out << std::string(kLabelWidth, ' ');
      for (int g = 0; g < 4; ++g) {
        const int width = group_cells[g] * (kCellWidth + 1);
        std::string title = group_names[g];
        if (static_cast<int>(title.size()) > width - 1) title.resize(static_cast<std::size_t>(width - 1));
        out << " " << title << std::string(static_cast<std::size_t>(width - 1 - static_cast<int>(title.size())), ' ');
      }
      out << "\n";
    }
    out << pad("metric", kLabelWidth);
    for (const std::string& l : labels) out << " " << pad(l, kCellWidth);
    out << "\n";
    auto line = [&](const char* label, auto getter) {
      out << pad(label, kLabelWidth);
      for (const MetricsRow* row : cols) {
        out << " " << pad(cell(getter(row->metrics)), kCellWidth);
      }
      out << "\n";
    };
    out << pad("n", kLabelWidth);
    for (const MetricsRow* row : cols) {
      out << " " << pad(std::to_string(row->metrics.n), kCellWidth);
    }
    out << "\n";
    line("MSE", [](const TargetMetrics& m) { return std::optional<double>(m.regression.mse); });
    line("MAE", [](const TargetMetrics& m) { return std::optional<double>(m.regression.mae); });
    line("PLCC", [](const TargetMetrics& m) { return m.correlation.plcc; });
    line("SRCC", [](const TargetMetrics& m) { return m.correlation.srcc; });
    line("KRCC", [](const TargetMetrics& m) { return m.correlation.krcc; });
    line("Acc", [](const TargetMetrics& m) { return std::optional<double>(m.classification.accuracy); });
    line("mPrec", [](const TargetMetrics& m) { return std::optional<double>(m.classification.precision_macro); });
    line("mRecall", [](const TargetMetrics& m) { return std::optional<double>(m.classification.recall_macro); });
    line("mF1", [](const TargetMetrics& m) { return std::optional<double>(m.classification.f1_macro); });
  }
  return out.str();
}

}  // namespace hiaa
