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

#include "hiaa/hiaa.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "hiaa/backbone.hpp"
#include "hiaa/checkpoint.hpp"
#include "hiaa/error.hpp"
#include "hiaa/heads.hpp"
#include "hiaa/pipeline.hpp"
#include "hiaa/taxonomy.hpp"

struct hiaa_model {
  hiaa::ModelCheckpoint checkpoint;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_category;

hiaa_status status_for(hiaa::Errc code) {
  using hiaa::Errc;
  switch (code) {
    case Errc::kConfigError:
    case Errc::kBadFraction:
    case Errc::kBatchTooSmall:
      return HIAA_ERR_CONFIG;
    case Errc::kMissingInput:
      return HIAA_ERR_MISSING_INPUT;
    case Errc::kNumericFailure:
    case Errc::kNonFiniteInput:
      return HIAA_ERR_NUMERIC;
    default:
      return HIAA_ERR_FORMAT;
  }
}

void clear_error() {
  g_last_error.clear();
  g_last_category.clear();
}

template <typename Fn>
hiaa_status guarded(Fn&& fn) {
  clear_error();
  try {
    fn();
    return HIAA_OK;
  } catch (const hiaa::Error& e) {
    g_last_error = e.what();
    g_last_category = std::string(hiaa::errc_name(e.code()));
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    g_last_category = "internal";
  } catch (const std::exception& e) {
    g_last_error = e.what();
    g_last_category = "internal";
  } catch (...) {
    g_last_error = "unknown failure";
    g_last_category = "internal";
  }
  return HIAA_ERR_INTERNAL;
}

hiaa::RunConfig resolve(const char* config_json) {
  if (config_json == nullptr || *config_json == '\0') {
    hiaa::RunConfig c;
    c.validate();
    return c;
  }
  return hiaa::config_from_json(config_json);
}

std::filesystem::path require_path(const char* p, const char* what) {
  if (p == nullptr || *p == '\0') {
    throw hiaa::Error(hiaa::Errc::kConfigError, std::string("no ") + what + " path given");
  }
  return std::filesystem::path(p);
}

void require_ptr(const void* p, const char* what) {
  if (p == nullptr) {
    throw hiaa::Error(hiaa::Errc::kConfigError, std::string(what) + " must not be NULL");
  }
}

}  // namespace

extern "C" {

const char* hiaa_version(void) { return "1.0.0"; }

const char* hiaa_status_name(hiaa_status status) {
  switch (status) {
    case HIAA_OK: return "ok";
    case HIAA_ERR_INTERNAL: return "internal";
    case HIAA_ERR_CONFIG: return "config_error";
    case HIAA_ERR_MISSING_INPUT: return "missing_input";
    case HIAA_ERR_FORMAT: return "format_error";
    case HIAA_ERR_NUMERIC: return "numeric_failure";
  }
  return "unknown";
}

const char* hiaa_last_error(void) { return g_last_error.c_str(); }
const char* hiaa_last_error_category(void) { return g_last_category.c_str(); }

void hiaa_string_free(char* s) { std::free(s); }

hiaa_status hiaa_config_resolve(const char* config_json, char** resolved) {
  return guarded([&] {
    require_ptr(resolved, "resolved");
    const std::string text = hiaa::config_to_json(resolve(config_json));
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (buf == nullptr) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *resolved = buf;
  });
}

hiaa_status hiaa_cmd_synth(const char* config_json, const char* out_path) {
  return guarded([&] {
    const auto config = resolve(config_json);
    hiaa::run_synth(config, require_path(out_path, "output"));
  });
}

hiaa_status hiaa_cmd_ingest(const char* records_path, const char* out_path) {
  return guarded([&] {
    hiaa::run_ingest(require_path(records_path, "records"),
                     require_path(out_path, "output"));
  });
}

hiaa_status hiaa_cmd_genqa(const char* config_json, const char* samples_path,
                           const char* out_path) {
  return guarded([&] {
    const auto config = resolve(config_json);
    hiaa::run_genqa(config, require_path(samples_path, "samples"),
                    require_path(out_path, "output"));
  });
}

hiaa_status hiaa_cmd_split(const char* config_json, const char* samples_path,
                           const char* out_path) {
  return guarded([&] {
    const auto config = resolve(config_json);
    hiaa::run_split(config, require_path(samples_path, "samples"),
                    require_path(out_path, "output"));
  });
}

hiaa_status hiaa_cmd_train(const char* config_json, const char* samples_path,
                           const char* split_path, const char* out_path,
                           hiaa_progress_fn progress, void* user) {
  return guarded([&] {
    const auto config = resolve(config_json);
    hiaa::ProgressFn fn;
    if (progress != nullptr) {
      fn = [progress, user](const std::string& msg) { progress(msg.c_str(), user); };
    }
    hiaa::run_train(config, require_path(samples_path, "samples"),
                    require_path(split_path, "split"), require_path(out_path, "output"),
                    fn);
  });
}

hiaa_status hiaa_cmd_train_voter(const char* config_json, const char* samples_path,
                                 const char* split_path, const char* model_path,
                                 const char* out_path) {
  return guarded([&] {
    const auto config = resolve(config_json);
    hiaa::run_train_voter(config, require_path(samples_path, "samples"),
                          require_path(split_path, "split"),
                          require_path(model_path, "model"),
                          require_path(out_path, "output"));
  });
}

hiaa_status hiaa_cmd_score(const char* samples_path, const char* model_path, int fused,
                           const char* out_path) {
  return guarded([&] {
    hiaa::run_score(require_path(samples_path, "samples"),
                    require_path(model_path, "model"), fused != 0,
                    require_path(out_path, "output"));
  });
}

hiaa_status hiaa_cmd_eval(const char* config_json, const char* samples_path,
                          const char* split_path, const char* model_path,
                          const char* out_path) {
  return guarded([&] {
    const auto config = resolve(config_json);
    hiaa::run_eval(config, require_path(samples_path, "samples"),
                   require_path(split_path, "split"), require_path(model_path, "model"),
                   require_path(out_path, "output"));
  });
}

hiaa_status hiaa_cmd_report(const char* report_path, const char* out_path) {
  return guarded([&] {
    hiaa::run_report(require_path(report_path, "report"),
                     require_path(out_path, "output"));
  });
}

hiaa_status hiaa_model_load(const char* path, hiaa_model** out) {
  return guarded([&] {
    require_ptr(out, "out");
    *out = nullptr;
    auto* m = new hiaa_model{hiaa::load_checkpoint(require_path(path, "model"))};
    *out = m;
  });
}

void hiaa_model_free(hiaa_model* model) { delete model; }

int hiaa_model_has_metavoter(const hiaa_model* model) {
  return model != nullptr && model->checkpoint.metavoter.has_value() ? 1 : 0;
}

size_t hiaa_model_feature_count(const hiaa_model* model) {
  if (model == nullptr) return 0;
  return static_cast<size_t>(model->checkpoint.model.backbone.features());
}

hiaa_status hiaa_model_score(const hiaa_model* model, const double* features,
                             size_t n_features, int f, hiaa_scores* out) {
  return guarded([&] {
    require_ptr(model, "model");
    require_ptr(features, "features");
    require_ptr(out, "out");
    if (n_features != hiaa_model_feature_count(model)) {
      throw hiaa::Error(hiaa::Errc::kShapeMismatch,
                        "feature vector has " + std::to_string(n_features) +
                            " entries, model expects " +
                            std::to_string(hiaa_model_feature_count(model)));
    }
    if (f != 0 && f != 1) throw hiaa::Error(hiaa::Errc::kBadFlag, "f must be 0 or 1");
    const hiaa::Vector x =
        Eigen::Map<const hiaa::Vector>(features, static_cast<Eigen::Index>(n_features));
    const hiaa::HeadScores h = hiaa::score_sample(model->checkpoint, x, f);
    hiaa_scores s{};
    s.lm = h.lm;
    s.reg = h.reg;
    for (int i = 0; i < HIAA_NUM_DIMENSIONS; ++i) {
      s.expert[i] = h.expert[static_cast<std::size_t>(i)];
      s.lm_dims[i] = h.lm_dims[static_cast<std::size_t>(i)];
    }
    s.has_fused = h.fused ? 1 : 0;
    s.fused = h.fused.value_or(0.0);
    *out = s;
  });
}

hiaa_status hiaa_derive_features(int64_t feature_seed, double* out, size_t n) {
  return guarded([&] {
    require_ptr(out, "out");
    if (n == 0) throw hiaa::Error(hiaa::Errc::kConfigError, "n must be >= 1");
    const hiaa::Vector x = hiaa::derive_features(feature_seed, static_cast<int>(n));
    for (size_t i = 0; i < n; ++i) out[i] = x[static_cast<Eigen::Index>(i)];
  });
}

hiaa_status hiaa_rating_from_score(double score, int* level) {
  return guarded([&] {
    require_ptr(level, "level");
    *level = static_cast<int>(hiaa::rating_from_score(score));
  });
}

hiaa_status hiaa_lm_score(const double logits[5], double* score) {
  return guarded([&] {
    require_ptr(logits, "logits");
    require_ptr(score, "score");
    *score = hiaa::lm_score(Eigen::Map<const Eigen::RowVectorXd>(logits, 5));
  });
}

}  // extern "C"
