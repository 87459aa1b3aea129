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

/*
 * hiaa C API.
 *
 * Every function returns an hiaa_status. On failure the thread-local
 * message returned by hiaa_last_error() describes the problem and
 * hiaa_last_error_category() names the error kind (for example
 * "MissingInput" or "VersionMismatch").
 * Strings handed out by the library are released with hiaa_string_free.
 */
#ifndef HIAA_HIAA_H_
#define HIAA_HIAA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(HIAA_BUILDING_LIBRARY)
#define HIAA_API __attribute__((visibility("default")))
#else
#define HIAA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes for the command-line tool. */
typedef enum hiaa_status {
  HIAA_OK = 0,
  HIAA_ERR_INTERNAL = 1,
  HIAA_ERR_CONFIG = 2,
  HIAA_ERR_MISSING_INPUT = 3,
  HIAA_ERR_FORMAT = 4,
  HIAA_ERR_NUMERIC = 5
} hiaa_status;

#define HIAA_NUM_DIMENSIONS 12

typedef struct hiaa_model hiaa_model;

typedef struct hiaa_scores {
  double lm;                            /* normalized LM score, [0,1] */
  double reg;                           /* regression head */
  double expert[HIAA_NUM_DIMENSIONS];   /* canonical dimension order */
  double lm_dims[HIAA_NUM_DIMENSIONS];  /* per-slot LM scores, f=1 only */
  double fused;                         /* valid when has_fused != 0 */
  int has_fused;
} hiaa_scores;

typedef void (*hiaa_progress_fn)(const char* message, void* user);

HIAA_API const char* hiaa_version(void);
HIAA_API const char* hiaa_status_name(hiaa_status status);
HIAA_API const char* hiaa_last_error(void);
HIAA_API const char* hiaa_last_error_category(void);
HIAA_API void hiaa_string_free(char* s);

/* Parses, validates and re-serializes a run configuration. A NULL or empty
 * config selects the defaults. */
HIAA_API hiaa_status hiaa_config_resolve(const char* config_json, char** resolved);

/* Pipeline commands. config_json may be NULL for the defaults. */
HIAA_API hiaa_status hiaa_cmd_synth(const char* config_json, const char* out_path);
HIAA_API hiaa_status hiaa_cmd_ingest(const char* records_path, const char* out_path);
HIAA_API hiaa_status hiaa_cmd_genqa(const char* config_json, const char* samples_path,
                                    const char* out_path);
HIAA_API hiaa_status hiaa_cmd_split(const char* config_json, const char* samples_path,
                                    const char* out_path);
HIAA_API hiaa_status hiaa_cmd_train(const char* config_json, const char* samples_path,
                                    const char* split_path, const char* out_path,
                                    hiaa_progress_fn progress, void* user);
HIAA_API hiaa_status hiaa_cmd_train_voter(const char* config_json,
                                          const char* samples_path,
                                          const char* split_path,
                                          const char* model_path,
                                          const char* out_path);
HIAA_API hiaa_status hiaa_cmd_score(const char* samples_path, const char* model_path,
                                    int fused, const char* out_path);
HIAA_API hiaa_status hiaa_cmd_eval(const char* config_json, const char* samples_path,
                                   const char* split_path, const char* model_path,
                                   const char* out_path);
HIAA_API hiaa_status hiaa_cmd_report(const char* report_path, const char* out_path);

/* Checkpoint handles. */
HIAA_API hiaa_status hiaa_model_load(const char* path, hiaa_model** out);
HIAA_API void hiaa_model_free(hiaa_model* model);
HIAA_API int hiaa_model_has_metavoter(const hiaa_model* model);
HIAA_API size_t hiaa_model_feature_count(const hiaa_model* model);
HIAA_API hiaa_status hiaa_model_score(const hiaa_model* model, const double* features,
                                      size_t n_features, int f, hiaa_scores* out);

/* Small numeric helpers. */
HIAA_API hiaa_status hiaa_derive_features(int64_t feature_seed, double* out, size_t n);
HIAA_API hiaa_status hiaa_rating_from_score(double score, int* level);
HIAA_API hiaa_status hiaa_lm_score(const double logits[5], double* score);

#ifdef __cplusplus
}
#endif

#endif /* HIAA_HIAA_H_ */
