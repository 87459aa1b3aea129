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

#ifndef HIAA_CHECKPOINT_HPP_
#define HIAA_CHECKPOINT_HPP_

#include <filesystem>
#include <optional>
#include <string>

#include "hiaa/heads.hpp"
#include "hiaa/metavoter.hpp"

namespace hiaa {

inline constexpr int kCheckpointFormatVersion = 1;

// Versioned JSON document with one section per component. An absent
// "metavoter" section means stage 2 has not run.
struct ModelCheckpoint {
  int format_version = kCheckpointFormatVersion;
  std::string config_json;  // resolved run configuration, echoed verbatim
  ModelParams model;
  std::optional<MetaVoterParams> metavoter;
};

std::string checkpoint_to_json(const ModelCheckpoint& ckpt);

// Throws Error(kVersionMismatch) for another format_version and
// Error(kCorruptFile) for malformed or inconsistent content.
ModelCheckpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const ModelCheckpoint& ckpt, const std::filesystem::path& path);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

// Every head score for a sample, including the fused score when the
// checkpoint carries a MetaVoter.
HeadScores score_sample(const ModelCheckpoint& ckpt, const Vector& features, int f);

}  // namespace hiaa

#endif  // HIAA_CHECKPOINT_HPP_
