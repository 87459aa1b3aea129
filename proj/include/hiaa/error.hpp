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

#ifndef HIAA_ERROR_HPP_
#define HIAA_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace hiaa {

// Failure categories raised by the core library. Each maps onto one of the
// C API status codes (see hiaa.h).
enum class Errc {
  kOutOfRange,
  kDegenerateRange,
  kTooFewValues,
  kEmptyRaterList,
  kInvalidRecord,
  kIndexOutOfRange,
  kBadFraction,
  kShapeMismatch,
  kNonFiniteInput,
  kWrongPromptKind,
  kLengthMismatch,
  kBadFlag,
  kEmptyTrainingSet,
  kEmpty,
  kBatchTooSmall,
  kMissingPrediction,
  kMissingInput,
  kVersionMismatch,
  kCorruptFile,
  kConfigError,
  kNumericFailure,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hiaa

#endif  // HIAA_ERROR_HPP_
