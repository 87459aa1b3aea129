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

#include "hiaa/error.hpp"

namespace hiaa {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kOutOfRange: return "OutOfRange";
    case Errc::kDegenerateRange: return "DegenerateRange";
    case Errc::kTooFewValues: return "TooFewValues";
    case Errc::kEmptyRaterList: return "EmptyRaterList";
    case Errc::kInvalidRecord: return "InvalidRecord";
    case Errc::kIndexOutOfRange: return "IndexOutOfRange";
    case Errc::kBadFraction: return "BadFraction";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kNonFiniteInput: return "NonFiniteInput";
    case Errc::kWrongPromptKind: return "WrongPromptKind";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kBadFlag: return "BadFlag";
    case Errc::kEmptyTrainingSet: return "EmptyTrainingSet";
    case Errc::kEmpty: return "Empty";
    case Errc::kBatchTooSmall: return "BatchTooSmall";
    case Errc::kMissingPrediction: return "MissingPrediction";
    case Errc::kMissingInput: return "MissingInput";
    case Errc::kVersionMismatch: return "VersionMismatch";
    case Errc::kCorruptFile: return "CorruptFile";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kNumericFailure: return "NumericFailure";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

}  // namespace hiaa
