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

#ifndef HIAA_TAXONOMY_HPP_
#define HIAA_TAXONOMY_HPP_

#include <array>
#include <optional>
#include <span>
#include <string_view>

namespace hiaa {

// The twelve aesthetic dimensions in canonical order. The underlying value is
// the zero-based canonical index used for answer slots, expert outputs and
// report columns.
enum class Dimension : int {
  kFacialBrightness = 0,
  kFacialFeatureClarity,
  kFacialSkinTone,
  kFacialStructure,
  kFacialContourClarity,
  kFacialAesthetic,
  kOutfit,
  kBodyShape,
  kLooks,
  kGeneralAppearanceAesthetic,
  kEnvironment,
  kOverallAesthetic,
};

enum class NodeKind { kLeaf, kParent, kRoot };

enum class RatingLevel : int {
  kBad = 1,
  kPoor = 2,
  kFair = 3,
  kGood = 4,
  kExcellent = 5,
};

inline constexpr int kNumDimensions = 12;
inline constexpr int kNumLeaves = 9;
inline constexpr int kNumLevels = 5;

inline constexpr std::array<Dimension, kNumDimensions> kAllDimensions = {
    Dimension::kFacialBrightness,   Dimension::kFacialFeatureClarity,
    Dimension::kFacialSkinTone,     Dimension::kFacialStructure,
    Dimension::kFacialContourClarity, Dimension::kFacialAesthetic,
    Dimension::kOutfit,             Dimension::kBodyShape,
    Dimension::kLooks,              Dimension::kGeneralAppearanceAesthetic,
    Dimension::kEnvironment,        Dimension::kOverallAesthetic,
};

// Leaf order consumed by the expert head's first layer: the five facial
// leaves, the three appearance leaves, then environment.
inline constexpr std::array<Dimension, kNumLeaves> kLeafOrder = {
    Dimension::kFacialBrightness, Dimension::kFacialFeatureClarity,
    Dimension::kFacialSkinTone,   Dimension::kFacialStructure,
    Dimension::kFacialContourClarity, Dimension::kOutfit,
    Dimension::kBodyShape,        Dimension::kLooks,
    Dimension::kEnvironment,
};

inline constexpr std::array<RatingLevel, kNumLevels> kAllLevels = {
    RatingLevel::kBad, RatingLevel::kPoor, RatingLevel::kFair,
    RatingLevel::kGood, RatingLevel::kExcellent,
};

constexpr int index_of(Dimension d) { return static_cast<int>(d); }
constexpr int code_of(RatingLevel z) { return static_cast<int>(z); }

NodeKind kind(Dimension d);
std::span<const Dimension> children(Dimension d);
std::optional<Dimension> parent(Dimension d);

// snake_case identifier used in every file format.
std::string_view name(Dimension d);
// Title-case label used in QA answers, e.g. "Facial Brightness".
std::string_view display_name(Dimension d);
std::optional<Dimension> dimension_from_name(std::string_view s);

std::string_view level_name(RatingLevel z);
std::optional<RatingLevel> level_from_name(std::string_view s);
RatingLevel level_from_code(int code);

// Maps s in [0,1] to the level z with (z-1)/5 < s <= z/5; s == 0 maps to
// bad. Throws Error(kOutOfRange) outside [0,1] or for NaN.
RatingLevel rating_from_score(double s);

// Midpoint (2z-1)/10 of the level's interval.
double score_from_rating(RatingLevel z);

}  // namespace hiaa

#endif  // HIAA_TAXONOMY_HPP_
