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

#include "hiaa/taxonomy.hpp"

#include <cmath>
#include <string>

#include "hiaa/error.hpp"

namespace hiaa {
namespace {

using D = Dimension;

constexpr std::array<D, 5> kFacialChildren = {
    D::kFacialBrightness, D::kFacialFeatureClarity, D::kFacialSkinTone,
    D::kFacialStructure, D::kFacialContourClarity};
constexpr std::array<D, 3> kAppearanceChildren = {D::kOutfit, D::kBodyShape,
                                                  D::kLooks};
constexpr std::array<D, 3> kOverallChildren = {
    D::kFacialAesthetic, D::kGeneralAppearanceAesthetic, D::kEnvironment};

struct DimensionNames {
  std::string_view snake;
  std::string_view display;
};

constexpr std::array<DimensionNames, kNumDimensions> kNames = {{
    {"facial_brightness", "Facial Brightness"},
    {"facial_feature_clarity", "Facial Feature Clarity"},
    {"facial_skin_tone", "Facial Skin Tone"},
    {"facial_structure", "Facial Structure"},
    {"facial_contour_clarity", "Facial Contour Clarity"},
    {"facial_aesthetic", "Facial Aesthetic"},
    {"outfit", "Outfit"},
    {"body_shape", "Body Shape"},
    {"looks", "Looks"},
    {"general_appearance_aesthetic", "General Appearance Aesthetic"},
    {"environment", "Environment"},
    {"overall_aesthetic", "Overall Aesthetic"},
}};

constexpr std::array<std::string_view, kNumLevels> kLevelNames = {
    "bad", "poor", "fair", "good", "excellent"};

}  // namespace

NodeKind kind(Dimension d) {
  switch (d) {
    case D::kFacialAesthetic:
    case D::kGeneralAppearanceAesthetic:
      return NodeKind::kParent;
    case D::kOverallAesthetic:
      return NodeKind::kRoot;
    default:
      return NodeKind::kLeaf;
  }
}

std::span<const Dimension> children(Dimension d) {
  switch (d) {
    case D::kFacialAesthetic: return kFacialChildren;
    case D::kGeneralAppearanceAesthetic: return kAppearanceChildren;
    case D::kOverallAesthetic: return kOverallChildren;
    default: return {};
  }
}

std::optional<Dimension> parent(Dimension d) {
  for (Dimension p : kAllDimensions) {
    for (Dimension c : children(p)) {
      if (c == d) return p;
    }
  }
  return std::nullopt;
}

std::string_view name(Dimension d) { return kNames[index_of(d)].snake; }

std::string_view display_name(Dimension d) {
  return kNames[index_of(d)].display;
}

std::optional<Dimension> dimension_from_name(std::string_view s) {
  for (Dimension d : kAllDimensions) {
    if (name(d) == s) return d;
  }
  return std::nullopt;
}

std::string_view level_name(RatingLevel z) {
  return kLevelNames[code_of(z) - 1];
}

std::optional<RatingLevel> level_from_name(std::string_view s) {
  for (RatingLevel z : kAllLevels) {
    if (level_name(z) == s) return z;
  }
  return std::nullopt;
}

RatingLevel level_from_code(int code) {
  if (code < 1 || code > kNumLevels) {
    throw Error(Errc::kOutOfRange,
                "rating level code " + std::to_string(code) + " not in 1..5");
  }
  return static_cast<RatingLevel>(code);
}

RatingLevel rating_from_score(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw Error(Errc::kOutOfRange,
                "score " + std::to_string(s) + " outside [0,1]");
  }
  // Upper bounds z/5.0 are the same doubles as the literals 0.2, 0.4, ...
  for (int z = 1; z < kNumLevels; ++z) {
    if (s <= z / 5.0) return static_cast<RatingLevel>(z);
  }
  return RatingLevel::kExcellent;
}

double score_from_rating(RatingLevel z) {
  return (2.0 * code_of(z) - 1.0) / 10.0;
}

}  // namespace hiaa
