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

#include "hiaa/checkpoint.hpp"

#include <string>

#include "hiaa/error.hpp"
#include "json_io.hpp"

namespace hiaa {
namespace {

using detail::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(Errc::kCorruptFile, "checkpoint: missing '" + where + "." + key + "'");
  }
  return obj.at(key);
}

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw Error(Errc::kCorruptFile, "checkpoint: '" + where + "' is not a matrix");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(Errc::kCorruptFile, "checkpoint: ragged matrix '" + where + "'");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) {
        throw Error(Errc::kCorruptFile, "checkpoint: non-number in '" + where + "'");
      }
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) {
    throw Error(Errc::kCorruptFile, "checkpoint: '" + where + "' is not a vector");
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw Error(Errc::kCorruptFile, "checkpoint: non-number in '" + where + "'");
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

double scalar_from_json(const json& j, const std::string& where) {
  if (!j.is_number()) {
    throw Error(Errc::kCorruptFile, "checkpoint: '" + where + "' is not a number");
  }
  return j.get<double>();
}

json ffn_to_json(const ExpertFfn& f) {
  json j;
  j["w1"] = matrix_to_json(f.w1);
  j["b1"] = vector_to_json(f.b1);
  j["w2"] = vector_to_json(f.w2);
  j["b2"] = f.b2;
  return j;
}

ExpertFfn ffn_from_json(const json& j, const std::string& where) {
  ExpertFfn f;
  f.w1 = matrix_from_json(field(j, "w1", where), where + ".w1");
  f.b1 = vector_from_json(field(j, "b1", where), where + ".b1");
  f.w2 = vector_from_json(field(j, "w2", where), where + ".w2");
  f.b2 = scalar_from_json(field(j, "b2", where), where + ".b2");
  return f;
}

json bn_to_json(const BatchNorm& bn) {
  json j;
  j["gamma"] = vector_to_json(bn.gamma);
  j["beta"] = vector_to_json(bn.beta);
  j["running_mean"] = vector_to_json(bn.running_mean);
  j["running_var"] = vector_to_json(bn.running_var);
  return j;
}

BatchNorm bn_from_json(const json& j, const std::string& where) {
  BatchNorm bn;
  bn.gamma = vector_from_json(field(j, "gamma", where), where + ".gamma");
  bn.beta = vector_from_json(field(j, "beta", where), where + ".beta");
  bn.running_mean = vector_from_json(field(j, "running_mean", where), where + ".running_mean");
  bn.running_var = vector_from_json(field(j, "running_var", where), where + ".running_var");
  return bn;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::kCorruptFile, "checkpoint: inconsistent shapes: " + what);
}

void check_ffn(const ExpertFfn& f, Eigen::Index inputs, Eigen::Index width,
               const char* name) {
  require(f.w1.rows() == width && f.w1.cols() == inputs && f.b1.size() == width &&
              f.w2.size() == width,
          name);
}

void check_model(const ModelParams& m) {
  const BackboneParams& b = m.backbone;
  const Eigen::Index e = b.slot_embeddings.cols();
  const Eigen::Index d = b.w1.rows();
  require(b.slot_embeddings.rows() == kNumSlotEmbeddings, "slot_embeddings rows");
  require(b.w1.cols() > e && b.b1.size() == d && b.w2.rows() == d &&
              b.w2.cols() == d && b.b2.size() == d,
          "backbone");
  require(m.lm.weight.rows() == kNumLevels && m.lm.weight.cols() == d &&
              m.lm.bias.size() == kNumLevels,
          "lm_head");
  require(m.reg.weight.size() == d, "reg_head");
  require(m.expert.leaf_weight.rows() == kNumLeaves &&
              m.expert.leaf_weight.cols() == d &&
              m.expert.leaf_bias.size() == kNumLeaves,
          "expert_head leaf layer");
  const Eigen::Index w = m.expert.facial.w1.rows();
  check_ffn(m.expert.facial, 5, w, "expert_head.facial");
  check_ffn(m.expert.appearance, 3, w, "expert_head.appearance");
  check_ffn(m.expert.overall, 3, w, "expert_head.overall");
}

void check_voter(const MetaVoterParams& v) {
  const Eigen::Index h = v.w1.rows();
  auto bn_ok = [h](const BatchNorm& bn) {
    return bn.gamma.size() == h && bn.beta.size() == h &&
           bn.running_mean.size() == h && bn.running_var.size() == h &&
           (bn.running_var.array() >= 0.0).all();
  };
  require(v.w1.cols() == 3 && v.b1.size() == h && bn_ok(v.bn1) &&
              v.w2.rows() == h && v.w2.cols() == h && v.b2.size() == h &&
              bn_ok(v.bn2) && v.w3.size() == h && v.epsilon > 0.0,
          "metavoter");
}

}  // namespace

std::string checkpoint_to_json(const ModelCheckpoint& ckpt) {
  const ModelParams& m = ckpt.model;
  json doc;
  doc["format_version"] = ckpt.format_version;
  doc["config"] = ckpt.config_json.empty() ? json::object()
                                           : json::parse(ckpt.config_json);
  json& bb = doc["backbone"];
  bb["slot_embeddings"] = matrix_to_json(m.backbone.slot_embeddings);
  bb["w1"] = matrix_to_json(m.backbone.w1);
  bb["b1"] = vector_to_json(m.backbone.b1);
  bb["w2"] = matrix_to_json(m.backbone.w2);
  bb["b2"] = vector_to_json(m.backbone.b2);
  json& lm = doc["lm_head"];
  lm["weight"] = matrix_to_json(m.lm.weight);
  lm["bias"] = vector_to_json(m.lm.bias);
  json& reg = doc["reg_head"];
  reg["weight"] = vector_to_json(m.reg.weight);
  reg["bias"] = m.reg.bias;
  json& ex = doc["expert_head"];
  ex["leaf_weight"] = matrix_to_json(m.expert.leaf_weight);
  ex["leaf_bias"] = vector_to_json(m.expert.leaf_bias);
  ex["facial"] = ffn_to_json(m.expert.facial);
  ex["appearance"] = ffn_to_json(m.expert.appearance);
  ex["overall"] = ffn_to_json(m.expert.overall);
  if (ckpt.metavoter) {
    const MetaVoterParams& v = *ckpt.metavoter;
    json& mv = doc["metavoter"];
    mv["momentum"] = v.momentum;
    mv["epsilon"] = v.epsilon;
    mv["w1"] = matrix_to_json(v.w1);
    mv["b1"] = vector_to_json(v.b1);
    mv["bn1"] = bn_to_json(v.bn1);
    mv["w2"] = matrix_to_json(v.w2);
    mv["b2"] = vector_to_json(v.b2);
    mv["bn2"] = bn_to_json(v.bn2);
    mv["w3"] = vector_to_json(v.w3);
    mv["b3"] = v.b3;
  }
  return doc.dump(1) + "\n";
}

ModelCheckpoint checkpoint_from_json(const std::string& text) {
  const json doc = detail::parse_json(text, "checkpoint");
  if (!doc.is_object()) throw Error(Errc::kCorruptFile, "checkpoint: not an object");
  const json& ver = field(doc, "format_version", "root");
  if (!ver.is_number_integer()) {
    throw Error(Errc::kCorruptFile, "checkpoint: format_version is not an integer");
  }
  ModelCheckpoint ckpt;
  ckpt.format_version = ver.get<int>();
  if (ckpt.format_version != kCheckpointFormatVersion) {
    throw Error(Errc::kVersionMismatch,
                "checkpoint format_version " + std::to_string(ckpt.format_version) +
                    ", expected " + std::to_string(kCheckpointFormatVersion));
  }
  if (doc.contains("config") && !doc.at("config").empty()) {
    ckpt.config_json = doc.at("config").dump();
  }
  ModelParams& m = ckpt.model;
  const json& bb = field(doc, "backbone", "root");
  m.backbone.slot_embeddings =
      matrix_from_json(field(bb, "slot_embeddings", "backbone"), "backbone.slot_embeddings");
  m.backbone.w1 = matrix_from_json(field(bb, "w1", "backbone"), "backbone.w1");
  m.backbone.b1 = vector_from_json(field(bb, "b1", "backbone"), "backbone.b1");
  m.backbone.w2 = matrix_from_json(field(bb, "w2", "backbone"), "backbone.w2");
  m.backbone.b2 = vector_from_json(field(bb, "b2", "backbone"), "backbone.b2");
  const json& lm = field(doc, "lm_head", "root");
  m.lm.weight = matrix_from_json(field(lm, "weight", "lm_head"), "lm_head.weight");
  m.lm.bias = vector_from_json(field(lm, "bias", "lm_head"), "lm_head.bias");
  const json& reg = field(doc, "reg_head", "root");
  m.reg.weight = vector_from_json(field(reg, "weight", "reg_head"), "reg_head.weight");
  m.reg.bias = scalar_from_json(field(reg, "bias", "reg_head"), "reg_head.bias");
  const json& ex = field(doc, "expert_head", "root");
  m.expert.leaf_weight =
      matrix_from_json(field(ex, "leaf_weight", "expert_head"), "expert_head.leaf_weight");
  m.expert.leaf_bias =
      vector_from_json(field(ex, "leaf_bias", "expert_head"), "expert_head.leaf_bias");
  m.expert.facial = ffn_from_json(field(ex, "facial", "expert_head"), "expert_head.facial");
  m.expert.appearance =
      ffn_from_json(field(ex, "appearance", "expert_head"), "expert_head.appearance");
  m.expert.overall = ffn_from_json(field(ex, "overall", "expert_head"), "expert_head.overall");
  check_model(m);

  if (doc.contains("metavoter")) {
    const json& mv = doc.at("metavoter");
    MetaVoterParams v;
    v.momentum = scalar_from_json(field(mv, "momentum", "metavoter"), "metavoter.momentum");
    v.epsilon = scalar_from_json(field(mv, "epsilon", "metavoter"), "metavoter.epsilon");
    v.w1 = matrix_from_json(field(mv, "w1", "metavoter"), "metavoter.w1");
    v.b1 = vector_from_json(field(mv, "b1", "metavoter"), "metavoter.b1");
    v.bn1 = bn_from_json(field(mv, "bn1", "metavoter"), "metavoter.bn1");
    v.w2 = matrix_from_json(field(mv, "w2", "metavoter"), "metavoter.w2");
    v.b2 = vector_from_json(field(mv, "b2", "metavoter"), "metavoter.b2");
    v.bn2 = bn_from_json(field(mv, "bn2", "metavoter"), "metavoter.bn2");
    v.w3 = vector_from_json(field(mv, "w3", "metavoter"), "metavoter.w3");
    v.b3 = scalar_from_json(field(mv, "b3", "metavoter"), "metavoter.b3");
    check_voter(v);
    ckpt.metavoter = std::move(v);
  }
  return ckpt;
}

void save_checkpoint(const ModelCheckpoint& ckpt, const std::filesystem::path& path) {
  detail::write_text_file(path, checkpoint_to_json(ckpt));
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(detail::read_text_file(path));
}

HeadScores score_sample(const ModelCheckpoint& ckpt, const Vector& features, int f) {
  HeadScores s = score_heads(ckpt.model, features, f);
  if (ckpt.metavoter) {
    s.fused = metavoter_forward(
        *ckpt.metavoter,
        {s.lm, s.reg, s.expert[index_of(Dimension::kOverallAesthetic)]});
  }
  return s;
}

}  // namespace hiaa
