// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "recourse/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <system_error>
#include <unordered_map>

#include "json.hpp"

namespace recourse {
namespace {

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool ParseDouble(const std::string& text, double* out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc() && ptr == last && std::isfinite(*out);
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

FeatureSchema::FeatureSchema(std::vector<Feature> features)
    : features_(std::move(features)) {
  std::set<std::string> names;
  for (int f = 0; f < num_features(); ++f) {
    const Feature& feature = features_[f];
    if (feature.name.empty()) {
      throw RecourseError("schema: feature " + std::to_string(f) +
                          " has an empty name");
    }
    if (!names.insert(feature.name).second) {
      throw RecourseError("schema: duplicate feature name '" + feature.name +
                          "'");
    }
    int width = 1;
    if (feature.kind == FeatureKind::kCategorical) {
      if (feature.levels.size() < 2) {
        throw RecourseError("schema: categorical feature '" + feature.name +
                            "' needs at least 2 levels");
      }
      std::set<std::string> levels(feature.levels.begin(),
                                   feature.levels.end());
      if (levels.size() != feature.levels.size()) {
        throw RecourseError("schema: categorical feature '" + feature.name +
                            "' has duplicate levels");
      }
      width = static_cast<int>(feature.levels.size());
    }
    blocks_.push_back({encoded_dim_, width});
    for (int c = 0; c < width; ++c) owner_.push_back(f);
    encoded_dim_ += width;
  }
}

FeatureSchema FeatureSchema::FromJsonText(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw RecourseError(std::string("schema: malformed JSON: ") + e.what());
  }
  if (!doc.contains("features") || !doc["features"].is_array()) {
    throw RecourseError("schema: missing 'features' array");
  }
  std::vector<Feature> features;
  for (const auto& entry : doc["features"]) {
    Feature feature;
    if (!entry.contains("name") || !entry["name"].is_string()) {
      throw RecourseError("schema: feature entry without a 'name'");
    }
    feature.name = entry["name"].get<std::string>();
    const std::string kind = entry.value("kind", "continuous");
    if (kind == "continuous") {
      feature.kind = FeatureKind::kContinuous;
    } else if (kind == "categorical") {
      feature.kind = FeatureKind::kCategorical;
      if (!entry.contains("levels") || !entry["levels"].is_array()) {
        throw RecourseError("schema: categorical feature '" + feature.name +
                            "' has no 'levels'");
      }
      for (const auto& level : entry["levels"]) {
        feature.levels.push_back(level.is_string() ? level.get<std::string>()
                                                   : level.dump());
      }
    } else {
      throw RecourseError("schema: feature '" + feature.name +
                          "' has unknown kind '" + kind + "'");
    }
    feature.is_mutable = entry.value("mutable", true);
    features.push_back(std::move(feature));
  }
  return FeatureSchema(std::move(features));
}

FeatureSchema FeatureSchema::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RecourseError("schema: cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJsonText(buffer.str());
}

std::string FeatureSchema::ToJsonText(const std::string& label_column) const {
  nlohmann::json doc;
  doc["label"] = label_column;
  doc["features"] = nlohmann::json::array();
  for (const Feature& f : features_) {
    nlohmann::json entry;
    entry["name"] = f.name;
    entry["kind"] =
        f.kind == FeatureKind::kContinuous ? "continuous" : "categorical";
    if (f.kind == FeatureKind::kCategorical) entry["levels"] = f.levels;
    entry["mutable"] = f.is_mutable;
    doc["features"].push_back(entry);
  }
  return doc.dump(2);
}

int FeatureSchema::Find(const std::string& name) const {
  for (int f = 0; f < num_features(); ++f) {
    if (features_[f].name == name) return f;
  }
  return -1;
}

std::vector<EncodedBlock> FeatureSchema::ImmutableBlocks() const {
  std::vector<EncodedBlock> out;
  for (int f = 0; f < num_features(); ++f) {
    if (!features_[f].is_mutable) out.push_back(blocks_[f]);
  }
  return out;
}

RawDataset RawDataset::Subset(const std::vector<int>& rows) const {
  RawDataset out;
  out.schema = schema;
  out.provenance = provenance;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  out.labels.reserve(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    out.values.row(static_cast<Eigen::Index>(r)) = values.row(rows[r]);
    out.labels.push_back(labels[rows[r]]);
  }
  return out;
}

RawDataset LoadCsv(const std::filesystem::path& path,
                   const FeatureSchema& schema,
                   const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw RecourseError("csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw RecourseError("csv: " + path.string() + " has no header row");
  }
  const std::vector<std::string> header = SplitLine(line);
  std::unordered_map<std::string, int> column_of;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    column_of[Trim(header[c])] = c;
  }
  std::vector<int> feature_column(schema.num_features());
  for (int f = 0; f < schema.num_features(); ++f) {
    auto it = column_of.find(schema.features()[f].name);
    if (it == column_of.end()) {
      throw RecourseError("csv: missing column '" + schema.features()[f].name +
                          "'");
    }
    feature_column[f] = it->second;
  }
  auto label_it = column_of.find(label_column);
  if (label_it == column_of.end()) {
    throw RecourseError("csv: missing label column '" + label_column + "'");
  }
  const int label_col = label_it->second;

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> cells = SplitLine(line);
    if (cells.size() != header.size()) {
      throw RecourseError("csv: row " + std::to_string(line_no) + " has " +
                          std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(header.size()));
    }
    std::vector<double> row(schema.num_features());
    for (int f = 0; f < schema.num_features(); ++f) {
      const Feature& feature = schema.features()[f];
      const std::string cell = Trim(cells[feature_column[f]]);
      if (feature.kind == FeatureKind::kContinuous) {
        if (!ParseDouble(cell, &row[f])) {
          throw RecourseError("csv: row " + std::to_string(line_no) +
                              ", column '" + feature.name +
                              "': unparsable numeric cell '" + cell + "'");
        }
      } else {
        auto level =
            std::find(feature.levels.begin(), feature.levels.end(), cell);
        if (level == feature.levels.end()) {
          throw RecourseError("csv: row " + std::to_string(line_no) +
                              ", column '" + feature.name +
                              "': unknown level '" + cell + "'");
        }
        row[f] = static_cast<double>(level - feature.levels.begin());
      }
    }
    const std::string label = Trim(cells[label_col]);
    if (label != "0" && label != "1") {
      throw RecourseError("csv: row " + std::to_string(line_no) + ", column '" +
                          label_column + "': invalid label '" + label + "'");
    }
    labels.push_back(label == "1" ? 1 : 0);
    rows.push_back(std::move(row));
  }

  RawDataset out;
  out.schema = schema;
  out.provenance = Provenance::kCsv;
  out.values.resize(static_cast<Eigen::Index>(rows.size()),
                    schema.num_features());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (int f = 0; f < schema.num_features(); ++f) {
      out.values(static_cast<Eigen::Index>(r), f) = rows[r][f];
    }
  }
  out.labels = std::move(labels);
  return out;
}

void WriteCsv(const RawDataset& data, const std::string& label_column,
              const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RecourseError("csv: cannot write " + path.string());
  const FeatureSchema& schema = data.schema;
  for (const Feature& f : schema.features()) out << f.name << ',';
  out << label_column << '\n';
  for (int r = 0; r < data.size(); ++r) {
    for (int f = 0; f < schema.num_features(); ++f) {
      const Feature& feature = schema.features()[f];
      if (feature.kind == FeatureKind::kContinuous) {
        out << FormatDouble(data.values(r, f));
      } else {
        out << feature.levels[static_cast<int>(data.values(r, f))];
      }
      out << ',';
    }
    out << data.labels[r] << '\n';
  }
}

Scaler FitScaler(const RawDataset& train) {
  if (train.size() == 0) throw RecourseError("scaler: empty training data");
  Scaler scaler;
  const int features = train.schema.num_features();
  scaler.min.assign(features, 0.0);
  scaler.max.assign(features, 0.0);
  for (int f = 0; f < features; ++f) {
    if (train.schema.features()[f].kind != FeatureKind::kContinuous) continue;
    scaler.min[f] = train.values.col(f).minCoeff();
    scaler.max[f] = train.values.col(f).maxCoeff();
  }
  return scaler;
}

Vector Encode(const Eigen::Ref<const Vector>& raw, const FeatureSchema& schema,
              const Scaler& scaler) {
  if (raw.size() != schema.num_features()) {
    throw RecourseError("encode: instance has " + std::to_string(raw.size()) +
                        " values, schema has " +
                        std::to_string(schema.num_features()) + " features");
  }
  Vector out = Vector::Zero(schema.encoded_dim());
  for (int f = 0; f < schema.num_features(); ++f) {
    const Feature& feature = schema.features()[f];
    const EncodedBlock& block = schema.block(f);
    if (feature.kind == FeatureKind::kContinuous) {
      const double range = scaler.max[f] - scaler.min[f];
      double v = range > 0.0 ? (raw[f] - scaler.min[f]) / range : 0.0;
      out[block.offset] = std::clamp(v, 0.0, 1.0);
    } else {
      const int level = static_cast<int>(raw[f]);
      if (level < 0 || level >= block.width || raw[f] != level) {
        throw RecourseError("encode: feature '" + feature.name +
                            "' has invalid level index " +
                            FormatDouble(raw[f]));
      }
      out[block.offset + level] = 1.0;
    }
  }
  return out;
}

Dataset EncodeAll(const RawDataset& data, const Scaler& scaler) {
  Dataset out;
  out.schema = data.schema;
  out.provenance = data.provenance;
  out.y = data.labels;
  out.X.resize(data.size(), data.schema.encoded_dim());
  for (int r = 0; r < data.size(); ++r) {
    out.X.row(r) =
        Encode(data.values.row(r).transpose(), data.schema, scaler).transpose();
  }
  return out;
}

Vector Decode(const Eigen::Ref<const Vector>& encoded,
              const FeatureSchema& schema, const Scaler& scaler) {
  if (encoded.size() != schema.encoded_dim()) {
    throw RecourseError("decode: vector has length " +
                        std::to_string(encoded.size()) + ", expected " +
                        std::to_string(schema.encoded_dim()));
  }
  Vector out(schema.num_features());
  for (int f = 0; f < schema.num_features(); ++f) {
    const EncodedBlock& block = schema.block(f);
    if (schema.features()[f].kind == FeatureKind::kContinuous) {
      out[f] = scaler.min[f] +
               encoded[block.offset] * (scaler.max[f] - scaler.min[f]);
    } else {
      int best = 0;
      for (int c = 1; c < block.width; ++c) {
        if (encoded[block.offset + c] > encoded[block.offset + best]) best = c;
      }
      out[f] = best;
    }
  }
  return out;
}

std::pair<std::vector<int>, std::vector<int>> SplitIndices(
    int n, const SplitConfig& config) {
  if (n < 2) throw RecourseError("split: need at least 2 rows");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw RecourseError("split: train_fraction must lie in (0, 1)");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  // Fisher-Yates with an explicit draw so the permutation does not depend on
  // the standard library's shuffle.
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  const int train_size = static_cast<int>(
      std::floor(config.train_fraction * static_cast<double>(n) + 0.5));
  std::vector<int> train(order.begin(), order.begin() + train_size);
  std::vector<int> test(order.begin() + train_size, order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

std::pair<RawDataset, RawDataset> Split(const RawDataset& data,
                                        const SplitConfig& config) {
  auto [train, test] = SplitIndices(data.size(), config);
  return {data.Subset(train), data.Subset(test)};
}

int Synth2dLabel(double x1, double x2) {
  const double x1_2 = x1 * x1;
  const double boundary = 1.0 + x1 + 2.0 * x1_2 + x1_2 * x1 - x1_2 * x1_2;
  return x2 >= boundary ? 1 : 0;
}

RawDataset Synth2d(int n, std::uint64_t seed) {
  if (n < 1) throw RecourseError("synth_2d: n must be >= 1");
  RawDataset out;
  out.schema = FeatureSchema({{"x1", FeatureKind::kContinuous, {}, true},
                              {"x2", FeatureKind::kContinuous, {}, true}});
  out.provenance = Provenance::kSynthetic;
  out.values.resize(n, 2);
  out.labels.resize(n);
  std::mt19937_64 rng(seed);
  // 53-bit uniforms in [0, 1) built from raw draws for reproducibility.
  auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  for (int i = 0; i < n; ++i) {
    const double x1 = -2.0 + 6.0 * uniform();
    const double x2 = -2.0 + 9.0 * uniform();
    out.values(i, 0) = x1;
    out.values(i, 1) = x2;
    out.labels[i] = Synth2dLabel(x1, x2);
  }
  return out;
}

}  // namespace recourse
