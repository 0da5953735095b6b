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

// Tabular ingestion and preprocessing: feature schema, CSV loading, min-max
// scaling with one-hot encoding, train/test splitting and the 2-D synthetic
// generator used for benchmarking.

#ifndef RECOURSE_DATA_H_
#define RECOURSE_DATA_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "recourse/common.h"

namespace recourse {

enum class FeatureKind { kContinuous, kCategorical };

struct Feature {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  std::vector<std::string> levels;  // categorical only, in encoding order
  bool is_mutable = true;
};

// Contiguous range of encoded coordinates owned by one feature.
struct EncodedBlock {
  int offset = 0;
  int width = 0;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Throws RecourseError on duplicate names or categoricals with < 2 levels.
  explicit FeatureSchema(std::vector<Feature> features);

  // Schema file: {"features": [{"name": ..., "kind": "continuous" |
  // "categorical", "levels": [...], "mutable": bool}, ...], "label": ...}.
  static FeatureSchema Load(const std::filesystem::path& path);
  static FeatureSchema FromJsonText(const std::string& text);
  std::string ToJsonText(const std::string& label_column) const;

  const std::vector<Feature>& features() const { return features_; }
  int num_features() const { return static_cast<int>(features_.size()); }
  int encoded_dim() const { return encoded_dim_; }
  const EncodedBlock& block(int feature) const { return blocks_[feature]; }
  // Feature owning encoded coordinate `coordinate`.
  int feature_of(int coordinate) const { return owner_[coordinate]; }
  // Index of the feature named `name`, or -1.
  int Find(const std::string& name) const;
  // Encoded blocks of every immutable feature.
  std::vector<EncodedBlock> ImmutableBlocks() const;

 private:
  std::vector<Feature> features_;
  std::vector<EncodedBlock> blocks_;
  std::vector<int> owner_;
  int encoded_dim_ = 0;
};

enum class Provenance { kCsv, kSynthetic };

// Unencoded rows: one column per feature. Continuous columns hold the raw
// value, categorical columns hold the 0-based level index.
struct RawDataset {
  FeatureSchema schema;
  Matrix values;  // N x num_features
  std::vector<int> labels;
  Provenance provenance = Provenance::kCsv;

  int size() const { return static_cast<int>(labels.size()); }
  RawDataset Subset(const std::vector<int>& rows) const;
};

// Encoded rows in [0, 1]^p (continuous) with one-hot categorical blocks.
struct Dataset {
  FeatureSchema schema;
  Matrix X;  // N x p
  std::vector<int> y;
  Provenance provenance = Provenance::kCsv;

  int size() const { return static_cast<int>(y.size()); }
  int dim() const { return static_cast<int>(X.cols()); }
};

// Comma separated, single header row holding every schema feature plus
// `label_column` (any order). Labels must be 0 or 1.
RawDataset LoadCsv(const std::filesystem::path& path,
                   const FeatureSchema& schema,
                   const std::string& label_column);
void WriteCsv(const RawDataset& data, const std::string& label_column,
              const std::filesystem::path& path);

// Min-max bounds per feature; entries of categorical features are unused.
struct Scaler {
  std::vector<double> min;
  std::vector<double> max;
};

Scaler FitScaler(const RawDataset& train);

// Continuous: (v - min) / (max - min) clamped to [0, 1]; a constant feature
// (max == min) encodes to 0. Categorical: one-hot block.
Vector Encode(const Eigen::Ref<const Vector>& raw, const FeatureSchema& schema,
              const Scaler& scaler);
Dataset EncodeAll(const RawDataset& data, const Scaler& scaler);

// Inverse scaling for continuous coordinates; each categorical block decodes
// to its arg-max level (ties to the lowest level).
Vector Decode(const Eigen::Ref<const Vector>& encoded,
              const FeatureSchema& schema, const Scaler& scaler);

struct SplitConfig {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

// Deterministic seeded permutation; |train| = round-half-up(fraction * N).
std::pair<std::vector<int>, std::vector<int>> SplitIndices(
    int n, const SplitConfig& config);
std::pair<RawDataset, RawDataset> Split(const RawDataset& data,
                                        const SplitConfig& config);

// Labelling function of the 2-D benchmark: 1 iff
// x2 >= 1 + x1 + 2 x1^2 + x1^3 - x1^4.
int Synth2dLabel(double x1, double x2);

// n points uniform on [-2, 4] x [-2, 7], labelled by Synth2dLabel.
RawDataset Synth2d(int n, std::uint64_t seed);

}  // namespace recourse

#endif  // RECOURSE_DATA_H_
