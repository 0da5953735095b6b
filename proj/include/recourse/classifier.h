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

#ifndef RECOURSE_CLASSIFIER_H_
#define RECOURSE_CLASSIFIER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "recourse/common.h"
#include "recourse/data.h"

namespace recourse {

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
};

// Feed-forward binary classifier: ReLU hidden layers, single-logit output
// squashed by a sigmoid.
class MlpModel {
 public:
  MlpModel() = default;
  // Zero-initialized parameters. `layer_dims` = {input, hidden..., 1}.
  explicit MlpModel(std::vector<int> layer_dims);

  const std::vector<int>& layer_dims() const { return layer_dims_; }
  int input_dim() const { return layer_dims_.front(); }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }

  double Logit(const Eigen::Ref<const Vector>& x) const;

 private:
  std::vector<int> layer_dims_;
  std::vector<DenseLayer> layers_;
};

// {p, 20, 50, 20, 1}.
std::vector<int> DefaultLayerDims(int input_dim);

double PredictProba(const MlpModel& model, const Eigen::Ref<const Vector>& x);
// Inclusive threshold: 1 iff PredictProba(x) >= 0.5.
int PredictLabel(const MlpModel& model, const Eigen::Ref<const Vector>& x);
std::vector<int> PredictLabels(const MlpModel& model, const Matrix& rows);

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 300;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double l2_penalty = 0.0;
};

// Uniform Glorot initialization, deterministic in `seed`.
MlpModel InitializeModel(const std::vector<int>& layer_dims,
                         std::uint64_t seed);

// Parameter-shaped gradient.
struct Gradient {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

// Mean binary cross-entropy over `rows` plus 0.5 * l2 * sum ||W||^2.
// Fills `gradient` when non-null.
double LossAndGradient(const MlpModel& model, const Matrix& X,
                       const std::vector<int>& y, double l2_penalty,
                       Gradient* gradient);

// Mini-batch gradient descent on binary cross-entropy.
MlpModel Train(const Dataset& data, const std::vector<int>& layer_dims,
               const TrainConfig& config);

struct EvalReport {
  double accuracy = 0.0;
  std::optional<double> auc;  // empty when only one class is present
};

// Probability that a random positive outranks a random negative; ties count
// one half. Empty when either class is absent.
std::optional<double> Auc(const std::vector<double>& scores,
                          const std::vector<int>& labels);
EvalReport Evaluate(const MlpModel& model, const Dataset& data);

void SaveModel(const MlpModel& model, const std::filesystem::path& path);
MlpModel LoadModel(const std::filesystem::path& path);

}  // namespace recourse

#endif  // RECOURSE_CLASSIFIER_H_
