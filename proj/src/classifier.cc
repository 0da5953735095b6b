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

#include "recourse/classifier.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "json.hpp"

namespace recourse {
namespace {

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
double Softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

void CheckDims(const std::vector<int>& dims) {
  if (dims.size() < 2) {
    throw RecourseError("mlp: need at least input and output dimensions");
  }
  for (int d : dims) {
    if (d < 1) throw RecourseError("mlp: layer dimensions must be positive");
  }
  if (dims.back() != 1) {
    throw RecourseError("mlp: output layer must have a single logit");
  }
}

// Forward pass keeping every layer's post-activation (activations[0] = x).
double Forward(const MlpModel& model, const Eigen::Ref<const Vector>& x,
               std::vector<Vector>* activations) {
  Vector h = x;
  if (activations) activations->push_back(h);
  const auto& layers = model.layers();
  for (size_t l = 0; l < layers.size(); ++l) {
    Vector pre = layers[l].weights * h + layers[l].bias;
    if (l + 1 < layers.size()) pre = pre.cwiseMax(0.0);
    h = std::move(pre);
    if (activations) activations->push_back(h);
  }
  return h[0];
}

}  // namespace

MlpModel::MlpModel(std::vector<int> layer_dims)
    : layer_dims_(std::move(layer_dims)) {
  CheckDims(layer_dims_);
  for (size_t l = 0; l + 1 < layer_dims_.size(); ++l) {
    layers_.push_back({Matrix::Zero(layer_dims_[l + 1], layer_dims_[l]),
                       Vector::Zero(layer_dims_[l + 1])});
  }
}

double MlpModel::Logit(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != input_dim()) {
    throw RecourseError("mlp: input has dimension " + std::to_string(x.size()) +
                        ", model expects " + std::to_string(input_dim()));
  }
  return Forward(*this, x, nullptr);
}

std::vector<int> DefaultLayerDims(int input_dim) {
  return {input_dim, 20, 50, 20, 1};
}

double PredictProba(const MlpModel& model, const Eigen::Ref<const Vector>& x) {
  return Sigmoid(model.Logit(x));
}

int PredictLabel(const MlpModel& model, const Eigen::Ref<const Vector>& x) {
  return PredictProba(model, x) >= 0.5 ? 1 : 0;
}

std::vector<int> PredictLabels(const MlpModel& model, const Matrix& rows) {
  std::vector<int> labels(rows.rows());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    labels[r] = PredictLabel(model, rows.row(r).transpose());
  }
  return labels;
}

MlpModel InitializeModel(const std::vector<int>& layer_dims,
                         std::uint64_t seed) {
  MlpModel model(layer_dims);
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  for (DenseLayer& layer : model.mutable_layers()) {
    const double limit = std::sqrt(
        6.0 / static_cast<double>(layer.weights.rows() + layer.weights.cols()));
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
      layer.weights.data()[i] = limit * (2.0 * uniform() - 1.0);
    }
  }
  return model;
}

double LossAndGradient(const MlpModel& model, const Matrix& X,
                       const std::vector<int>& y, double l2_penalty,
                       Gradient* gradient) {
  const auto& layers = model.layers();
  const int n = static_cast<int>(X.rows());
  if (n == 0) throw RecourseError("mlp: empty batch");
  if (gradient) {
    gradient->weights.clear();
    gradient->biases.clear();
    for (const DenseLayer& layer : layers) {
      gradient->weights.push_back(
          Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
      gradient->biases.push_back(Vector::Zero(layer.bias.size()));
    }
  }
  double loss = 0.0;
  std::vector<Vector> acts;
  for (int r = 0; r < n; ++r) {
    acts.clear();
    const double logit = Forward(model, X.row(r).transpose(), &acts);
    // BCE with logits: softplus(t) - y t.
    loss += Softplus(logit) - (y[r] == 1 ? logit : 0.0);
    if (!gradient) continue;
    Vector delta(1);
    delta[0] = (Sigmoid(logit) - y[r]) / n;
    for (int l = static_cast<int>(layers.size()) - 1; l >= 0; --l) {
      gradient->weights[l].noalias() += delta * acts[l].transpose();
      gradient->biases[l] += delta;
      if (l == 0) break;
      Vector back = layers[l].weights.transpose() * delta;
      for (Eigen::Index i = 0; i < back.size(); ++i) {
        if (acts[l][i] <= 0.0) back[i] = 0.0;
      }
      delta = std::move(back);
    }
  }
  loss /= n;
  if (l2_penalty > 0.0) {
    for (size_t l = 0; l < layers.size(); ++l) {
      loss += 0.5 * l2_penalty * layers[l].weights.squaredNorm();
      if (gradient) gradient->weights[l] += l2_penalty * layers[l].weights;
    }
  }
  return loss;
}

MlpModel Train(const Dataset& data, const std::vector<int>& layer_dims,
               const TrainConfig& config) {
  if (data.size() == 0) throw RecourseError("train: empty dataset");
  if (layer_dims.front() != data.dim()) {
    throw RecourseError(
        "train: input dimension " + std::to_string(layer_dims.front()) +
        " does not match data dimension " + std::to_string(data.dim()));
  }
  for (int label : data.y) {
    if (label != 0 && label != 1)
      throw RecourseError("train: non-binary label");
  }
  if (!(config.learning_rate > 0.0) || config.batch_size < 1 ||
      config.epochs < 0 || config.l2_penalty < 0.0) {
    throw RecourseError("train: invalid training configuration");
  }
  MlpModel model = InitializeModel(layer_dims, config.seed);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const int n = data.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Gradient gradient;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }
    double epoch_loss = 0.0;
    for (int start = 0; start < n; start += config.batch_size) {
      const int end = std::min(n, start + config.batch_size);
      Matrix batch(end - start, data.dim());
      std::vector<int> labels(end - start);
      for (int r = start; r < end; ++r) {
        batch.row(r - start) = data.X.row(order[r]);
        labels[r - start] = data.y[order[r]];
      }
      epoch_loss +=
          LossAndGradient(model, batch, labels, config.l2_penalty, &gradient) *
          (end - start);
      auto& layers = model.mutable_layers();
      for (size_t l = 0; l < layers.size(); ++l) {
        layers[l].weights -= config.learning_rate * gradient.weights[l];
        layers[l].bias -= config.learning_rate * gradient.biases[l];
      }
    }
    if (!std::isfinite(epoch_loss)) {
      throw RecourseError("train: non-finite loss in epoch " +
                          std::to_string(epoch + 1));
    }
  }
  return model;
}

std::optional<double> Auc(const std::vector<double>& scores,
                          const std::vector<int>& labels) {
  // Rank-sum formulation with midranks for ties.
  const int n = static_cast<int>(scores.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&scores](int a, int b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  for (int i = 0; i < n;) {
    int j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = 0.5 * (i + j) + 1.0;
    for (int k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double positives = 0, negatives = 0, rank_sum = 0;
  for (int i = 0; i < n; ++i) {
    if (labels[i] == 1) {
      positives += 1;
      rank_sum += rank[i];
    } else {
      negatives += 1;
    }
  }
  if (positives == 0 || negatives == 0) return std::nullopt;
  return (rank_sum - positives * (positives + 1) / 2.0) /
         (positives * negatives);
}

EvalReport Evaluate(const MlpModel& model, const Dataset& data) {
  if (data.size() == 0) throw RecourseError("eval: empty dataset");
  std::vector<double> scores(data.size());
  int correct = 0;
  for (int r = 0; r < data.size(); ++r) {
    scores[r] = PredictProba(model, data.X.row(r).transpose());
    if ((scores[r] >= 0.5 ? 1 : 0) == data.y[r]) ++correct;
  }
  EvalReport report;
  report.accuracy = static_cast<double>(correct) / data.size();
  report.auc = Auc(scores, data.y);
  return report;
}

void SaveModel(const MlpModel& model, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["format"] = "recourse-mlp";
  doc["version"] = 1;
  doc["hidden_activation"] = "relu";
  doc["output_activation"] = "sigmoid";
  doc["layer_dims"] = model.layer_dims();
  doc["layers"] = nlohmann::json::array();
  for (const DenseLayer& layer : model.layers()) {
    // Row-major weights.
    std::vector<double> weights;
    weights.reserve(layer.weights.size());
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
        weights.push_back(layer.weights(i, j));
      }
    }
    doc["layers"].push_back(
        {{"weights", weights},
         {"bias", std::vector<double>(layer.bias.data(),
                                      layer.bias.data() + layer.bias.size())}});
  }
  std::ofstream out(path);
  if (!out) throw RecourseError("model: cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

MlpModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RecourseError("model: cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw RecourseError("model: malformed file " + path.string() + ": " +
                        e.what());
  }
  auto require = [&doc](const char* field) -> const nlohmann::json& {
    if (!doc.contains(field)) {
      throw RecourseError(std::string("model: missing field '") + field + "'");
    }
    return doc[field];
  };
  if (require("format") != "recourse-mlp") {
    throw RecourseError("model: field 'format' is not 'recourse-mlp'");
  }
  std::vector<int> dims;
  try {
    dims = require("layer_dims").get<std::vector<int>>();
  } catch (const nlohmann::json::exception&) {
    throw RecourseError("model: field 'layer_dims' is not an integer list");
  }
  MlpModel model(dims);
  const nlohmann::json& layers = require("layers");
  if (!layers.is_array() || layers.size() + 1 != dims.size()) {
    throw RecourseError("model: field 'layers' does not match 'layer_dims'");
  }
  for (size_t l = 0; l < layers.size(); ++l) {
    DenseLayer& layer = model.mutable_layers()[l];
    std::vector<double> weights, bias;
    try {
      weights = layers[l].at("weights").get<std::vector<double>>();
      bias = layers[l].at("bias").get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw RecourseError("model: layers[" + std::to_string(l) +
                          "] lacks numeric 'weights'/'bias'");
    }
    if (weights.size() != static_cast<size_t>(layer.weights.size())) {
      throw RecourseError("model: layers[" + std::to_string(l) +
                          "].weights has " + std::to_string(weights.size()) +
                          " entries, expected " +
                          std::to_string(layer.weights.size()));
    }
    if (bias.size() != static_cast<size_t>(layer.bias.size())) {
      throw RecourseError("model: layers[" + std::to_string(l) + "].bias has " +
                          std::to_string(bias.size()) + " entries, expected " +
                          std::to_string(layer.bias.size()));
    }
    size_t k = 0;
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
        layer.weights(i, j) = weights[k++];
      }
    }
    for (size_t i = 0; i < bias.size(); ++i) layer.bias[i] = bias[i];
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
      throw RecourseError("model: layers[" + std::to_string(l) +
                          "] has non-finite parameters");
    }
  }
  return model;
}

}  // namespace recourse
