/* Copyright 2026 The crae Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Feed-forward classifier applied to extracted features. Hidden layers use
// sigmoid units with biases. Two-class models end in a single sigmoid unit
// trained with binary cross-entropy; n-class models end in n softmax units.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crae/dataset.hpp"
#include "crae/numkit.hpp"

namespace crae {

template <typename Scalar = double>
struct DenseLayer {
  MatrixX<Scalar> weights;  // out x in
  RowVectorX<Scalar> bias;  // out
  Activation activation = Activation::sigmoid;

  Index input_dim() const { return weights.cols(); }
  Index output_dim() const { return weights.rows(); }
};

enum class OutputKind : std::uint8_t { sigmoid = 0, softmax = 1 };

/// Hidden layers followed by an output layer holding raw logits; the output
/// transform is selected by `output`. Inputs are first standardized as
/// (x - input_shift) * input_scale per feature; both vectors are empty until
/// fitted, which means identity.
template <typename Scalar = double>
struct MlpModel {
  std::vector<DenseLayer<Scalar>> layers;
  OutputKind output = OutputKind::sigmoid;
  int n_classes = 2;
  RowVectorX<Scalar> input_shift;
  RowVectorX<Scalar> input_scale;

  bool standardized() const { return input_shift.size() > 0; }

  Index input_dim() const { return layers.empty() ? 0 : layers.front().input_dim(); }

  /// Widths from input to output, e.g. {576, 144, 36, 1}.
  std::vector<Index> widths() const {
    std::vector<Index> w;
    if (layers.empty()) return w;
    w.push_back(layers.front().input_dim());
    for (const auto& l : layers) w.push_back(l.output_dim());
    return w;
  }

  void validate() const {
    if (layers.empty()) throw ShapeError("classifier has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& l = layers[i];
      if (l.bias.size() != l.output_dim())
        throw ShapeError("classifier layer " + std::to_string(i) + ": bias length " +
                         std::to_string(l.bias.size()) + " vs " +
                         std::to_string(l.output_dim()) + " outputs");
      if (i > 0 && layers[i - 1].output_dim() != l.input_dim())
        throw ShapeError("classifier layers " + std::to_string(i - 1) + " and " +
                         std::to_string(i) + " do not chain");
    }
    if (input_shift.size() != input_scale.size() ||
        (standardized() && input_shift.size() != input_dim()))
      throw ShapeError("classifier input standardization has length " +
                       std::to_string(input_shift.size()) + "/" +
                       std::to_string(input_scale.size()) + " for " +
                       std::to_string(input_dim()) + " inputs");
    const Index expected_out = output == OutputKind::sigmoid ? 1 : n_classes;
    if (layers.back().output_dim() != expected_out)
      throw ShapeError("classifier output width " + std::to_string(layers.back().output_dim()) +
                       " does not match " + std::to_string(n_classes) + " classes");
  }

  template <typename Other>
  MlpModel<Other> cast() const {
    MlpModel<Other> m;
    m.output = output;
    m.n_classes = n_classes;
    m.input_shift = input_shift.template cast<Other>();
    m.input_scale = input_scale.template cast<Other>();
    for (const auto& l : layers)
      m.layers.push_back(
          {l.weights.template cast<Other>(), l.bias.template cast<Other>(), l.activation});
    return m;
  }
};

template <typename Scalar = double>
struct DenseGradient {
  MatrixX<Scalar> weights;
  RowVectorX<Scalar> bias;
};

struct MlpTrainConfig {
  long epochs = 2000;
  double learning_rate = 0.5;
};

template <typename Scalar = double>
struct MlpTrainResult {
  MlpModel<Scalar> model;
  std::vector<Scalar> history;
};

template <typename Scalar = double>
struct Prediction {
  MatrixX<Scalar> scores;  // N x 1 (positive-class probability) or N x n_classes
  std::vector<int> labels;

  /// Probability of class 1 for two-class models.
  RowVectorX<Scalar> positive_scores() const {
    return scores.cols() == 1 ? RowVectorX<Scalar>(scores.col(0).transpose())
                              : RowVectorX<Scalar>(scores.col(1).transpose());
  }
};

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

/// Sigmoid hidden layers of the given widths ({in, h1, h2, ...}) plus the
/// output layer, weights uniform in +-1/sqrt(fan_in), biases zero.
template <typename Scalar = double>
MlpModel<Scalar> build_mlp(std::span<const Index> widths, int n_classes, std::uint64_t seed) {
  if (widths.size() < 1) throw ParameterError("classifier needs an input width");
  if (n_classes < 2) throw ParameterError("classifier needs at least 2 classes");
  for (Index w : widths)
    if (w < 1) throw ParameterError("classifier layer widths must be >= 1");
  Rng rng(seed);
  MlpModel<Scalar> m;
  m.n_classes = n_classes;
  m.output = n_classes == 2 ? OutputKind::sigmoid : OutputKind::softmax;
  auto add = [&](Index in, Index out, Activation act) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    m.layers.push_back(
        {random_uniform<Scalar>(rng, out, in, -bound, bound), RowVectorX<Scalar>::Zero(out), act});
  };
  for (std::size_t i = 0; i + 1 < widths.size(); ++i)
    add(widths[i], widths[i + 1], Activation::sigmoid);
  add(widths.back(), m.output == OutputKind::sigmoid ? 1 : n_classes, Activation::linear);
  return m;
}

/// Two sigmoid hidden layers of floor(l/4) and floor(l/16) units.
template <typename Scalar = double>
MlpModel<Scalar> build_default(Index feature_len, int n_classes, std::uint64_t seed) {
  if (feature_len < 16)
    throw ParameterError("default classifier needs feature length >= 16, got " +
                         std::to_string(feature_len) + " (second hidden layer would be empty)");
  const Index widths[] = {feature_len, feature_len / 4, feature_len / 16};
  return build_mlp<Scalar>(widths, n_classes, seed);
}

// ---------------------------------------------------------------------------
// Forward, loss, gradients
// ---------------------------------------------------------------------------

namespace detail {

template <typename Scalar>
struct MlpTrace {
  std::vector<MatrixX<Scalar>> inputs;  // input to each layer
  MatrixX<Scalar> logits;
};

template <typename Scalar>
MlpTrace<Scalar> mlp_forward(const MlpModel<Scalar>& model, const MatrixX<Scalar>& x) {
  if (x.cols() != model.input_dim())
    throw ShapeError("classifier expects feature dim " + std::to_string(model.input_dim()) +
                     " but features are " + shape_string(x));
  MlpTrace<Scalar> t;
  MatrixX<Scalar> a = x;
  if (model.standardized())
    a = ((x.rowwise() - model.input_shift).array().rowwise() * model.input_scale.array()).matrix();
  for (const auto& layer : model.layers) {
    t.inputs.push_back(a);
    MatrixX<Scalar> z = matmul(a, layer.weights.transpose());
    z.rowwise() += layer.bias;
    a = apply_activation(z, layer.activation);
  }
  t.logits = std::move(a);
  return t;
}

template <typename Scalar>
Scalar softplus(Scalar z) {
  return std::max(z, Scalar(0)) + std::log1p(std::exp(-std::abs(z)));
}

template <typename Scalar>
MatrixX<Scalar> softmax_rows(const MatrixX<Scalar>& logits) {
  MatrixX<Scalar> p(logits.rows(), logits.cols());
  for (Index r = 0; r < logits.rows(); ++r) {
    const Scalar top = logits.row(r).maxCoeff();
    p.row(r) = (logits.row(r).array() - top).exp().matrix();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

template <typename Scalar>
void check_labels(const MlpModel<Scalar>& model, std::span<const int> labels, Index rows) {
  if (static_cast<Index>(labels.size()) != rows)
    throw ShapeError("classifier: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(rows) + " rows");
  for (int l : labels)
    if (l < 0 || l >= model.n_classes)
      throw DataError("classifier label " + std::to_string(l) + " outside [0, " +
                      std::to_string(model.n_classes) + ")");
}

}  // namespace detail

/// Mean cross-entropy over the batch.
template <typename Scalar>
Scalar mlp_loss(const MlpModel<Scalar>& model, const MatrixX<Scalar>& x,
                std::span<const int> labels) {
  detail::check_labels(model, labels, x.rows());
  const auto t = detail::mlp_forward(model, x);
  Scalar sum = 0;
  for (Index r = 0; r < x.rows(); ++r) {
    const int y = labels[static_cast<std::size_t>(r)];
    if (model.output == OutputKind::sigmoid) {
      const Scalar z = t.logits(r, 0);
      sum += detail::softplus(z) - static_cast<Scalar>(y) * z;
    } else {
      const Scalar top = t.logits.row(r).maxCoeff();
      const Scalar lse = top + std::log((t.logits.row(r).array() - top).exp().sum());
      sum += lse - t.logits(r, y);
    }
  }
  return sum / static_cast<Scalar>(x.rows());
}

template <typename Scalar>
std::vector<DenseGradient<Scalar>> mlp_gradients(const MlpModel<Scalar>& model,
                                                 const MatrixX<Scalar>& x,
                                                 std::span<const int> labels) {
  detail::check_labels(model, labels, x.rows());
  const auto t = detail::mlp_forward(model, x);
  const auto n = static_cast<Scalar>(x.rows());

  MatrixX<Scalar> delta;
  if (model.output == OutputKind::sigmoid) {
    delta = apply_activation(t.logits, Activation::sigmoid);
    for (Index r = 0; r < x.rows(); ++r)
      delta(r, 0) -= static_cast<Scalar>(labels[static_cast<std::size_t>(r)]);
  } else {
    delta = detail::softmax_rows(t.logits);
    for (Index r = 0; r < x.rows(); ++r) delta(r, labels[static_cast<std::size_t>(r)]) -= 1;
  }
  delta /= n;

  std::vector<DenseGradient<Scalar>> grads(model.layers.size());
  for (std::size_t k = model.layers.size(); k-- > 0;) {
    const auto& layer = model.layers[k];
    grads[k].weights = matmul(delta.transpose(), t.inputs[k]);
    grads[k].bias = delta.colwise().sum();
    if (k == 0) break;
    // inputs[k] is the activated output of layer k-1.
    delta = matmul(delta, layer.weights)
                .cwiseProduct(activation_derivative(t.inputs[k], model.layers[k - 1].activation));
  }
  return grads;
}

template <typename Scalar>
Prediction<Scalar> predict(const MlpModel<Scalar>& model, const MatrixX<Scalar>& x) {
  const auto t = detail::mlp_forward(model, x);
  Prediction<Scalar> p;
  p.labels.resize(static_cast<std::size_t>(x.rows()));
  if (model.output == OutputKind::sigmoid) {
    p.scores = apply_activation(t.logits, Activation::sigmoid);
    for (Index r = 0; r < x.rows(); ++r)
      p.labels[static_cast<std::size_t>(r)] = p.scores(r, 0) >= Scalar(0.5) ? 1 : 0;
  } else {
    p.scores = detail::softmax_rows(t.logits);
    for (Index r = 0; r < x.rows(); ++r) {
      Index best = 0;
      p.scores.row(r).maxCoeff(&best);
      p.labels[static_cast<std::size_t>(r)] = static_cast<int>(best);
    }
  }
  return p;
}

/// Per-feature shift = mean and scale = 1 / standard deviation of `x`.
/// Constant features keep scale 1.
template <typename Scalar>
void fit_input_standardization(MlpModel<Scalar>& model, const MatrixX<Scalar>& x) {
  if (x.rows() == 0 || x.cols() != model.input_dim())
    throw ShapeError("standardization: features " + shape_string(x) + " for a classifier with " +
                     std::to_string(model.input_dim()) + " inputs");
  model.input_shift = x.colwise().mean();
  model.input_scale.resize(x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    const Scalar sd = std::sqrt((x.col(c).array() - model.input_shift(c)).square().mean());
    model.input_scale(c) = sd > Scalar(1e-12) ? Scalar(1) / sd : Scalar(1);
  }
}

/// Full-batch gradient descent on the cross-entropy. A model without input
/// standardization gets one fitted on `data` first; a fitted one keeps its
/// statistics. The history holds the loss before each epoch's update.
template <typename Scalar>
MlpTrainResult<Scalar> train_mlp(MlpModel<Scalar> model, const BasicLabeledDataset<Scalar>& data,
                                 const MlpTrainConfig& cfg) {
  model.validate();
  data.validate();
  if (cfg.epochs < 0) throw ParameterError("classifier epochs must be >= 0");
  if (!(cfg.learning_rate >= 0)) throw ParameterError("classifier learning_rate must be >= 0");
  if (data.dim() != model.input_dim())
    throw ShapeError("classifier expects feature dim " + std::to_string(model.input_dim()) +
                     " but data has dim " + std::to_string(data.dim()));
  if (data.n_classes > model.n_classes)
    throw DataError("data has " + std::to_string(data.n_classes) + " classes but classifier has " +
                    std::to_string(model.n_classes));

  if (!model.standardized()) fit_input_standardization(model, data.samples);

  MlpTrainResult<Scalar> result;
  const auto labels = std::span<const int>(data.labels);
  const auto lr = static_cast<Scalar>(cfg.learning_rate);
  for (long e = 0; e < cfg.epochs; ++e) {
    const Scalar l = mlp_loss(model, data.samples, labels);
    if (!std::isfinite(static_cast<double>(l)))
      throw TrainingDiverged("classifier loss became non-finite at epoch " + std::to_string(e),
                             e);
    result.history.push_back(l);
    const auto grads = mlp_gradients(model, data.samples, labels);
    for (std::size_t k = 0; k < model.layers.size(); ++k) {
      model.layers[k].weights -= lr * grads[k].weights;
      model.layers[k].bias -= lr * grads[k].bias;
    }
  }
  result.model = std::move(model);
  return result;
}

}  // namespace crae
