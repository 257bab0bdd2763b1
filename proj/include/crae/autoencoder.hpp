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

// Class representative autoencoder.
//
// A single layer maps a row sample x to the hidden representation
//   r = phi(x * We^T)
// and reconstructs it as
//   x_hat = r * Wd^T.
// For a sample of class s the per-sample objective is
//   |x - x_hat|^2 + lambda_s |r - mean_s|^2 - sum_{i != s} lambda_i |r - mean_i|^2
// where mean_i is the average hidden representation of class i. Batch losses
// and gradients are averaged over samples. Class means are refreshed from the
// current weights once per iteration and held constant while differentiating.
// With every lambda equal to zero the layer is an ordinary autoencoder.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crae/dataset.hpp"
#include "crae/numkit.hpp"

namespace crae {

template <typename Scalar = double>
struct AutoencoderLayer {
  MatrixX<Scalar> encoder;  // hidden_dim x input_dim
  MatrixX<Scalar> decoder;  // input_dim x hidden_dim
  Activation activation = Activation::sigmoid;

  Index input_dim() const { return encoder.cols(); }
  Index hidden_dim() const { return encoder.rows(); }

  void validate() const {
    if (encoder.cols() != decoder.rows() || encoder.rows() != decoder.cols()) {
      throw ShapeError("autoencoder layer: encoder " + shape_string(encoder) +
                       " is inconsistent with decoder " + shape_string(decoder));
    }
  }

  template <typename Other>
  AutoencoderLayer<Other> cast() const {
    return {encoder.template cast<Other>(), decoder.template cast<Other>(), activation};
  }
};

/// Mean hidden representation per class, one row per class index.
template <typename Scalar = double>
struct ClassMeans {
  MatrixX<Scalar> means;

  int n_classes() const { return static_cast<int>(means.rows()); }
  Index hidden_dim() const { return means.cols(); }

  template <typename Other>
  ClassMeans<Other> cast() const {
    return {means.template cast<Other>()};
  }
};

/// Loss terms, averaged per sample. `intra` and `inter` are unweighted squared
/// distances; the weighted variants carry the lambdas and
/// total = reconstruction + weighted_intra - weighted_inter.
template <typename Scalar = double>
struct LossBreakdown {
  Scalar reconstruction = 0;
  Scalar intra = 0;
  Scalar inter = 0;
  Scalar weighted_intra = 0;
  Scalar weighted_inter = 0;
  Scalar total = 0;
};

enum class BatchMode { full, minibatch };

template <typename Scalar = double>
struct TrainConfig {
  // Pull toward the sample's own class mean. A non-empty per-class vector
  // overrides the uniform value and is indexed by the sample's class.
  Scalar lambda_same = Scalar(0.1);
  std::vector<Scalar> lambda_same_per_class;
  // Push away from other class means; per-class entry i weights |r - mean_i|^2.
  Scalar lambda_other = Scalar(0.1);
  std::vector<Scalar> lambda_other_per_class;

  Scalar learning_rate = Scalar(0.01);
  long iterations = 200;
  BatchMode batch_mode = BatchMode::full;
  Index batch_size = 0;
  std::uint64_t seed = 7;
  Scalar init_scale = Scalar(1);
  Activation activation = Activation::sigmoid;

  Scalar same_weight(int c) const {
    return lambda_same_per_class.empty() ? lambda_same
                                         : lambda_same_per_class[static_cast<std::size_t>(c)];
  }
  Scalar other_weight(int c) const {
    return lambda_other_per_class.empty() ? lambda_other
                                          : lambda_other_per_class[static_cast<std::size_t>(c)];
  }

  /// False when every class weight is zero, i.e. plain autoencoder training.
  bool supervised() const {
    auto any_nonzero = [](Scalar uniform, const std::vector<Scalar>& per_class) {
      if (per_class.empty()) return uniform != Scalar(0);
      for (Scalar v : per_class)
        if (v != Scalar(0)) return true;
      return false;
    };
    return any_nonzero(lambda_same, lambda_same_per_class) ||
           any_nonzero(lambda_other, lambda_other_per_class);
  }

  void validate(int n_classes) const {
    auto check_weights = [&](const char* name, Scalar uniform, const std::vector<Scalar>& pc) {
      if (!(uniform >= Scalar(0)) || !std::isfinite(static_cast<double>(uniform)))
        throw ParameterError(std::string(name) + " must be a finite value >= 0");
      if (!pc.empty() && static_cast<int>(pc.size()) != n_classes)
        throw ParameterError(std::string(name) + "_per_class has " + std::to_string(pc.size()) +
                             " entries but the data has " + std::to_string(n_classes) +
                             " classes");
      for (Scalar v : pc)
        if (!(v >= Scalar(0)) || !std::isfinite(static_cast<double>(v)))
          throw ParameterError(std::string(name) + "_per_class entries must be finite and >= 0");
    };
    check_weights("lambda_same", lambda_same, lambda_same_per_class);
    check_weights("lambda_other", lambda_other, lambda_other_per_class);
    if (!(learning_rate >= Scalar(0)) || !std::isfinite(static_cast<double>(learning_rate)))
      throw ParameterError("learning_rate must be finite and >= 0");
    if (iterations < 1) throw ParameterError("iterations must be >= 1");
    if (batch_mode == BatchMode::minibatch && batch_size < 1)
      throw ParameterError("minibatch mode needs batch_size >= 1");
    if (!(init_scale > Scalar(0))) throw ParameterError("init_scale must be > 0");
  }
};

template <typename Scalar = double>
struct Gradients {
  MatrixX<Scalar> encoder;
  MatrixX<Scalar> decoder;
};

template <typename Scalar = double>
struct TrainResult {
  AutoencoderLayer<Scalar> layer;
  std::vector<LossBreakdown<Scalar>> history;
};

// ---------------------------------------------------------------------------
// Forward pass
// ---------------------------------------------------------------------------

template <typename Scalar>
void check_input(const AutoencoderLayer<Scalar>& layer, const MatrixX<Scalar>& x) {
  if (x.cols() != layer.input_dim()) {
    throw ShapeError("layer expects input dim " + std::to_string(layer.input_dim()) +
                     " but samples are " + shape_string(x));
  }
}

template <typename Scalar>
MatrixX<Scalar> encode(const AutoencoderLayer<Scalar>& layer, const MatrixX<Scalar>& x) {
  check_input(layer, x);
  return apply_activation(matmul(x, layer.encoder.transpose()), layer.activation);
}

/// Linear decoder: hidden rows back to input space.
template <typename Scalar>
MatrixX<Scalar> decode(const AutoencoderLayer<Scalar>& layer, const MatrixX<Scalar>& hidden) {
  if (hidden.cols() != layer.hidden_dim()) {
    throw ShapeError("layer expects hidden dim " + std::to_string(layer.hidden_dim()) +
                     " but got " + shape_string(hidden));
  }
  return matmul(hidden, layer.decoder.transpose());
}

template <typename Scalar>
MatrixX<Scalar> reconstruct(const AutoencoderLayer<Scalar>& layer, const MatrixX<Scalar>& x) {
  return decode(layer, encode(layer, x));
}

template <typename Scalar>
MatrixX<Scalar> encode_stack(std::span<const AutoencoderLayer<Scalar>> layers, MatrixX<Scalar> x) {
  for (const auto& layer : layers) x = encode(layer, x);
  return x;
}

template <typename Scalar>
MatrixX<Scalar> decode_stack(std::span<const AutoencoderLayer<Scalar>> layers,
                             MatrixX<Scalar> hidden) {
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) hidden = decode(*it, hidden);
  return hidden;
}

template <typename Scalar>
MatrixX<Scalar> reconstruct_stack(std::span<const AutoencoderLayer<Scalar>> layers,
                                  const MatrixX<Scalar>& x) {
  return decode_stack(layers, encode_stack(layers, x));
}

// ---------------------------------------------------------------------------
// Class means
// ---------------------------------------------------------------------------

/// Arithmetic mean of hidden rows per class. Every class in [0, n_classes)
/// must have at least one row.
template <typename Scalar>
ClassMeans<Scalar> class_means_of(const MatrixX<Scalar>& hidden, std::span<const int> labels,
                                  int n_classes) {
  if (static_cast<Index>(labels.size()) != hidden.rows()) {
    throw ShapeError("class means: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(hidden.rows()) + " rows");
  }
  MatrixX<Scalar> sums = MatrixX<Scalar>::Zero(n_classes, hidden.cols());
  std::vector<Index> counts(static_cast<std::size_t>(n_classes), 0);
  for (Index r = 0; r < hidden.rows(); ++r) {
    const int c = labels[static_cast<std::size_t>(r)];
    if (c < 0 || c >= n_classes) {
      throw DataError("row " + std::to_string(r) + " has label " + std::to_string(c) +
                      " outside [0, " + std::to_string(n_classes) + ")");
    }
    sums.row(c) += hidden.row(r);
    ++counts[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < n_classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      throw DataError("class " + std::to_string(c) + " has no samples; cannot compute its mean");
    }
    sums.row(c) /= static_cast<Scalar>(counts[static_cast<std::size_t>(c)]);
  }
  return {std::move(sums)};
}

template <typename Scalar>
ClassMeans<Scalar> class_means(const AutoencoderLayer<Scalar>& layer,
                               const BasicLabeledDataset<Scalar>& data) {
  return class_means_of(encode(layer, data.samples), std::span<const int>(data.labels),
                        data.n_classes);
}

// ---------------------------------------------------------------------------
// Loss
// ---------------------------------------------------------------------------

namespace detail {

// Terms for one sample given its hidden row and reconstruction error.
// The repulsion sum runs over other classes in ascending index order.
template <typename Scalar, typename HiddenRow>
LossBreakdown<Scalar> sample_terms(Scalar reconstruction, const HiddenRow& hidden, int label,
                                   const ClassMeans<Scalar>& means,
                                   const TrainConfig<Scalar>& cfg) {
  LossBreakdown<Scalar> t;
  t.reconstruction = reconstruction;
  t.intra = (hidden - means.means.row(label)).squaredNorm();
  t.weighted_intra = cfg.same_weight(label) * t.intra;
  for (int i = 0; i < means.n_classes(); ++i) {
    if (i == label) continue;
    const Scalar d = (hidden - means.means.row(i)).squaredNorm();
    t.inter += d;
    t.weighted_inter += cfg.other_weight(i) * d;
  }
  t.total = t.reconstruction + t.weighted_intra - t.weighted_inter;
  return t;
}

template <typename Scalar>
void check_means(Index hidden_dim, int label, const ClassMeans<Scalar>& means) {
  if (means.hidden_dim() != hidden_dim) {
    throw ShapeError("class means have dim " + std::to_string(means.hidden_dim()) +
                     " but the layer's hidden dim is " + std::to_string(hidden_dim));
  }
  if (label < 0 || label >= means.n_classes()) {
    throw DataError("label " + std::to_string(label) + " outside [0, " +
                    std::to_string(means.n_classes()) + ")");
  }
}

}  // namespace detail

/// Loss of a single sample (a 1 x input_dim row).
template <typename Scalar>
LossBreakdown<Scalar> loss(const AutoencoderLayer<Scalar>& layer, const RowVectorX<Scalar>& x,
                           int label, const ClassMeans<Scalar>& means,
                           const TrainConfig<Scalar>& cfg) {
  detail::check_means(layer.hidden_dim(), label, means);
  const MatrixX<Scalar> xm = x;
  const MatrixX<Scalar> hidden = encode(layer, xm);
  const MatrixX<Scalar> recon = decode(layer, hidden);
  return detail::sample_terms<Scalar>((recon - xm).squaredNorm(), hidden.row(0), label, means,
                                      cfg);
}

/// Per-sample averaged loss over a batch.
template <typename Scalar>
LossBreakdown<Scalar> batch_loss(const AutoencoderLayer<Scalar>& layer, const MatrixX<Scalar>& x,
                                 std::span<const int> labels, const ClassMeans<Scalar>& means,
                                 const TrainConfig<Scalar>& cfg) {
  if (static_cast<Index>(labels.size()) != x.rows())
    throw ShapeError("batch loss: label count does not match sample rows");
  const MatrixX<Scalar> hidden = encode(layer, x);
  const MatrixX<Scalar> recon = decode(layer, hidden);
  LossBreakdown<Scalar> sum;
  for (Index r = 0; r < x.rows(); ++r) {
    const int label = labels[static_cast<std::size_t>(r)];
    detail::check_means(layer.hidden_dim(), label, means);
    const auto t = detail::sample_terms<Scalar>((recon.row(r) - x.row(r)).squaredNorm(),
                                                hidden.row(r), label, means, cfg);
    sum.reconstruction += t.reconstruction;
    sum.intra += t.intra;
    sum.inter += t.inter;
    sum.weighted_intra += t.weighted_intra;
    sum.weighted_inter += t.weighted_inter;
    sum.total += t.total;
  }
  const auto n = static_cast<Scalar>(x.rows());
  sum.reconstruction /= n;
  sum.intra /= n;
  sum.inter /= n;
  sum.weighted_intra /= n;
  sum.weighted_inter /= n;
  sum.total /= n;
  return sum;
}

template <typename Scalar>
LossBreakdown<Scalar> batch_loss(const AutoencoderLayer<Scalar>& layer,
                                 const BasicLabeledDataset<Scalar>& data,
                                 const ClassMeans<Scalar>& means, const TrainConfig<Scalar>& cfg) {
  return batch_loss(layer, data.samples, std::span<const int>(data.labels), means, cfg);
}

// ---------------------------------------------------------------------------
// Gradients and update
// ---------------------------------------------------------------------------

/// Exact gradient of batch_loss with respect to both weight matrices, class
/// means held constant.
template <typename Scalar>
Gradients<Scalar> gradients(const AutoencoderLayer<Scalar>& layer, const MatrixX<Scalar>& x,
                            std::span<const int> labels, const ClassMeans<Scalar>& means,
                            const TrainConfig<Scalar>& cfg) {
  check_input(layer, x);
  if (static_cast<Index>(labels.size()) != x.rows())
    throw ShapeError("gradients: label count does not match sample rows");

  const Scalar scale = Scalar(2) / static_cast<Scalar>(x.rows());
  const MatrixX<Scalar> hidden = apply_activation(matmul(x, layer.encoder.transpose()),
                                                  layer.activation);
  const MatrixX<Scalar> recon = matmul(hidden, layer.decoder.transpose());
  const MatrixX<Scalar> out_grad = (recon - x) * scale;

  Gradients<Scalar> g;
  g.decoder = matmul(out_grad.transpose(), hidden);
  MatrixX<Scalar> hidden_grad = matmul(out_grad, layer.decoder);

  // Zero weights are skipped rather than multiplied so the plain autoencoder
  // case reproduces the unsupervised gradient bit for bit.
  if (cfg.supervised()) {
    for (Index r = 0; r < x.rows(); ++r) {
      const int s = labels[static_cast<std::size_t>(r)];
      detail::check_means(layer.hidden_dim(), s, means);
      RowVectorX<Scalar> pull = RowVectorX<Scalar>::Zero(hidden.cols());
      if (cfg.same_weight(s) != Scalar(0))
        pull += cfg.same_weight(s) * (hidden.row(r) - means.means.row(s));
      for (int i = 0; i < means.n_classes(); ++i) {
        if (i == s || cfg.other_weight(i) == Scalar(0)) continue;
        pull -= cfg.other_weight(i) * (hidden.row(r) - means.means.row(i));
      }
      hidden_grad.row(r) += scale * pull;
    }
  }

  const MatrixX<Scalar> pre_grad =
      hidden_grad.cwiseProduct(activation_derivative(hidden, layer.activation));
  g.encoder = matmul(pre_grad.transpose(), x);
  return g;
}

template <typename Scalar>
Gradients<Scalar> gradients(const AutoencoderLayer<Scalar>& layer,
                            const BasicLabeledDataset<Scalar>& batch,
                            const ClassMeans<Scalar>& means, const TrainConfig<Scalar>& cfg) {
  return gradients(layer, batch.samples, std::span<const int>(batch.labels), means, cfg);
}

template <typename Scalar>
AutoencoderLayer<Scalar> sgd_step(AutoencoderLayer<Scalar> layer, const Gradients<Scalar>& g,
                                  Scalar learning_rate) {
  if (g.encoder.rows() != layer.encoder.rows() || g.encoder.cols() != layer.encoder.cols() ||
      g.decoder.rows() != layer.decoder.rows() || g.decoder.cols() != layer.decoder.cols()) {
    throw ShapeError("sgd_step: gradient shapes " + shape_string(g.encoder) + "/" +
                     shape_string(g.decoder) + " do not match weights " +
                     shape_string(layer.encoder) + "/" + shape_string(layer.decoder));
  }
  layer.encoder -= learning_rate * g.encoder;
  layer.decoder -= learning_rate * g.decoder;
  return layer;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

/// Weights uniform in [-init_scale/sqrt(fan_in), +init_scale/sqrt(fan_in)).
template <typename Scalar = double>
AutoencoderLayer<Scalar> init_layer(Index input_dim, Index hidden_dim, Activation activation,
                                    double init_scale, Rng& rng) {
  if (input_dim < 1 || hidden_dim < 1)
    throw ParameterError("layer dims must be >= 1, got input " + std::to_string(input_dim) +
                         " hidden " + std::to_string(hidden_dim));
  const double enc = init_scale / std::sqrt(static_cast<double>(input_dim));
  const double dec = init_scale / std::sqrt(static_cast<double>(hidden_dim));
  AutoencoderLayer<Scalar> layer;
  layer.encoder = random_uniform<Scalar>(rng, hidden_dim, input_dim, -enc, enc);
  layer.decoder = random_uniform<Scalar>(rng, input_dim, hidden_dim, -dec, dec);
  layer.activation = activation;
  return layer;
}

namespace detail {

inline constexpr double kDivergenceLimit = 1e12;

template <typename Scalar>
void guard_loss(const LossBreakdown<Scalar>& lb, long iteration) {
  const double total = static_cast<double>(lb.total);
  if (!std::isfinite(total) || std::abs(total) > kDivergenceLimit) {
    throw TrainingDiverged("training diverged at iteration " + std::to_string(iteration) +
                               ": total loss " + std::to_string(total) +
                               " (reduce learning_rate or the lambda weights)",
                           iteration);
  }
}

template <typename Scalar>
TrainResult<Scalar> descend(AutoencoderLayer<Scalar> layer, const BasicLabeledDataset<Scalar>& data,
                            const TrainConfig<Scalar>& cfg, Rng& rng) {
  TrainResult<Scalar> result;
  result.history.reserve(static_cast<std::size_t>(cfg.iterations));
  std::vector<Index> order(static_cast<std::size_t>(data.rows()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Index>(i);

  for (long it = 0; it < cfg.iterations; ++it) {
    const ClassMeans<Scalar> means = class_means(layer, data);
    const LossBreakdown<Scalar> lb = batch_loss(layer, data, means, cfg);
    guard_loss(lb, it);
    result.history.push_back(lb);

    if (cfg.batch_mode == BatchMode::full) {
      layer = sgd_step(layer, gradients(layer, data, means, cfg), cfg.learning_rate);
      continue;
    }
    shuffle_in_place(order, rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::vector<Index> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                    order.begin() + static_cast<std::ptrdiff_t>(stop));
      const auto batch = data.subset(rows);
      layer = sgd_step(layer, gradients(layer, batch, means, cfg), cfg.learning_rate);
    }
  }
  if (!all_finite(layer.encoder) || !all_finite(layer.decoder)) {
    throw TrainingDiverged("training produced non-finite weights after the final update",
                           cfg.iterations);
  }
  result.layer = std::move(layer);
  return result;
}

}  // namespace detail

/// Trains one layer from a seeded initialization. The history holds the loss
/// at the start of each iteration (epoch in minibatch mode).
template <typename Scalar>
TrainResult<Scalar> train_layer(const BasicLabeledDataset<Scalar>& data, Index hidden_dim,
                                const TrainConfig<Scalar>& cfg) {
  data.validate();
  cfg.validate(data.n_classes);
  if (data.empty()) throw DataError("cannot train on an empty dataset");
  Rng rng(cfg.seed);
  auto layer = init_layer<Scalar>(data.dim(), hidden_dim, cfg.activation,
                                  static_cast<double>(cfg.init_scale), rng);
  return detail::descend(std::move(layer), data, cfg, rng);
}

/// Continues training from pretrained weights; class means are taken from the
/// new data. The layer keeps its own activation.
template <typename Scalar>
TrainResult<Scalar> fine_tune(const AutoencoderLayer<Scalar>& layer,
                              const BasicLabeledDataset<Scalar>& data,
                              const TrainConfig<Scalar>& cfg) {
  layer.validate();
  data.validate();
  cfg.validate(data.n_classes);
  if (data.empty()) throw DataError("cannot fine-tune on an empty dataset");
  if (layer.input_dim() != data.dim()) {
    throw ShapeError("pretrained layer expects input dim " + std::to_string(layer.input_dim()) +
                     " but the data has dim " + std::to_string(data.dim()));
  }
  Rng rng(cfg.seed);
  return detail::descend(layer, data, cfg, rng);
}

/// Greedy layer-wise training. Layer j is trained on the hidden
/// representation produced by layers 0..j-1 with seed cfg.seed + j.
template <typename Scalar>
std::vector<TrainResult<Scalar>> stack_train(const BasicLabeledDataset<Scalar>& data,
                                             std::span<const Index> dims,
                                             const TrainConfig<Scalar>& cfg) {
  if (dims.empty()) throw ParameterError("stack_train: need at least one hidden dim");
  std::vector<TrainResult<Scalar>> layers;
  BasicLabeledDataset<Scalar> current = data;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    TrainConfig<Scalar> layer_cfg = cfg;
    layer_cfg.seed = cfg.seed + j;
    layers.push_back(train_layer(current, dims[j], layer_cfg));
    if (j + 1 < dims.size()) current.samples = encode(layers.back().layer, current.samples);
  }
  return layers;
}

template <typename Scalar>
std::vector<AutoencoderLayer<Scalar>> layers_of(const std::vector<TrainResult<Scalar>>& results) {
  std::vector<AutoencoderLayer<Scalar>> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.layer);
  return out;
}

/// Class means at every depth of a stack, each in that layer's hidden space.
template <typename Scalar>
std::vector<ClassMeans<Scalar>> stack_class_means(std::span<const AutoencoderLayer<Scalar>> layers,
                                                  const BasicLabeledDataset<Scalar>& data) {
  std::vector<ClassMeans<Scalar>> out;
  MatrixX<Scalar> x = data.samples;
  for (const auto& layer : layers) {
    x = encode(layer, x);
    out.push_back(class_means_of(x, std::span<const int>(data.labels), data.n_classes));
  }
  return out;
}

}  // namespace crae
