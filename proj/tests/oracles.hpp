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

// Reference implementations used by the unit and acceptance suites. Each one
// is written from the definitions with plain loops or the most direct Eigen
// expression, independent of the library's code paths.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "crae/autoencoder.hpp"
#include "crae/numkit.hpp"

namespace crae::oracle {

/// Triple-loop product.
inline Matrix loop_matmul(const Matrix& a, const Matrix& b) {
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Unsupervised autoencoder: r = sigmoid(x We^T), x_hat = r Wd^T, loss is the
/// mean squared reconstruction error per sample. Expressions are kept in the
/// same product order as the library so results can be compared bitwise.
struct PlainAutoencoder {
  Matrix we;  // hidden x input
  Matrix wd;  // input x hidden

  Matrix hidden(const Matrix& x) const {
    const Matrix pre = x * we.transpose();
    return pre.unaryExpr([](double z) { return logistic(z); });
  }

  double loss(const Matrix& x) const {
    const Matrix h = hidden(x);
    const Matrix recon = h * wd.transpose();
    double sum = 0.0;
    for (Index r = 0; r < x.rows(); ++r) sum += (recon.row(r) - x.row(r)).squaredNorm();
    return sum / static_cast<double>(x.rows());
  }

  std::pair<Matrix, Matrix> gradients(const Matrix& x) const {
    const Matrix h = hidden(x);
    const Matrix recon = h * wd.transpose();
    const Matrix out_grad = (recon - x) * (2.0 / static_cast<double>(x.rows()));
    const Matrix d_dec = out_grad.transpose() * h;
    const Matrix hidden_grad = out_grad * wd;
    const Matrix slope = h.unaryExpr([](double s) { return s * (1.0 - s); });
    const Matrix pre_grad = hidden_grad.cwiseProduct(slope);
    const Matrix d_enc = pre_grad.transpose() * x;
    return {d_enc, d_dec};
  }

  std::vector<double> train(const Matrix& x, double lr, long iterations) {
    std::vector<double> history;
    for (long it = 0; it < iterations; ++it) {
      history.push_back(loss(x));
      const auto [d_enc, d_dec] = gradients(x);
      we -= lr * d_enc;
      wd -= lr * d_dec;
    }
    return history;
  }
};

/// Central differences of the batch loss with the class means frozen at
/// their unperturbed values. Evaluated in long double so the step of 1e-6
/// is far above the roundoff floor.
struct FdGradients {
  Matrix encoder;
  Matrix decoder;
};

inline FdGradients finite_difference(const AutoencoderLayer<double>& layer, const Matrix& x,
                                     std::span<const int> labels, const TrainConfig<double>& cfg,
                                     int n_classes, long double step = 1e-6L) {
  using LD = long double;
  const AutoencoderLayer<LD> base = layer.cast<LD>();
  const MatrixX<LD> xl = x.cast<LD>();
  TrainConfig<LD> cl;
  cl.lambda_same = cfg.lambda_same;
  cl.lambda_other = cfg.lambda_other;
  for (double v : cfg.lambda_same_per_class) cl.lambda_same_per_class.push_back(v);
  for (double v : cfg.lambda_other_per_class) cl.lambda_other_per_class.push_back(v);
  const ClassMeans<LD> means = class_means_of(encode(base, xl), labels, n_classes);

  auto probe = [&](MatrixX<LD> AutoencoderLayer<LD>::*field, Index r, Index c) {
    AutoencoderLayer<LD> plus = base, minus = base;
    (plus.*field)(r, c) += step;
    (minus.*field)(r, c) -= step;
    const LD fp = batch_loss(plus, xl, labels, means, cl).total;
    const LD fm = batch_loss(minus, xl, labels, means, cl).total;
    return static_cast<double>((fp - fm) / (2 * step));
  };

  FdGradients g{Matrix(layer.encoder.rows(), layer.encoder.cols()),
                Matrix(layer.decoder.rows(), layer.decoder.cols())};
  for (Index r = 0; r < g.encoder.rows(); ++r)
    for (Index c = 0; c < g.encoder.cols(); ++c)
      g.encoder(r, c) = probe(&AutoencoderLayer<LD>::encoder, r, c);
  for (Index r = 0; r < g.decoder.rows(); ++r)
    for (Index c = 0; c < g.decoder.cols(); ++c)
      g.decoder(r, c) = probe(&AutoencoderLayer<LD>::decoder, r, c);
  return g;
}

/// Largest |a - b| / max(|a|, |b|, floor) over all entries.
inline double max_relative_error(const Matrix& a, const Matrix& b, double floor = 1e-8) {
  double worst = 0.0;
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c = 0; c < a.cols(); ++c) {
      const double den = std::max({std::abs(a(r, c)), std::abs(b(r, c)), floor});
      worst = std::max(worst, std::abs(a(r, c) - b(r, c)) / den);
    }
  return worst;
}

/// Probability that a random positive outscores a random negative, ties 1/2.
inline double pair_auc(std::span<const double> scores, std::span<const int> labels) {
  double wins = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j])
        wins += 1.0;
      else if (scores[i] == scores[j])
        wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

/// Nearest class mean in input space.
inline std::vector<int> nearest_mean(const Matrix& train, std::span<const int> train_labels,
                                     int n_classes, const Matrix& test) {
  Matrix means = Matrix::Zero(n_classes, train.cols());
  std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
  for (Index r = 0; r < train.rows(); ++r) {
    const int c = train_labels[static_cast<std::size_t>(r)];
    means.row(c) += train.row(r);
    counts[static_cast<std::size_t>(c)] += 1.0;
  }
  for (int c = 0; c < n_classes; ++c) means.row(c) /= counts[static_cast<std::size_t>(c)];
  std::vector<int> out;
  for (Index r = 0; r < test.rows(); ++r) {
    int best = 0;
    double best_d = (test.row(r) - means.row(0)).squaredNorm();
    for (int c = 1; c < n_classes; ++c) {
      const double d = (test.row(r) - means.row(c)).squaredNorm();
      if (d < best_d) best_d = d, best = c;
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace crae::oracle
