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

#include <gtest/gtest.h>

#include <cmath>

#include "crae/classifier.hpp"
#include "crae/eval.hpp"
#include "oracles.hpp"

namespace crae {
namespace {

// Two Gaussian blobs in the plane.
LabeledDataset blobs(std::uint64_t seed, int per_class) {
  Rng rng(seed);
  LabeledDataset d;
  d.n_classes = 2;
  d.samples.resize(2 * per_class, 2);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < per_class; ++i) {
      const Index r = c * per_class + i;
      d.samples(r, 0) = (c == 0 ? -1.5 : 1.5) + 0.5 * rng.normal();
      d.samples(r, 1) = (c == 0 ? 1.0 : -1.0) + 0.5 * rng.normal();
      d.labels.push_back(c);
    }
  return d;
}

TEST(Build, DefaultWidths) {
  const auto m = build_default<double>(576, 2, 1);
  EXPECT_EQ(m.widths(), (std::vector<Index>{576, 144, 36, 1}));
  EXPECT_EQ(m.output, OutputKind::sigmoid);
  for (std::size_t k = 0; k + 1 < m.layers.size(); ++k)
    EXPECT_EQ(m.layers[k].activation, Activation::sigmoid);
  const auto three = build_default<double>(256, 3, 1);
  EXPECT_EQ(three.widths(), (std::vector<Index>{256, 64, 16, 3}));
  EXPECT_EQ(three.output, OutputKind::softmax);
  EXPECT_THROW(build_default<double>(15, 2, 1), ParameterError);
}

TEST(Build, SeededAndZeroBias) {
  const auto a = build_default<double>(64, 2, 4);
  const auto b = build_default<double>(64, 2, 4);
  EXPECT_TRUE(bit_identical(a.layers[0].weights, b.layers[0].weights));
  EXPECT_EQ(a.layers[1].bias.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE(a.layers[0].weights.cwiseAbs().maxCoeff(), 1.0 / 8.0);
}

TEST(Loss, BinaryCrossEntropyOracle) {
  const Index widths[] = {3, 4};
  const auto m = build_mlp<double>(widths, 2, 9);
  Rng rng(1);
  const Matrix x = random_uniform<double>(rng, 6, 3, -1, 1);
  const std::vector<int> y{0, 1, 1, 0, 1, 0};
  const auto p = predict(m, x);
  double expected = 0;
  for (Index r = 0; r < 6; ++r) {
    const double q = p.scores(r, 0);
    expected -= y[static_cast<std::size_t>(r)] ? std::log(q) : std::log(1 - q);
  }
  EXPECT_NEAR(mlp_loss(m, x, y), expected / 6, 1e-12);
}

TEST(Loss, SoftmaxCrossEntropyOracle) {
  const Index widths[] = {3, 5};
  const auto m = build_mlp<double>(widths, 3, 2);
  Rng rng(3);
  const Matrix x = random_uniform<double>(rng, 5, 3, -1, 1);
  const std::vector<int> y{0, 1, 2, 2, 1};
  const auto p = predict(m, x);
  double expected = 0;
  for (Index r = 0; r < 5; ++r) {
    EXPECT_NEAR(p.scores.row(r).sum(), 1.0, 1e-15);
    expected -= std::log(p.scores(r, y[static_cast<std::size_t>(r)]));
  }
  EXPECT_NEAR(mlp_loss(m, x, y), expected / 5, 1e-12);
}

void check_gradients(int n_classes) {
  const Index widths[] = {4, 6, 3};
  auto m = build_mlp<double>(widths, n_classes, 11);
  Rng rng(5);
  for (auto& l : m.layers) l.bias = random_uniform<double>(rng, 1, l.output_dim(), -0.5, 0.5);
  const Matrix x = random_uniform<double>(rng, 7, 4, -1, 1);
  std::vector<int> y;
  for (int i = 0; i < 7; ++i) y.push_back(i % n_classes);
  const auto grads = mlp_gradients(m, x, y);

  using LD = long double;
  const auto ml = m.cast<LD>();
  const MatrixX<LD> xl = x.cast<LD>();
  const LD h = 1e-6L;
  for (std::size_t k = 0; k < m.layers.size(); ++k) {
    Matrix fd_w(m.layers[k].weights.rows(), m.layers[k].weights.cols());
    for (Index r = 0; r < fd_w.rows(); ++r)
      for (Index c = 0; c < fd_w.cols(); ++c) {
        auto plus = ml, minus = ml;
        plus.layers[k].weights(r, c) += h;
        minus.layers[k].weights(r, c) -= h;
        fd_w(r, c) = static_cast<double>((mlp_loss(plus, xl, y) - mlp_loss(minus, xl, y)) / (2 * h));
      }
    Matrix fd_b(1, m.layers[k].bias.size());
    for (Index c = 0; c < fd_b.cols(); ++c) {
      auto plus = ml, minus = ml;
      plus.layers[k].bias(c) += h;
      minus.layers[k].bias(c) -= h;
      fd_b(0, c) = static_cast<double>((mlp_loss(plus, xl, y) - mlp_loss(minus, xl, y)) / (2 * h));
    }
    EXPECT_LT(oracle::max_relative_error(grads[k].weights, fd_w), 1e-6) << "layer " << k;
    EXPECT_LT(oracle::max_relative_error(Matrix(grads[k].bias), fd_b), 1e-6) << "layer " << k;
  }
}

TEST(Gradients, SigmoidOutputMatchesFiniteDifferences) { check_gradients(2); }
TEST(Gradients, SoftmaxOutputMatchesFiniteDifferences) { check_gradients(3); }

TEST(Train, SeparatesBlobs) {
  const auto train = blobs(1, 100);
  const auto test = blobs(2, 100);
  const Index widths[] = {2, 8, 4};
  const auto fit = train_mlp(build_mlp<double>(widths, 2, 3), train, MlpTrainConfig{1000, 0.5});
  EXPECT_LT(fit.history.back(), fit.history.front());
  const auto pred = predict(fit.model, test.samples);
  EXPECT_GE(evaluate(pred.labels, test.labels, 2).mean_classwise_accuracy, 0.99);
}

TEST(Train, StandardizationFittedOnceThenKept) {
  auto train = blobs(1, 50);
  train.samples.col(1).array() = 7.0;  // constant feature
  const Index widths[] = {2, 4};
  const auto fit = train_mlp(build_mlp<double>(widths, 2, 3), train, MlpTrainConfig{5, 0.1});
  ASSERT_TRUE(fit.model.standardized());
  EXPECT_NEAR(fit.model.input_shift(0), train.samples.col(0).mean(), 1e-12);
  EXPECT_EQ(fit.model.input_scale(1), 1.0);
  const auto again = train_mlp(fit.model, blobs(9, 50), MlpTrainConfig{5, 0.1});
  EXPECT_TRUE(bit_identical(again.model.input_shift, fit.model.input_shift));
  EXPECT_TRUE(bit_identical(again.model.input_scale, fit.model.input_scale));
}

TEST(Train, ZeroEpochsReturnsModel) {
  const auto train = blobs(1, 5);
  const Index widths[] = {2, 3};
  const auto m = build_mlp<double>(widths, 2, 3);
  const auto fit = train_mlp(m, train, MlpTrainConfig{0, 0.5});
  EXPECT_TRUE(fit.history.empty());
  EXPECT_TRUE(bit_identical(fit.model.layers[0].weights, m.layers[0].weights));
}

TEST(Train, DimensionMismatchNamed) {
  const auto train = blobs(1, 5);
  const Index widths[] = {3, 3};
  EXPECT_THROW(train_mlp(build_mlp<double>(widths, 2, 3), train, MlpTrainConfig{}), ShapeError);
}

TEST(Predict, TieGoesToClassOne) {
  const Index widths[] = {2, 2};
  auto m = build_mlp<double>(widths, 2, 1);
  for (auto& l : m.layers) l.weights.setZero();
  const auto p = predict(m, Matrix(Matrix::Ones(3, 2)));
  for (Index r = 0; r < 3; ++r) {
    EXPECT_EQ(p.scores(r, 0), 0.5);
    EXPECT_EQ(p.labels[static_cast<std::size_t>(r)], 1);
  }
}

TEST(Predict, LabelOutOfRangeRejected) {
  const Index widths[] = {2, 2};
  const auto m = build_mlp<double>(widths, 2, 1);
  const std::vector<int> y{0, 2};
  EXPECT_THROW(mlp_loss(m, Matrix(Matrix::Ones(2, 2)), y), DataError);
}

}  // namespace
}  // namespace crae
