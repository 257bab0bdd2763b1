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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "crae/numkit.hpp"
#include "oracles.hpp"

namespace crae {
namespace {

TEST(Matmul, SmallProduct) {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  Matrix b(2, 1);
  b << 5, 6;
  const Matrix c = matmul(a, b);
  EXPECT_EQ(c(0, 0), 17.0);
  EXPECT_EQ(c(1, 0), 39.0);
}

TEST(Matmul, MatchesLoopProduct) {
  Rng rng(3);
  for (int k = 0; k < 10; ++k) {
    const Index n = 1 + static_cast<Index>(rng.index(9));
    const Index m = 1 + static_cast<Index>(rng.index(9));
    const Index p = 1 + static_cast<Index>(rng.index(9));
    const Matrix a = random_uniform<double>(rng, n, m, -1, 1);
    const Matrix b = random_uniform<double>(rng, m, p, -1, 1);
    EXPECT_LT((matmul(a, b) - oracle::loop_matmul(a, b)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Matmul, ShapeErrorNamesBothShapes) {
  const Matrix a = Matrix::Zero(2, 3), b = Matrix::Zero(2, 2);
  try {
    matmul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("2x3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("2x2"), std::string::npos);
  }
}

TEST(Activation, SigmoidValues) {
  EXPECT_NEAR(detail::sigmoid(1.0), 0.7310585786300049, 1e-16);
  EXPECT_EQ(detail::sigmoid(0.0), 0.5);
  EXPECT_LT(detail::sigmoid(800.0), 1.0);
  EXPECT_GT(detail::sigmoid(-800.0), 0.0);
}

TEST(Activation, TanhStaysInsideOpenInterval) {
  EXPECT_LT(detail::tanh_open(50.0), 1.0);
  EXPECT_GT(detail::tanh_open(-50.0), -1.0);
  EXPECT_EQ(detail::tanh_open(0.0), 0.0);
}

TEST(Activation, DerivativeMatchesFiniteDifference) {
  const double zs[] = {-3.0, -0.4, 0.0, 0.7, 2.5};
  for (Activation a : {Activation::sigmoid, Activation::tanh, Activation::linear}) {
    for (double z : zs) {
      Matrix m(1, 1);
      m(0, 0) = z;
      const double out = apply_activation(m, a)(0, 0);
      Matrix o(1, 1);
      o(0, 0) = out;
      const double analytic = activation_derivative(o, a)(0, 0);
      const double h = 1e-6;
      Matrix lo(1, 1), hi(1, 1);
      lo(0, 0) = z - h;
      hi(0, 0) = z + h;
      const double fd = (apply_activation(hi, a)(0, 0) - apply_activation(lo, a)(0, 0)) / (2 * h);
      EXPECT_NEAR(analytic, fd, 1e-8) << to_string(a) << " at " << z;
    }
  }
}

TEST(Activation, ParseRoundTripAndError) {
  for (Activation a : {Activation::sigmoid, Activation::tanh, Activation::linear})
    EXPECT_EQ(parse_activation(to_string(a)), a);
  EXPECT_THROW(parse_activation("relu"), ParameterError);
}

TEST(Rng, EngineMatchesStandardReference) {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  EXPECT_EQ(v, 9981545732273789042ull);
}

TEST(Rng, UniformUsesTop53Bits) {
  std::mt19937_64 engine(42);
  Rng rng(42);
  for (int i = 0; i < 100; ++i) {
    const double expected = static_cast<double>(engine() >> 11) / 9007199254740992.0;
    EXPECT_EQ(rng.uniform01(), expected);
  }
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(99), b(99), c(100);
  bool any_diff = false;
  for (int i = 0; i < 50; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    any_diff = any_diff || x != c.normal();
  }
  EXPECT_TRUE(any_diff);
}

TEST(Rng, NormalMoments) {
  Rng rng(1);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.02);
}

TEST(Rng, IndexStaysInRangeAndCoversIt) {
  Rng rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto k = rng.index(7);
    ASSERT_LT(k, 7u);
    ++hits[k];
  }
  for (int h : hits) EXPECT_GT(h, 800);
  EXPECT_THROW(rng.index(0), ParameterError);
}

TEST(Rng, UniformRangeRespected) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-2.0, 3.0);
    EXPECT_GE(v, -2.0);
    EXPECT_LT(v, 3.0);
  }
  EXPECT_THROW(rng.uniform(1.0, 1.0), ParameterError);
  EXPECT_THROW(random_uniform<double>(rng, 2, 2, 1.0, 0.0), ParameterError);
}

TEST(Rng, ShuffleIsADeterministicPermutation) {
  std::vector<int> a(50), b;
  std::iota(a.begin(), a.end(), 0);
  b = a;
  Rng r1(4), r2(4);
  shuffle_in_place(a, r1);
  shuffle_in_place(b, r2);
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
  std::vector<int> identity(50);
  std::iota(identity.begin(), identity.end(), 0);
  EXPECT_NE(a, identity);
}

TEST(BitIdentical, DistinguishesSignedZeroAndShape) {
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  EXPECT_TRUE(bit_identical(a, b));
  b(1, 1) = -0.0;
  EXPECT_FALSE(bit_identical(a, b));
  EXPECT_FALSE(bit_identical(a, Matrix::Zero(2, 3)));
}

TEST(AllFinite, DetectsNanAndInf) {
  Matrix a = Matrix::Ones(2, 2);
  EXPECT_TRUE(all_finite(a));
  a(0, 1) = std::nan("");
  EXPECT_FALSE(all_finite(a));
  a(0, 1) = INFINITY;
  EXPECT_FALSE(all_finite(a));
}

}  // namespace
}  // namespace crae
