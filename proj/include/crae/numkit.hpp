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

// Dense numeric carriers, activations and the seeded generator shared by the
// rest of the library. Samples are always rows.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <string_view>

#include "crae/errors.hpp"

namespace crae {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Matrix = MatrixX<double>;
using RowVector = RowVectorX<double>;

inline std::string shape_string(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

template <typename Derived>
std::string shape_string(const Eigen::EigenBase<Derived>& m) {
  return shape_string(m.rows(), m.cols());
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

/// True when both operands have the same shape and identical bit patterns.
template <typename DerivedA, typename DerivedB>
bool bit_identical(const Eigen::DenseBase<DerivedA>& a, const Eigen::DenseBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) {
      const auto x = a(i, j);
      const auto y = b(i, j);
      if (std::memcmp(&x, &y, sizeof(x)) != 0) return false;
    }
  return true;
}

/// Matrix product with an explicit shape check. Eigen's single-threaded
/// product is deterministic for fixed operand shapes.
template <typename DerivedA, typename DerivedB>
auto matmul(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b)
    -> MatrixX<typename DerivedA::Scalar> {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: cannot multiply " + shape_string(a) + " by " + shape_string(b));
  }
  return a * b;
}

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

enum class Activation : std::uint8_t { sigmoid = 0, tanh = 1, linear = 2 };

inline std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
  }
  return "unknown";
}

inline Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  if (name == "linear") return Activation::linear;
  throw ParameterError("unknown activation '" + std::string(name) +
                       "' (expected sigmoid, tanh or linear)");
}

namespace detail {

// Saturated outputs are pinned one ulp inside the open range so the bounded
// activations never reach their asymptotes in floating point.
template <typename Scalar>
Scalar sigmoid(Scalar z) {
  const Scalar s = Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar lo = std::numeric_limits<Scalar>::denorm_min();
  const Scalar hi = std::nextafter(Scalar(1), Scalar(0));
  return s < lo ? lo : (s > hi ? hi : s);
}

template <typename Scalar>
Scalar tanh_open(Scalar z) {
  const Scalar t = std::tanh(z);
  const Scalar hi = std::nextafter(Scalar(1), Scalar(0));
  return t > hi ? hi : (t < -hi ? -hi : t);
}

}  // namespace detail

template <typename Derived>
auto apply_activation(const Eigen::MatrixBase<Derived>& m, Activation a)
    -> MatrixX<typename Derived::Scalar> {
  using Scalar = typename Derived::Scalar;
  switch (a) {
    case Activation::sigmoid:
      return m.unaryExpr([](Scalar z) { return detail::sigmoid(z); });
    case Activation::tanh:
      return m.unaryExpr([](Scalar z) { return detail::tanh_open(z); });
    case Activation::linear:
      return m;
  }
  throw ParameterError("invalid activation tag");
}

/// Derivative of the activation expressed through its output value.
template <typename Derived>
auto activation_derivative(const Eigen::MatrixBase<Derived>& out, Activation a)
    -> MatrixX<typename Derived::Scalar> {
  using Scalar = typename Derived::Scalar;
  switch (a) {
    case Activation::sigmoid:
      return out.unaryExpr([](Scalar s) { return s * (Scalar(1) - s); });
    case Activation::tanh:
      return out.unaryExpr([](Scalar t) { return Scalar(1) - t * t; });
    case Activation::linear:
      return MatrixX<Scalar>::Ones(out.rows(), out.cols());
  }
  throw ParameterError("invalid activation tag");
}

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// Seeded generator. The engine is std::mt19937_64, whose output sequence is
/// fixed by the C++ standard; uniform reals take the top 53 bits of each draw
/// so they are bit-identical across platforms. Gaussian draws use the
/// Marsaglia polar method on top of those uniforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    if (!(lo < hi)) {
      throw ParameterError("uniform: need lo < hi, got lo=" + std::to_string(lo) +
                           " hi=" + std::to_string(hi));
    }
    const double v = lo + (hi - lo) * uniform01();
    return v < hi ? v : std::nextafter(hi, lo);
  }

  /// Uniform integer in [0, n) by rejection, free of modulo bias.
  std::uint64_t index(std::uint64_t n) {
    if (n == 0) throw ParameterError("index: empty range");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

template <typename Scalar = double>
MatrixX<Scalar> random_uniform(Rng& rng, Index rows, Index cols, double lo, double hi) {
  if (!(lo < hi)) {
    throw ParameterError("random_uniform: need lo < hi, got lo=" + std::to_string(lo) +
                         " hi=" + std::to_string(hi));
  }
  MatrixX<Scalar> m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = static_cast<Scalar>(rng.uniform(lo, hi));
  return m;
}

/// Fisher-Yates shuffle driven by Rng (std::shuffle's algorithm is unspecified).
template <typename T>
void shuffle_in_place(T& seq, Rng& rng) {
  for (auto i = static_cast<std::uint64_t>(seq.size()); i > 1; --i) {
    const auto j = rng.index(i);
    std::swap(seq[i - 1], seq[j]);
  }
}

}  // namespace crae
