// Copyright 2026 The lgmle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LGMLE_DISTRIBUTION_HPP_
#define LGMLE_DISTRIBUTION_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "lgmle/error.hpp"

namespace lgmle {

// Finite-support law of the latent node weights: strictly increasing
// positive support points and a probability vector on them.
template <typename Scalar>
class BasicDiscreteDistribution {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  // Tolerance on |sum(probs) - 1| accepted at construction.
  static constexpr double kSimplexTolerance = 1e-12;

  BasicDiscreteDistribution(Vector support, Vector probs)
      : support_(std::move(support)), probs_(std::move(probs)) {
    validate();
  }

  static BasicDiscreteDistribution point_mass(Scalar value) {
    Vector support(1), probs(1);
    support << value;
    probs << Scalar(1);
    return BasicDiscreteDistribution(support, probs);
  }

  static BasicDiscreteDistribution uniform(Vector support) {
    const auto s = support.size();
    Vector probs = Vector::Constant(s, Scalar(1) / Scalar(s));
    return BasicDiscreteDistribution(std::move(support), std::move(probs));
  }

  // Rescales non-negative weights onto the simplex before validating.
  static BasicDiscreteDistribution normalized(Vector support, Vector weights) {
    const Scalar total = weights.sum();
    if (!(total > Scalar(0))) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "weights must have a positive sum");
    }
    weights /= total;
    return BasicDiscreteDistribution(std::move(support), std::move(weights));
  }

  const Vector& support() const { return support_; }
  const Vector& probs() const { return probs_; }
  Eigen::Index size() const { return support_.size(); }

  // Same law expressed on a larger grid that contains every support point.
  BasicDiscreteDistribution embedded_in(const Vector& grid) const {
    Vector probs = Vector::Zero(grid.size());
    for (Eigen::Index a = 0; a < support_.size(); ++a) {
      const Eigen::Index k = index_in(grid, support_(a));
      if (k < 0) {
        throw Error(ErrorCode::kSupportMismatch,
                    "support point missing from the target grid");
      }
      probs(k) = probs_(a);
    }
    return BasicDiscreteDistribution(grid, probs);
  }

  // Position of `value` in `grid` (relative match 1e-12), or -1.
  static Eigen::Index index_in(const Vector& grid, Scalar value) {
    for (Eigen::Index k = 0; k < grid.size(); ++k) {
      using std::abs;
      if (abs(grid(k) - value) <= Scalar(1e-12) * abs(value)) return k;
    }
    return -1;
  }

  template <typename Other>
  BasicDiscreteDistribution<Other> cast() const {
    return BasicDiscreteDistribution<Other>(support_.template cast<Other>(),
                                            probs_.template cast<Other>());
  }

 private:
  void validate() const {
    if (support_.size() == 0 || support_.size() != probs_.size()) {
      throw Error(ErrorCode::kInvalidDistribution,
                  "support and probs must be non-empty and of equal length");
    }
    for (Eigen::Index a = 0; a < support_.size(); ++a) {
      if (!(support_(a) > Scalar(0))) {
        throw Error(ErrorCode::kInvalidDistribution,
                    "support values must be > 0");
      }
      if (a > 0 && !(support_(a) > support_(a - 1))) {
        throw Error(ErrorCode::kInvalidDistribution,
                    "support must be strictly increasing");
      }
      if (!(probs_(a) >= Scalar(0))) {
        throw Error(ErrorCode::kInvalidDistribution, "probs must be >= 0");
      }
    }
    using std::abs;
    if (abs(probs_.sum() - Scalar(1)) > Scalar(kSimplexTolerance)) {
      throw Error(ErrorCode::kInvalidDistribution, "probs must sum to 1");
    }
  }

  Vector support_;
  Vector probs_;
};

using DiscreteDistribution = BasicDiscreteDistribution<double>;

// Law of m i.i.d. copies, flattened in row-major order (first copy is the
// most significant digit).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> product_measure(
    const Eigen::MatrixBase<Derived>& probs, int copies) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(1);
  out << Scalar(1);
  for (int c = 0; c < copies; ++c) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> next(out.size() * probs.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      next.segment(i * probs.size(), probs.size()) = out(i) * probs;
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace lgmle

#endif  // LGMLE_DISTRIBUTION_HPP_
