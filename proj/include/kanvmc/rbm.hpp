#pragma once

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Core>

#include "kanvmc/types.hpp"

namespace kanvmc {

/// log(2 cosh x), stable for large |x|.
template <typename Scalar>
Scalar log2cosh(Scalar x) {
  const Scalar a = std::abs(x);
  return a + std::log1p(std::exp(Scalar(-2) * a));
}

/// Real restricted Boltzmann machine with the hidden units traced out:
///
///   y(sigma) = sum_i a_i sigma_i + sum_j log(2 cosh(b_j + sum_i W_ji sigma_i)).
///
/// Parameters: a (L), b (alpha L), W (alpha L x L, row-major).
template <typename Scalar>
class RbmNetwork {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;
  using RowVector = RowVectorX<Scalar>;

  RbmNetwork() = default;
  RbmNetwork(Index visible, Index alpha) : visible_(visible), hidden_(alpha * visible) {
    if (visible < 1 || alpha < 1) throw std::invalid_argument("RBM needs positive size and alpha");
  }

  Index inputs() const noexcept { return visible_; }
  Index hidden() const noexcept { return hidden_; }
  Index param_count() const noexcept { return visible_ + hidden_ + hidden_ * visible_; }

  template <typename Rng>
  void initialize(Scalar* params, Rng& rng, double stddev = 0.01) const {
    std::normal_distribution<double> dist(0.0, stddev);
    for (Index k = 0; k < param_count(); ++k) params[k] = Scalar(dist(rng));
  }

  RowVector forward(const Scalar* p, const Matrix& x) const {
    Matrix theta = weights(p) * x;
    theta.colwise() += hidden_bias(p);
    RowVector y = visible_bias(p).transpose() * x;
    y += theta.unaryExpr([](Scalar t) { return log2cosh(t); }).colwise().sum();
    return y;
  }

  void accumulate_gradient(const Scalar* p, const Matrix& x, const RowVector& w, Scalar* grad) const {
    Matrix theta = weights(p) * x;
    theta.colwise() += hidden_bias(p);
    Matrix t = theta.array().tanh().matrix();
    visible_bias(grad) += x * w.transpose();
    hidden_bias(grad) += t * w.transpose();
    Matrix tw = t * w.asDiagonal();
    weights(grad).noalias() += tw * x.transpose();
  }

  Eigen::Map<const Vector> visible_bias(const Scalar* p) const { return Eigen::Map<const Vector>(p, visible_); }
  Eigen::Map<Vector> visible_bias(Scalar* p) const { return Eigen::Map<Vector>(p, visible_); }
  Eigen::Map<const Vector> hidden_bias(const Scalar* p) const {
    return Eigen::Map<const Vector>(p + visible_, hidden_);
  }
  Eigen::Map<Vector> hidden_bias(Scalar* p) const { return Eigen::Map<Vector>(p + visible_, hidden_); }
  Eigen::Map<const RowMajorMatrixX<Scalar>> weights(const Scalar* p) const {
    return Eigen::Map<const RowMajorMatrixX<Scalar>>(p + visible_ + hidden_, hidden_, visible_);
  }
  Eigen::Map<RowMajorMatrixX<Scalar>> weights(Scalar* p) const {
    return Eigen::Map<RowMajorMatrixX<Scalar>>(p + visible_ + hidden_, hidden_, visible_);
  }

 private:
  Index visible_ = 0;
  Index hidden_ = 0;
};

}  // namespace kanvmc
