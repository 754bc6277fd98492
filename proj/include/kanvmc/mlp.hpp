#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "kanvmc/types.hpp"

namespace kanvmc {

/// Fully connected network with ReLU after every hidden layer and a scalar
/// linear output. Per layer the parameters are W (out x in, row-major)
/// followed by b.
template <typename Scalar>
class MlpNetwork {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;
  using RowVector = RowVectorX<Scalar>;

  struct Layer {
    Index in;
    Index out;
    Index offset;
  };

  MlpNetwork() = default;

  MlpNetwork(Index inputs, const std::vector<Index>& dims) {
    if (dims.empty() || dims.back() != 1) throw std::invalid_argument("MLP output width must be 1");
    Index in = inputs;
    Index offset = 0;
    for (Index out : dims) {
      if (in < 1 || out < 1) throw std::invalid_argument("MLP layer dimensions must be positive");
      layers_.push_back({in, out, offset});
      offset += in * out + out;
      in = out;
    }
    param_count_ = offset;
  }

  Index inputs() const noexcept { return layers_.empty() ? 0 : layers_.front().in; }
  Index param_count() const noexcept { return param_count_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  /// LeCun-normal weights, zero biases.
  template <typename Rng>
  void initialize(Scalar* params, Rng& rng) const {
    for (const auto& l : layers_) {
      std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(double(l.in)));
      auto w = weights(params, l);
      for (Index r = 0; r < l.out; ++r) {
        for (Index c = 0; c < l.in; ++c) w(r, c) = Scalar(dist(rng));
      }
      bias(params, l).setZero();
    }
  }

  RowVector forward(const Scalar* params, const Matrix& x) const {
    Matrix h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& l = layers_[i];
      Matrix z = weights(params, l) * h;
      z.colwise() += bias(params, l);
      if (i + 1 < layers_.size()) z = z.cwiseMax(Scalar(0));
      h.swap(z);
    }
    return h.row(0);
  }

  void accumulate_gradient(const Scalar* params, const Matrix& x, const RowVector& weights_in,
                           Scalar* grad) const {
    const std::size_t depth = layers_.size();
    std::vector<Matrix> acts(depth + 1);  // inputs to each layer
    std::vector<Matrix> pre(depth);
    acts[0] = x;
    for (std::size_t i = 0; i < depth; ++i) {
      const auto& l = layers_[i];
      pre[i] = weights(params, l) * acts[i];
      pre[i].colwise() += bias(params, l);
      acts[i + 1] = (i + 1 < depth) ? Matrix(pre[i].cwiseMax(Scalar(0))) : pre[i];
    }
    Matrix delta = weights_in;
    for (std::size_t i = depth; i-- > 0;) {
      const auto& l = layers_[i];
      weights(grad, l).noalias() += delta * acts[i].transpose();
      bias(grad, l) += delta.rowwise().sum();
      if (i == 0) break;
      Matrix back = weights(params, l).transpose() * delta;
      delta = (pre[i - 1].array() > Scalar(0)).select(back, Scalar(0));
    }
  }

  static Eigen::Map<const RowMajorMatrixX<Scalar>> weights(const Scalar* p, const Layer& l) {
    return Eigen::Map<const RowMajorMatrixX<Scalar>>(p + l.offset, l.out, l.in);
  }
  static Eigen::Map<RowMajorMatrixX<Scalar>> weights(Scalar* p, const Layer& l) {
    return Eigen::Map<RowMajorMatrixX<Scalar>>(p + l.offset, l.out, l.in);
  }
  static Eigen::Map<const Vector> bias(const Scalar* p, const Layer& l) {
    return Eigen::Map<const Vector>(p + l.offset + l.in * l.out, l.out);
  }
  static Eigen::Map<Vector> bias(Scalar* p, const Layer& l) {
    return Eigen::Map<Vector>(p + l.offset + l.in * l.out, l.out);
  }

 private:
  std::vector<Layer> layers_;
  Index param_count_ = 0;
};

}  // namespace kanvmc
