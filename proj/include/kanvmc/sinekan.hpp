#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "kanvmc/types.hpp"
#include "kanvmc/vmath.hpp"

namespace kanvmc {

enum class FrequencyInit { Harmonic, Unit };

/// One sinusoidal Kolmogorov-Arnold layer:
///
///   y_m = sum_{n,l} A[m][n][l] sin(w[n][l] x_l + phi[n][l]) + b_m,
///   phi[n][l] = pi n / N + pi l / I + delta[n][l].
///
/// Trainable parameters live in an external buffer at `offset()`, laid out
/// as A (m, n, l row-major), then w (n, l), then b. The phase grid and its
/// perturbation delta are frozen and owned by the layer.
template <typename Scalar>
class SineKanLayer {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;
  using AmplitudeMap = Eigen::Map<RowMajorMatrixX<Scalar>>;
  using ConstAmplitudeMap = Eigen::Map<const RowMajorMatrixX<Scalar>>;

  /// Activations kept between forward and backward.
  struct Cache {
    Matrix pre;       // (N I) x B phase arguments
    Matrix features;  // sin(pre)
  };

  SineKanLayer(Index in_dim, Index out_dim, Index grid, Index offset, Vector delta)
      : in_(in_dim), out_(out_dim), grid_(grid), offset_(offset), delta_(std::move(delta)) {
    if (in_dim < 1 || out_dim < 1 || grid < 1) {
      throw std::invalid_argument("SineKAN layer dimensions must be positive");
    }
    if (delta_.size() != grid_ * in_) throw std::invalid_argument("delta has wrong shape");
    phase_.resize(grid_ * in_);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    for (Index n = 0; n < grid_; ++n) {
      for (Index l = 0; l < in_; ++l) {
        phase_(n * in_ + l) = pi * Scalar(n) / Scalar(grid_) + pi * Scalar(l) / Scalar(in_) +
                              delta_(n * in_ + l);
      }
    }
  }

  Index in_dim() const noexcept { return in_; }
  Index out_dim() const noexcept { return out_; }
  Index grid() const noexcept { return grid_; }
  Index offset() const noexcept { return offset_; }

  static Index param_count(Index in_dim, Index out_dim, Index grid) {
    return out_dim * grid * in_dim + grid * in_dim + out_dim;
  }
  Index param_count() const noexcept { return param_count(in_, out_, grid_); }

  const Vector& delta() const noexcept { return delta_; }
  const Vector& phase() const noexcept { return phase_; }

  ConstAmplitudeMap amplitudes(const Scalar* params) const {
    return ConstAmplitudeMap(params + offset_, out_, grid_ * in_);
  }
  AmplitudeMap amplitudes(Scalar* params) const {
    return AmplitudeMap(params + offset_, out_, grid_ * in_);
  }
  Eigen::Map<const Vector> frequencies(const Scalar* params) const {
    return Eigen::Map<const Vector>(params + offset_ + out_ * grid_ * in_, grid_ * in_);
  }
  Eigen::Map<Vector> frequencies(Scalar* params) const {
    return Eigen::Map<Vector>(params + offset_ + out_ * grid_ * in_, grid_ * in_);
  }
  Eigen::Map<const Vector> bias(const Scalar* params) const {
    return Eigen::Map<const Vector>(params + offset_ + (out_ + 1) * grid_ * in_, out_);
  }
  Eigen::Map<Vector> bias(Scalar* params) const {
    return Eigen::Map<Vector>(params + offset_ + (out_ + 1) * grid_ * in_, out_);
  }

  /// Amplitudes ~ U(-a, a), a = sqrt(6 / (I N + M)); zero bias.
  template <typename Rng>
  void initialize(Scalar* params, Rng& rng, FrequencyInit freq) const {
    const Scalar a = std::sqrt(Scalar(6) / Scalar(in_ * grid_ + out_));
    std::uniform_real_distribution<double> dist(-double(a), double(a));
    auto amp = amplitudes(params);
    for (Index m = 0; m < out_; ++m) {
      for (Index k = 0; k < grid_ * in_; ++k) amp(m, k) = Scalar(dist(rng));
    }
    auto w = frequencies(params);
    for (Index n = 0; n < grid_; ++n) {
      w.segment(n * in_, in_).setConstant(freq == FrequencyInit::Harmonic ? Scalar(n + 1) : Scalar(1));
    }
    bias(params).setZero();
  }

  void forward(const Scalar* params, const Matrix& x, Matrix& y, Cache& cache) const {
    if (x.rows() != in_) {
      throw std::invalid_argument("SineKAN layer expects " + std::to_string(in_) + " inputs, got " +
                                  std::to_string(x.rows()));
    }
    const Index batch = x.cols();
    const auto w = frequencies(params);
    cache.pre.resize(grid_ * in_, batch);
    for (Index n = 0; n < grid_; ++n) {
      cache.pre.middleRows(n * in_, in_).array() =
          (x.array().colwise() * w.segment(n * in_, in_).array()).colwise() +
          phase_.segment(n * in_, in_).array();
    }
    cache.features.resize(cache.pre.rows(), batch);
    vmath::sin(cache.pre.data(), cache.features.data(), static_cast<std::size_t>(cache.pre.size()));
    y.resize(out_, batch);
    y.noalias() = amplitudes(params) * cache.features;
    y.colwise() += bias(params);
  }

  /// Accumulates dL/dtheta into `grad` (same layout as params) given
  /// dL/dy; writes dL/dx when `dx` is non-null.
  void backward(const Scalar* params, const Matrix& x, const Cache& cache, const Matrix& dy,
                Scalar* grad, Matrix* dx) const {
    amplitudes(grad).noalias() += dy * cache.features.transpose();
    bias(grad) += dy.rowwise().sum();

    Matrix dpre(grid_ * in_, x.cols());
    dpre.noalias() = amplitudes(params).transpose() * dy;
    Matrix cosines(dpre.rows(), dpre.cols());
    vmath::cos(cache.pre.data(), cosines.data(), static_cast<std::size_t>(cache.pre.size()));
    dpre.array() *= cosines.array();

    auto gw = frequencies(grad);
    for (Index n = 0; n < grid_; ++n) {
      gw.segment(n * in_, in_) += (dpre.middleRows(n * in_, in_).array() * x.array()).rowwise().sum().matrix();
    }
    if (dx != nullptr) {
      const auto w = frequencies(params);
      dx->setZero(in_, x.cols());
      for (Index n = 0; n < grid_; ++n) {
        dx->array() += dpre.middleRows(n * in_, in_).array().colwise() * w.segment(n * in_, in_).array();
      }
    }
  }

 private:
  Index in_;
  Index out_;
  Index grid_;
  Index offset_;
  Vector delta_;
  Vector phase_;
};

/// Stack of SineKAN layers ending in a single output.
template <typename Scalar>
class SineKanNetwork {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;
  using RowVector = RowVectorX<Scalar>;
  using Layer = SineKanLayer<Scalar>;

  SineKanNetwork() = default;

  /// `dims` lists output widths, the last must be 1. `deltas` holds one
  /// N x I perturbation vector per layer.
  SineKanNetwork(Index inputs, const std::vector<Index>& dims, Index grid, std::vector<Vector> deltas) {
    if (dims.empty() || dims.back() != 1) throw std::invalid_argument("SineKAN output width must be 1");
    if (deltas.size() != dims.size()) throw std::invalid_argument("one delta block per layer required");
    Index in = inputs;
    Index offset = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      layers_.emplace_back(in, dims[i], grid, offset, std::move(deltas[i]));
      offset += layers_.back().param_count();
      in = dims[i];
    }
    param_count_ = offset;
  }

  /// Draws fresh delta ~ U(0, delta_max] for every layer.
  template <typename Rng>
  static std::vector<Vector> draw_deltas(Index inputs, const std::vector<Index>& dims, Index grid,
                                         Scalar delta_max, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vector> deltas;
    Index in = inputs;
    for (Index out : dims) {
      Vector d(grid * in);
      for (Index k = 0; k < d.size(); ++k) d(k) = delta_max * Scalar(1.0 - unit(rng));
      deltas.push_back(std::move(d));
      in = out;
    }
    return deltas;
  }

  Index inputs() const noexcept { return layers_.empty() ? 0 : layers_.front().in_dim(); }
  Index param_count() const noexcept { return param_count_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  template <typename Rng>
  void initialize(Scalar* params, Rng& rng, FrequencyInit freq) const {
    for (const auto& layer : layers_) layer.initialize(params, rng, freq);
  }

  RowVector forward(const Scalar* params, const Matrix& x) const {
    typename Layer::Cache cache;
    Matrix in = x;
    Matrix out;
    for (const auto& layer : layers_) {
      layer.forward(params, in, out, cache);
      in.swap(out);
    }
    return in.row(0);
  }

  /// grad += sum_b weights_b * d y_b / d theta.
  void accumulate_gradient(const Scalar* params, const Matrix& x, const RowVector& weights,
                           Scalar* grad) const {
    const std::size_t depth = layers_.size();
    std::vector<Matrix> inputs(depth);
    std::vector<typename Layer::Cache> caches(depth);
    inputs[0] = x;
    Matrix out;
    for (std::size_t i = 0; i < depth; ++i) {
      layers_[i].forward(params, inputs[i], out, caches[i]);
      if (i + 1 < depth) inputs[i + 1] = out;
    }
    Matrix dy = weights;
    Matrix dx;
    for (std::size_t i = depth; i-- > 0;) {
      layers_[i].backward(params, inputs[i], caches[i], dy, grad, i > 0 ? &dx : nullptr);
      if (i > 0) dy.swap(dx);
    }
  }

 private:
  std::vector<Layer> layers_;
  Index param_count_ = 0;
};

}  // namespace kanvmc
