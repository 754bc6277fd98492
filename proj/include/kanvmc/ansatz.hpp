#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "kanvmc/errors.hpp"
#include "kanvmc/mlp.hpp"
#include "kanvmc/rbm.hpp"
#include "kanvmc/sinekan.hpp"
#include "kanvmc/spin.hpp"
#include "kanvmc/types.hpp"

namespace kanvmc {

enum class AnsatzKind { SineKan, Mlp, Rbm };

std::string to_string(AnsatzKind kind);
AnsatzKind parse_ansatz_kind(const std::string& text);

/// Architecture and initialisation recipe of a log-amplitude model.
struct AnsatzSpec {
  AnsatzKind kind = AnsatzKind::SineKan;
  int sites = 0;
  std::vector<int> hidden = {64, 64};  // hidden widths; a scalar output layer is appended
  int grid = 8;                        // SineKAN only
  int alpha = 128;                     // RBM only
  bool reflected = false;
  std::uint64_t seed = 0;
  double delta_max = 0.01;
  FrequencyInit frequency_init = FrequencyInit::Harmonic;

  static AnsatzSpec sinekan(int sites, std::vector<int> hidden = {64, 64}, int grid = 8,
                            bool reflected = false, std::uint64_t seed = 0);
  static AnsatzSpec mlp(int sites, std::vector<int> hidden = {256, 256}, bool reflected = false,
                        std::uint64_t seed = 0);
  static AnsatzSpec rbm(int sites, int alpha = 128, std::uint64_t seed = 0);

  /// Display tag: vSineKAN, rSineKAN, vMLP, rMLP or RBM.
  std::string tag() const;
};

/// Warnings for the grid-size anomaly: grid^2 == L while a hidden width is
/// within 10% of L.
std::vector<std::string> sinekan_grid_warnings(int sites, const std::vector<int>& hidden, int grid);

/// Trainable parameter count implied by `spec` without building the model.
Index param_count(const AnsatzSpec& spec);

/// Scalar log-amplitude y(sigma) = log psi(sigma), optionally symmetrised
/// as y(sigma) = S(sigma) + S(R sigma) under the chain reflection R.
///
/// All trainable parameters sit in one contiguous vector in a fixed order
/// (layer by layer; within a SineKAN layer A, w, b; within a dense layer
/// W, b; for the RBM a, b, W). The frozen SineKAN phase perturbations are
/// kept separately.
template <typename Scalar>
class Ansatz {
 public:
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;
  using RowVector = RowVectorX<Scalar>;
  using Network = std::variant<SineKanNetwork<Scalar>, MlpNetwork<Scalar>, RbmNetwork<Scalar>>;

  /// Columns evaluated per network pass.
  static constexpr Index kChunk = 2048;

  Ansatz() = default;

  /// Builds and initialises a model deterministically from `spec.seed`.
  static Ansatz create(const AnsatzSpec& spec) {
    if (spec.sites < 1) throw std::invalid_argument("ansatz needs a positive site count");
    for (int h : spec.hidden) {
      if (h < 1) throw std::invalid_argument("hidden widths must be positive");
    }
    std::mt19937_64 rng(spec.seed);
    Ansatz a;
    a.spec_ = spec;
    switch (spec.kind) {
      case AnsatzKind::SineKan: {
        if (spec.grid < 1) throw std::invalid_argument("grid size must be positive");
        for (const auto& w : sinekan_grid_warnings(spec.sites, spec.hidden, spec.grid)) warn(w);
        const auto dims = output_dims(spec);
        auto deltas = SineKanNetwork<Scalar>::draw_deltas(spec.sites, dims, spec.grid,
                                                          Scalar(spec.delta_max), rng);
        SineKanNetwork<Scalar> net(spec.sites, dims, spec.grid, std::move(deltas));
        a.params_.resize(net.param_count());
        net.initialize(a.params_.data(), rng, spec.frequency_init);
        a.net_ = std::move(net);
        break;
      }
      case AnsatzKind::Mlp: {
        MlpNetwork<Scalar> net(spec.sites, output_dims(spec));
        a.params_.resize(net.param_count());
        net.initialize(a.params_.data(), rng);
        a.net_ = std::move(net);
        break;
      }
      case AnsatzKind::Rbm: {
        if (spec.reflected) throw std::invalid_argument("reflected RBM is not supported");
        RbmNetwork<Scalar> net(spec.sites, spec.alpha);
        a.params_.resize(net.param_count());
        net.initialize(a.params_.data(), rng);
        a.net_ = std::move(net);
        break;
      }
    }
    return a;
  }

  /// Rebuilds a model from stored frozen data and parameters.
  static Ansatz restore(const AnsatzSpec& spec, const Vector& frozen, const Vector& params) {
    Ansatz a;
    a.spec_ = spec;
    switch (spec.kind) {
      case AnsatzKind::SineKan: {
        const auto dims = output_dims(spec);
        std::vector<Vector> deltas;
        Index in = spec.sites, pos = 0;
        for (Index out : dims) {
          const Index n = Index(spec.grid) * in;
          if (pos + n > frozen.size()) throw std::invalid_argument("frozen block too short");
          deltas.push_back(frozen.segment(pos, n));
          pos += n;
          in = out;
        }
        if (pos != frozen.size()) throw std::invalid_argument("frozen block has trailing data");
        a.net_ = SineKanNetwork<Scalar>(spec.sites, dims, spec.grid, std::move(deltas));
        break;
      }
      case AnsatzKind::Mlp:
        a.net_ = MlpNetwork<Scalar>(spec.sites, output_dims(spec));
        break;
      case AnsatzKind::Rbm:
        a.net_ = RbmNetwork<Scalar>(spec.sites, spec.alpha);
        break;
    }
    a.set_parameters(params);
    return a;
  }

  const AnsatzSpec& spec() const noexcept { return spec_; }
  int sites() const noexcept { return spec_.sites; }
  bool reflected() const noexcept { return spec_.reflected; }
  Index param_count() const noexcept { return params_.size(); }
  const Network& network() const noexcept { return net_; }

  const Vector& parameters() const noexcept { return params_; }
  Vector& parameters() noexcept { return params_; }
  void set_parameters(const Vector& p) {
    const Index expected =
        std::visit([](const auto& n) { return n.param_count(); }, net_);
    if (p.size() != expected) {
      throw std::invalid_argument("parameter vector has " + std::to_string(p.size()) +
                                  " entries, model expects " + std::to_string(expected));
    }
    params_ = p;
  }

  /// Frozen SineKAN phase perturbations of all layers, concatenated.
  Vector frozen() const {
    const auto* net = std::get_if<SineKanNetwork<Scalar>>(&net_);
    if (net == nullptr) return Vector();
    Index n = 0;
    for (const auto& l : net->layers()) n += l.delta().size();
    Vector out(n);
    Index pos = 0;
    for (const auto& l : net->layers()) {
      out.segment(pos, l.delta().size()) = l.delta();
      pos += l.delta().size();
    }
    return out;
  }

  /// y for every column of `sigma` (entries +-1).
  Vector log_psi(const Matrix& sigma) const {
    check_rows(sigma);
    Vector y(sigma.cols());
    for (Index start = 0; start < sigma.cols(); start += kChunk) {
      const Index n = std::min(kChunk, sigma.cols() - start);
      y.segment(start, n) = evaluate(sigma.middleCols(start, n)).transpose();
    }
    return y;
  }

  Vector log_psi(std::span<const SpinConfig> configs) const { return log_psi(to_inputs(configs)); }

  Scalar log_psi(const SpinConfig& c) const { return log_psi(std::span<const SpinConfig>(&c, 1))(0); }

  /// sum_b weights_b * d y(sigma_b) / d theta.
  Vector weighted_gradient(const Matrix& sigma, const Vector& weights) const {
    check_rows(sigma);
    if (weights.size() != sigma.cols()) throw std::invalid_argument("one weight per column required");
    Vector grad = Vector::Zero(params_.size());
    for (Index start = 0; start < sigma.cols(); start += kChunk) {
      const Index n = std::min(kChunk, sigma.cols() - start);
      Matrix x = sigma.middleCols(start, n);
      RowVector w = weights.segment(start, n).transpose();
      if (spec_.reflected) {
        x = paired_inputs(x);
        RowVector ww(2 * n);
        ww << w, w;
        w = std::move(ww);
      }
      std::visit([&](const auto& net) { net.accumulate_gradient(params_.data(), x, w, grad.data()); },
                 net_);
    }
    return grad;
  }

  Vector weighted_gradient(std::span<const SpinConfig> configs, const Vector& weights) const {
    return weighted_gradient(to_inputs(configs), weights);
  }

  Vector grad_log_psi(const SpinConfig& c) const {
    return weighted_gradient(std::span<const SpinConfig>(&c, 1), Vector::Ones(1));
  }

  Matrix to_inputs(std::span<const SpinConfig> configs) const {
    Matrix x(spec_.sites, static_cast<Index>(configs.size()));
    for (std::size_t b = 0; b < configs.size(); ++b) {
      if (configs[b].sites() != spec_.sites) {
        throw std::invalid_argument("configuration length " + std::to_string(configs[b].sites()) +
                                    " does not match model length " + std::to_string(spec_.sites));
      }
      for (int i = 0; i < spec_.sites; ++i) {
        x(i, static_cast<Index>(b)) = configs[b].up(i) ? Scalar(1) : Scalar(-1);
      }
    }
    return x;
  }

  static std::vector<Index> output_dims(const AnsatzSpec& spec) {
    std::vector<Index> dims(spec.hidden.begin(), spec.hidden.end());
    dims.push_back(1);
    return dims;
  }

 private:
  void check_rows(const Matrix& sigma) const {
    if (sigma.rows() != spec_.sites) {
      throw std::invalid_argument("input has " + std::to_string(sigma.rows()) +
                                  " sites, model expects " + std::to_string(spec_.sites));
    }
  }

  // [x | R x] with each pair stored in canonical order, so that y(sigma) and
  // y(R sigma) run through identical arithmetic and agree bit for bit.
  static Matrix paired_inputs(const Matrix& x) {
    const Index n = x.cols();
    Matrix out(x.rows(), 2 * n);
    for (Index b = 0; b < n; ++b) {
      const auto col = x.col(b);
      const auto rev = col.reverse();
      bool reversed_first = false;
      for (Index i = 0; i < x.rows(); ++i) {
        if (rev(i) != col(i)) {
          reversed_first = rev(i) < col(i);
          break;
        }
      }
      if (reversed_first) {
        out.col(b) = rev;
        out.col(n + b) = col;
      } else {
        out.col(b) = col;
        out.col(n + b) = rev;
      }
    }
    return out;
  }

  RowVector evaluate(const Matrix& x) const {
    if (!spec_.reflected) {
      return std::visit([&](const auto& net) { return net.forward(params_.data(), x); }, net_);
    }
    const Index n = x.cols();
    const RowVector both =
        std::visit([&](const auto& net) { return net.forward(params_.data(), paired_inputs(x)); }, net_);
    return both.head(n) + both.tail(n);
  }

  AnsatzSpec spec_;
  Network net_;
  Vector params_;
};

using Model = Ansatz<double>;

/// SineKAN model with the given hidden widths (scalar output appended).
Model init_sinekan(int sites, const std::vector<int>& hidden, int grid, bool reflected, std::uint64_t seed);

/// Single SineKAN layer evaluation on one input vector.
template <typename Scalar>
VectorX<Scalar> layer_forward(const SineKanLayer<Scalar>& layer, const Scalar* params,
                              const VectorX<Scalar>& x) {
  MatrixX<Scalar> in = x;
  MatrixX<Scalar> out;
  typename SineKanLayer<Scalar>::Cache cache;
  layer.forward(params, in, out, cache);
  return out.col(0);
}

inline double log_psi(const Model& model, const SpinConfig& c) { return model.log_psi(c); }
inline Eigen::VectorXd grad_log_psi(const Model& model, const SpinConfig& c) { return model.grad_log_psi(c); }
inline Index param_count(const Model& model) { return model.param_count(); }
inline Eigen::VectorXd flatten(const Model& model) { return model.parameters(); }
inline Model unflatten(const Model& model, const Eigen::VectorXd& theta) {
  Model out = model;
  out.set_parameters(theta);
  return out;
}

}  // namespace kanvmc
