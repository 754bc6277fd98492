#pragma once

#include <concepts>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "kanvmc/spin.hpp"

namespace kanvmc {

/// Anything that maps a batch of configurations to log amplitudes.
template <typename W>
concept Wavefunction = requires(const W& w, std::span<const SpinConfig> batch) {
  { w.sites() } -> std::convertible_to<int>;
  { w.log_psi(batch) } -> std::convertible_to<Eigen::VectorXd>;
};

/// A wavefunction that also provides weighted parameter gradients
/// sum_b weights_b * d log psi(sigma_b) / d theta.
template <typename W>
concept DifferentiableWavefunction =
    Wavefunction<W> && requires(const W& w, std::span<const SpinConfig> batch, const Eigen::VectorXd& weights) {
      { w.weighted_gradient(batch, weights) } -> std::convertible_to<Eigen::VectorXd>;
      { w.param_count() } -> std::convertible_to<Index>;
    };

/// Memoises log psi per configuration. Valid only while the wrapped model's
/// parameters stay fixed; one instance per optimisation step.
template <Wavefunction W>
class CachedWavefunction {
 public:
  explicit CachedWavefunction(const W& model, std::size_t capacity = std::size_t{1} << 21)
      : model_(&model), capacity_(capacity) {}

  int sites() const { return model_->sites(); }

  Eigen::VectorXd log_psi(std::span<const SpinConfig> batch) const {
    Eigen::VectorXd out(static_cast<Index>(batch.size()));
    std::vector<SpinConfig> missing;
    std::unordered_map<SpinConfig, Index, SpinConfigHash> pending;
    std::vector<Index> slot(batch.size(), -1);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      if (auto it = cache_.find(batch[b]); it != cache_.end()) {
        out(static_cast<Index>(b)) = it->second;
        ++hits_;
        continue;
      }
      auto [it, inserted] = pending.try_emplace(batch[b], static_cast<Index>(missing.size()));
      if (inserted) missing.push_back(batch[b]);
      slot[b] = it->second;
    }
    if (missing.empty()) return out;
    const Eigen::VectorXd fresh = model_->log_psi(std::span<const SpinConfig>(missing));
    misses_ += missing.size();
    for (std::size_t b = 0; b < batch.size(); ++b) {
      if (slot[b] >= 0) out(static_cast<Index>(b)) = fresh(slot[b]);
    }
    if (cache_.size() + missing.size() > capacity_) cache_.clear();
    for (std::size_t i = 0; i < missing.size(); ++i) cache_.emplace(missing[i], fresh(static_cast<Index>(i)));
    return out;
  }

  void clear() { cache_.clear(); }
  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }

 private:
  const W* model_;
  std::size_t capacity_;
  mutable std::unordered_map<SpinConfig, double, SpinConfigHash> cache_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
};

/// Explicit amplitudes over a basis, e.g. an exact eigenvector. log psi is
/// log|v|; configurations outside the basis get -infinity (zero amplitude).
/// The vector must be sign-free up to a global sign and round-off.
class TableWavefunction {
 public:
  TableWavefunction(SectorBasis basis, const Eigen::VectorXd& amplitudes)
      : basis_(std::move(basis)), log_abs_(amplitudes.size()) {
    if (amplitudes.size() != basis_.size()) throw std::invalid_argument("one amplitude per basis state");
    const double scale = amplitudes.cwiseAbs().maxCoeff();
    const double sign = amplitudes.maxCoeff() >= -amplitudes.minCoeff() ? 1.0 : -1.0;
    if ((sign * amplitudes).minCoeff() < -1e-10 * scale) {
      throw std::invalid_argument("table amplitudes change sign; a positive wavefunction cannot represent them");
    }
    for (Index i = 0; i < amplitudes.size(); ++i) log_abs_(i) = std::log(std::abs(amplitudes(i)));
  }

  int sites() const noexcept { return basis_.sites(); }

  Eigen::VectorXd log_psi(std::span<const SpinConfig> batch) const {
    Eigen::VectorXd out(static_cast<Index>(batch.size()));
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const auto idx = basis_.index_of(batch[b]);
      out(static_cast<Index>(b)) = idx ? log_abs_(*idx) : -std::numeric_limits<double>::infinity();
    }
    return out;
  }

  const SectorBasis& basis() const noexcept { return basis_; }

 private:
  SectorBasis basis_;
  Eigen::VectorXd log_abs_;
};

}  // namespace kanvmc
