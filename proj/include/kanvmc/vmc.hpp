#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "kanvmc/ansatz.hpp"
#include "kanvmc/hamiltonian.hpp"
#include "kanvmc/sampler.hpp"
#include "kanvmc/schedule.hpp"
#include "kanvmc/wavefunction.hpp"

namespace kanvmc {

/// Bound on |log psi(sigma') - log psi(sigma)| before exponentiation.
inline constexpr double kLogRatioClamp = 60.0;

/// Restricts off-diagonal targets to the sampled magnetization sector.
struct SectorFilter {
  std::optional<int> magnetization;

  bool admits(const SpinConfig& c) const { return !magnetization || kanvmc::magnetization(c) == *magnetization; }
};

struct LocalValues {
  Eigen::VectorXd values;
  std::uint64_t clamps = 0;
};

/// O_loc(sigma) = sum_{sigma'} <sigma'|O|sigma> psi(sigma') / psi(sigma) for
/// every sample, evaluating all targets of a block in one batch. A target of
/// log amplitude -inf contributes exactly zero.
template <Wavefunction W>
LocalValues local_values(const W& model, const ConnectionGenerator& op, std::span<const SpinConfig> samples,
                         const SectorFilter& filter = {}) {
  constexpr std::size_t kBlock = 4096;
  LocalValues out;
  out.values.resize(static_cast<Index>(samples.size()));
  ConnectionSet row;
  std::vector<SpinConfig> targets;
  std::vector<double> amps;
  std::vector<std::size_t> ends;
  for (std::size_t start = 0; start < samples.size(); start += kBlock) {
    const std::size_t n = std::min(kBlock, samples.size() - start);
    const auto block = samples.subspan(start, n);
    targets.clear();
    amps.clear();
    ends.clear();
    std::vector<double> diag(n);
    for (std::size_t b = 0; b < n; ++b) {
      op(block[b], row);
      diag[b] = row.diagonal();
      const auto& entries = row.entries();
      for (std::size_t k = 1; k < entries.size(); ++k) {
        if (entries[k].amplitude == 0.0 || !filter.admits(entries[k].target)) continue;
        targets.push_back(entries[k].target);
        amps.push_back(entries[k].amplitude);
      }
      ends.push_back(targets.size());
    }
    Eigen::VectorXd y0, y1;
    if (!targets.empty()) {
      y0 = model.log_psi(block);
      y1 = model.log_psi(std::span<const SpinConfig>(targets));
    }
    std::size_t k = 0;
    for (std::size_t b = 0; b < n; ++b) {
      double value = diag[b];
      for (; k < ends[b]; ++k) {
        const double base = y0(static_cast<Index>(b));
        const double yt = y1(static_cast<Index>(k));
        if (yt == -std::numeric_limits<double>::infinity()) continue;
        double d = yt - base;
        if (d > kLogRatioClamp || d < -kLogRatioClamp || std::isnan(d)) {
          ++out.clamps;
          d = std::isnan(d) ? 0.0 : std::clamp(d, -kLogRatioClamp, kLogRatioClamp);
        }
        value += amps[k] * std::exp(d);
      }
      out.values(static_cast<Index>(start + b)) = value;
    }
  }
  return out;
}

template <Wavefunction W>
LocalValues local_energies(const W& model, const HamiltonianModel& ham, std::span<const SpinConfig> samples) {
  return local_values(model, as_generator(ham), samples);
}

template <Wavefunction W>
double local_energy(const W& model, const HamiltonianModel& ham, const SpinConfig& c) {
  return local_energies(model, ham, std::span<const SpinConfig>(&c, 1)).values(0);
}

struct VmcEstimate {
  double energy = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  double acceptance = std::numeric_limits<double>::quiet_NaN();
  Index samples = 0;
};

/// Plain sample statistics of local values.
VmcEstimate summarize(const Eigen::VectorXd& eloc, double acceptance = std::numeric_limits<double>::quiet_NaN());

/// Statistics under explicit probabilities `p` (summing to one); the
/// standard error is zero since nothing is sampled.
VmcEstimate summarize_weighted(const Eigen::VectorXd& eloc, const Eigen::VectorXd& p);

template <Wavefunction W>
VmcEstimate estimate(const W& model, const HamiltonianModel& ham, std::span<const SpinConfig> samples,
                     double acceptance = std::numeric_limits<double>::quiet_NaN()) {
  if (samples.empty()) throw std::invalid_argument("estimate needs at least one sample");
  return summarize(local_energies(model, ham, samples).values, acceptance);
}

/// Born probabilities exp(2y)/Z over an enumerated set of configurations.
template <Wavefunction W>
Eigen::VectorXd exact_probabilities(const W& model, std::span<const SpinConfig> configs) {
  Eigen::VectorXd y = model.log_psi(configs);
  const double top = y.maxCoeff();
  Eigen::VectorXd p = (2.0 * (y.array() - top)).exp().matrix();
  return p / p.sum();
}

/// G_k = sum_s p_s 2 (D_k(s) - <D_k>) E_loc(s), evaluated as the weighted
/// backward pass sum_s 2 p_s (E_loc(s) - <E_loc>) D_k(s). Uniform p when
/// `p` is null.
template <DifferentiableWavefunction W>
Eigen::VectorXd energy_gradient(const W& model, std::span<const SpinConfig> samples, const Eigen::VectorXd& eloc,
                                const Eigen::VectorXd* p = nullptr) {
  if (samples.empty()) throw std::invalid_argument("gradient needs at least one sample");
  const Index n = static_cast<Index>(samples.size());
  if (eloc.size() != n || (p != nullptr && p->size() != n)) {
    throw std::invalid_argument("one local energy and weight per sample required");
  }
  Eigen::VectorXd w;
  if (p == nullptr) {
    const double mean = eloc.mean();
    w = (2.0 / double(n)) * (eloc.array() - mean).matrix();
  } else {
    const double mean = p->dot(eloc);
    w = 2.0 * (p->array() * (eloc.array() - mean)).matrix();
  }
  return model.weighted_gradient(samples, w);
}

template <DifferentiableWavefunction W>
Eigen::VectorXd gradient(const W& model, const HamiltonianModel& ham, std::span<const SpinConfig> samples) {
  if (samples.empty()) throw std::invalid_argument("gradient needs at least one sample");
  return energy_gradient(model, samples, local_energies(model, ham, samples).values);
}

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;

  AdamState() = default;
  explicit AdamState(Index size) : m(Eigen::VectorXd::Zero(size)), v(Eigen::VectorXd::Zero(size)) {}
};

/// Adam with bias-corrected moments; updates `theta` in place.
void adam_step(AdamState& opt, Eigen::VectorXd& theta, const Eigen::VectorXd& g, double lr);

struct TrainingPlan {
  LrSchedule lr;
  std::optional<AnnealingSpec> annealing;

  long epochs() const noexcept { return lr.total(); }
  void validate() const;
};

struct HistoryRow {
  long epoch = 0;
  double energy = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  double acceptance = 0.0;
  double lr = 0.0;
  double bias_h = 0.0;
  std::uint64_t clamp_count = 0;
};

using EpochCallback = std::function<void(const HistoryRow&)>;

/// Sample, estimate, differentiate and step once per epoch. Chains persist
/// across epochs and are warmed up once before the first. Throws
/// NumericalAbort when an energy estimate is not finite.
std::vector<HistoryRow> train(Model& model, const HamiltonianModel& ham, const SamplerConfig& sampler,
                              const TrainingPlan& plan, const EpochCallback& on_epoch = {});

/// Fresh chains, warmup and one batch of samples from `model`.
VmcEstimate sample_estimate(const Model& model, const HamiltonianModel& ham, const SamplerConfig& sampler);

}  // namespace kanvmc
