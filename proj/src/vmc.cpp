#include "kanvmc/vmc.hpp"

#include <string>

#include "kanvmc/errors.hpp"

namespace kanvmc {

VmcEstimate summarize(const Eigen::VectorXd& eloc, double acceptance) {
  if (eloc.size() == 0) throw std::invalid_argument("cannot summarize an empty sample");
  VmcEstimate e;
  e.samples = eloc.size();
  // shifted by the first value so that a constant sample is summarised exactly
  const Eigen::ArrayXd d = eloc.array() - eloc(0);
  const double shift = d.mean();
  e.energy = eloc(0) + shift;
  e.variance = std::max(0.0, (d - shift).square().mean());
  e.std_error = std::sqrt(e.variance / double(e.samples));
  e.acceptance = acceptance;
  return e;
}

VmcEstimate summarize_weighted(const Eigen::VectorXd& eloc, const Eigen::VectorXd& p) {
  if (eloc.size() == 0 || eloc.size() != p.size()) throw std::invalid_argument("weights must match local values");
  VmcEstimate e;
  e.samples = eloc.size();
  e.energy = p.dot(eloc);
  e.variance = std::max(0.0, p.dot((eloc.array() - e.energy).square().matrix()));
  e.std_error = 0.0;
  return e;
}

void adam_step(AdamState& opt, Eigen::VectorXd& theta, const Eigen::VectorXd& g, double lr) {
  if (g.size() != theta.size()) throw std::invalid_argument("gradient and parameter sizes differ");
  if (opt.m.size() == 0 && opt.v.size() == 0) {
    opt.m = Eigen::VectorXd::Zero(theta.size());
    opt.v = Eigen::VectorXd::Zero(theta.size());
  }
  if (opt.m.size() != theta.size() || opt.v.size() != theta.size()) {
    throw std::invalid_argument("optimizer state does not match parameter count");
  }
  ++opt.step;
  opt.m = opt.beta1 * opt.m + (1.0 - opt.beta1) * g;
  opt.v = opt.beta2 * opt.v + (1.0 - opt.beta2) * g.cwiseAbs2();
  const double c1 = 1.0 - std::pow(opt.beta1, double(opt.step));
  const double c2 = 1.0 - std::pow(opt.beta2, double(opt.step));
  theta.array() -= lr * (opt.m.array() / c1) / ((opt.v.array() / c2).sqrt() + opt.epsilon);
}

void TrainingPlan::validate() const {
  if (lr.total() < 1) throw ConfigError("training needs at least one epoch");
  if (annealing) {
    annealing->validate();
    if (annealing->total_epochs() != lr.total()) {
      throw ConfigError("annealing covers " + std::to_string(annealing->total_epochs()) +
                        " epochs but the learning-rate schedule has " + std::to_string(lr.total()));
    }
  }
}

std::vector<HistoryRow> train(Model& model, const HamiltonianModel& ham, const SamplerConfig& sampler,
                              const TrainingPlan& plan, const EpochCallback& on_epoch) {
  plan.validate();
  sampler.validate();
  ham.validate();
  if (model.sites() != ham.sites) throw ConfigError("model and Hamiltonian disagree on chain length");

  ChainEnsemble chains = make_chains(sampler, model.sites());
  AdamState opt(model.param_count());
  std::vector<HistoryRow> history;
  history.reserve(static_cast<std::size_t>(plan.epochs()));

  for (long t = 0; t < plan.epochs(); ++t) {
    CachedWavefunction<Model> cached(model);
    refresh(chains, cached);
    if (t == 0) {
      warmup(chains, cached, sampler.warmup_sweeps);
      chains.reset_counters();
    }
    const SampleSet samples = draw_samples(chains, cached, sampler);

    HistoryRow row;
    row.epoch = t;
    row.bias_h = plan.annealing ? annealing_field_at(*plan.annealing, t) : 0.0;
    const HamiltonianModel h = plan.annealing ? with_bias(ham, row.bias_h, plan.annealing->axis) : ham;
    const LocalValues eloc = local_energies(cached, h, samples.configs);
    const VmcEstimate est = summarize(eloc.values, samples.acceptance);
    if (!std::isfinite(est.energy) || !std::isfinite(est.variance)) {
      throw NumericalAbort("non-finite energy estimate at epoch " + std::to_string(t) + " (energy " +
                           std::to_string(est.energy) + ", variance " + std::to_string(est.variance) +
                           ", clamp events " + std::to_string(eloc.clamps) + ")");
    }
    const Eigen::VectorXd g = energy_gradient(model, std::span<const SpinConfig>(samples.configs), eloc.values);
    if (!g.allFinite()) throw NumericalAbort("non-finite gradient at epoch " + std::to_string(t));

    row.energy = est.energy;
    row.variance = est.variance;
    row.std_error = est.std_error;
    row.acceptance = est.acceptance;
    row.lr = plan.lr.at(t);
    row.clamp_count = eloc.clamps;
    adam_step(opt, model.parameters(), g, row.lr);
    history.push_back(row);
    if (on_epoch) on_epoch(row);
  }
  return history;
}

VmcEstimate sample_estimate(const Model& model, const HamiltonianModel& ham, const SamplerConfig& sampler) {
  CachedWavefunction<Model> cached(model);
  ChainEnsemble chains = init_chains(sampler, model.sites(), cached);
  warmup(chains, cached, sampler.warmup_sweeps);
  const SampleSet samples = draw_samples(chains, cached, sampler);
  return estimate(cached, ham, samples.configs, samples.acceptance);
}

}  // namespace kanvmc
