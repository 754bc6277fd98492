#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kanvmc/spin.hpp"
#include "kanvmc/wavefunction.hpp"

namespace kanvmc {

enum class MoveKind { LocalFlip, PairExchange };

/// Which opposite-spin pairs a pair_exchange move may pick.
enum class ExchangeRange { Any, Nearest };

std::string to_string(MoveKind kind);
MoveKind parse_move_kind(const std::string& text);
std::string to_string(ExchangeRange range);
ExchangeRange parse_exchange_range(const std::string& text);

struct SamplerConfig {
  Index n_chains = 1024;
  Index n_samples = 1024;
  int warmup_sweeps = 200;
  MoveKind move = MoveKind::LocalFlip;
  ExchangeRange exchange = ExchangeRange::Any;
  std::uint64_t seed = 0;

  void validate() const;
  Index samples_per_chain() const noexcept { return n_samples / n_chains; }
};

/// Independent Metropolis chains advanced in lockstep so that every step
/// evaluates all proposals in one batch.
struct ChainEnsemble {
  std::vector<SpinConfig> states;
  Eigen::VectorXd log_psi;
  std::vector<std::mt19937_64> rngs;
  std::uint64_t accepted = 0;
  std::uint64_t proposed = 0;
  MoveKind move = MoveKind::LocalFlip;
  ExchangeRange exchange = ExchangeRange::Any;

  Index size() const noexcept { return static_cast<Index>(states.size()); }
  double acceptance() const noexcept {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
  void reset_counters() noexcept { accepted = proposed = 0; }
};

struct SampleSet {
  std::vector<SpinConfig> configs;
  double acceptance = 0.0;
};

/// Stream for chain `chain`, seeded from (seed, chain) through seed_seq so
/// that streams of different chains are decorrelated.
std::mt19937_64 chain_stream(std::uint64_t seed, Index chain);

/// Random starting configurations, one per chain; log psi is not filled.
ChainEnsemble make_chains(const SamplerConfig& cfg, int sites);

/// Recomputes the cached log psi of every chain, e.g. after a parameter update.
template <Wavefunction W>
void refresh(ChainEnsemble& e, const W& model) {
  e.log_psi = model.log_psi(std::span<const SpinConfig>(e.states));
}

template <Wavefunction W>
ChainEnsemble init_chains(const SamplerConfig& cfg, int sites, const W& model) {
  if (model.sites() != sites) throw std::invalid_argument("model and sampler disagree on chain length");
  ChainEnsemble e = make_chains(cfg, sites);
  refresh(e, model);
  return e;
}

namespace detail {

// Draws one proposal for chain `c`; returns false when no legal move exists
// (the step then counts as rejected).
bool propose(ChainEnsemble& e, std::size_t c, SpinConfig& out);

}  // namespace detail

/// One proposal per chain, evaluated as a single batch.
template <Wavefunction W>
void metropolis_step(ChainEnsemble& e, const W& model) {
  const std::size_t n = e.states.size();
  std::vector<SpinConfig> proposals;
  std::vector<std::size_t> owner;
  proposals.reserve(n);
  owner.reserve(n);
  SpinConfig candidate;
  for (std::size_t c = 0; c < n; ++c) {
    if (detail::propose(e, c, candidate)) {
      proposals.push_back(candidate);
      owner.push_back(c);
    }
  }
  const Eigen::VectorXd y = proposals.empty() ? Eigen::VectorXd() : model.log_psi(std::span<const SpinConfig>(proposals));
  std::size_t next = 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 0; c < n; ++c) {
    const double u = unit(e.rngs[c]);
    ++e.proposed;
    if (next >= owner.size() || owner[next] != c) continue;
    const double y_new = y(static_cast<Index>(next));
    const double y_old = e.log_psi(static_cast<Index>(c));
    if (std::log(u) < 2.0 * (y_new - y_old)) {
      e.states[c] = proposals[next];
      e.log_psi(static_cast<Index>(c)) = y_new;
      ++e.accepted;
    }
    ++next;
  }
}

/// L proposal steps per chain.
template <Wavefunction W>
void metropolis_sweep(ChainEnsemble& e, const W& model) {
  if (e.states.empty()) return;
  const int sites = e.states.front().sites();
  for (int s = 0; s < sites; ++s) metropolis_step(e, model);
}

template <Wavefunction W>
void warmup(ChainEnsemble& e, const W& model, int sweeps) {
  for (int s = 0; s < sweeps; ++s) metropolis_sweep(e, model);
}

/// samples_per_chain sweep-separated states from every chain, laid out
/// chain by chain. Acceptance counts only the sweeps made here.
template <Wavefunction W>
SampleSet draw_samples(ChainEnsemble& e, const W& model, const SamplerConfig& cfg) {
  cfg.validate();
  if (e.size() != cfg.n_chains) throw std::invalid_argument("ensemble size does not match sampler config");
  const Index per = cfg.samples_per_chain();
  const std::uint64_t acc0 = e.accepted;
  const std::uint64_t prop0 = e.proposed;
  SampleSet out;
  out.configs.resize(static_cast<std::size_t>(cfg.n_samples));
  for (Index s = 0; s < per; ++s) {
    metropolis_sweep(e, model);
    for (Index c = 0; c < e.size(); ++c) {
      out.configs[static_cast<std::size_t>(c * per + s)] = e.states[static_cast<std::size_t>(c)];
    }
  }
  const std::uint64_t prop = e.proposed - prop0;
  out.acceptance = prop == 0 ? 0.0 : static_cast<double>(e.accepted - acc0) / static_cast<double>(prop);
  return out;
}

}  // namespace kanvmc
