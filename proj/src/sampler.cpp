#include "kanvmc/sampler.hpp"

#include <algorithm>
#include <numeric>

#include "kanvmc/errors.hpp"

namespace kanvmc {

std::string to_string(MoveKind kind) {
  return kind == MoveKind::LocalFlip ? "local_flip" : "pair_exchange";
}

MoveKind parse_move_kind(const std::string& text) {
  if (text == "local_flip") return MoveKind::LocalFlip;
  if (text == "pair_exchange") return MoveKind::PairExchange;
  throw ConfigError("unknown move kind '" + text + "' (expected local_flip or pair_exchange)");
}

std::string to_string(ExchangeRange range) { return range == ExchangeRange::Any ? "any" : "nearest"; }

ExchangeRange parse_exchange_range(const std::string& text) {
  if (text == "any") return ExchangeRange::Any;
  if (text == "nearest") return ExchangeRange::Nearest;
  throw ConfigError("unknown exchange range '" + text + "' (expected any or nearest)");
}

void SamplerConfig::validate() const {
  if (n_chains < 1 || n_samples < 1) throw ConfigError("n_chains and n_samples must be at least 1");
  if (warmup_sweeps < 0) throw ConfigError("warmup_sweeps must be non-negative");
  if (n_samples % n_chains != 0) {
    throw ConfigError("n_samples (" + std::to_string(n_samples) + ") must be divisible by n_chains (" +
                      std::to_string(n_chains) + ")");
  }
}

std::mt19937_64 chain_stream(std::uint64_t seed, Index chain) {
  const auto c = static_cast<std::uint64_t>(chain);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32), 0x6b616e76u};
  return std::mt19937_64(seq);
}

ChainEnsemble make_chains(const SamplerConfig& cfg, int sites) {
  cfg.validate();
  if (cfg.move == MoveKind::PairExchange && sites % 2 != 0) {
    throw ConfigError("pair_exchange sampling needs an even number of sites, got " + std::to_string(sites));
  }
  ChainEnsemble e;
  e.move = cfg.move;
  e.exchange = cfg.exchange;
  e.states.reserve(static_cast<std::size_t>(cfg.n_chains));
  e.rngs.reserve(static_cast<std::size_t>(cfg.n_chains));
  std::vector<int> order(static_cast<std::size_t>(sites));
  for (Index c = 0; c < cfg.n_chains; ++c) {
    auto rng = chain_stream(cfg.seed, c);
    SpinConfig s(sites);
    if (cfg.move == MoveKind::LocalFlip) {
      std::bernoulli_distribution coin(0.5);
      for (int i = 0; i < sites; ++i) s.set(i, coin(rng));
    } else {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      for (int i = 0; i < sites / 2; ++i) s.set(order[static_cast<std::size_t>(i)], true);
    }
    e.states.push_back(s);
    e.rngs.push_back(std::move(rng));
  }
  return e;
}

namespace detail {

bool propose(ChainEnsemble& e, std::size_t c, SpinConfig& out) {
  const SpinConfig& s = e.states[c];
  auto& rng = e.rngs[c];
  const int sites = s.sites();
  if (e.move == MoveKind::LocalFlip) {
    std::uniform_int_distribution<int> site(0, sites - 1);
    out = s;
    out.toggle(site(rng));
    return true;
  }
  if (e.exchange == ExchangeRange::Nearest) {
    std::uniform_int_distribution<int> bond(0, sites - 1);
    const int i = bond(rng);
    const int j = (i + 1) % sites;
    if (s.up(i) == s.up(j)) return false;
    out = s;
    out.toggle(i);
    out.toggle(j);
    return true;
  }
  const int ups = s.up_count();
  if (ups == 0 || ups == sites) return false;
  std::uniform_int_distribution<int> pick_up(0, ups - 1);
  std::uniform_int_distribution<int> pick_down(0, sites - ups - 1);
  int a = pick_up(rng);
  int b = pick_down(rng);
  int i = -1, j = -1;
  for (int k = 0; k < sites && (i < 0 || j < 0); ++k) {
    if (s.up(k)) {
      if (a-- == 0) i = k;
    } else if (b-- == 0) {
      j = k;
    }
  }
  out = s;
  out.toggle(i);
  out.toggle(j);
  return true;
}

}  // namespace detail

}  // namespace kanvmc
