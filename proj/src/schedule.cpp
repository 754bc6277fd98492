#include "kanvmc/schedule.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "kanvmc/errors.hpp"

namespace kanvmc {

LrSchedule::LrSchedule(long total_epochs, std::vector<std::pair<long, double>> knots)
    : total_(total_epochs), knots_(std::move(knots)) {
  if (total_ < 1) throw ConfigError("schedule needs at least one epoch");
  if (knots_.empty()) throw ConfigError("schedule needs at least one knot");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!(knots_[i].second > 0.0)) throw ConfigError("learning rates must be positive");
    if (i > 0 && knots_[i].first <= knots_[i - 1].first) {
      throw ConfigError("schedule knots must have strictly increasing epochs");
    }
  }
}

LrSchedule LrSchedule::constant(long total_epochs, double lr) { return LrSchedule(total_epochs, {{0, lr}}); }

LrSchedule LrSchedule::flat_then_linear(long flat, long decay, double start, double end) {
  if (flat < 1 || decay < 0) throw ConfigError("flat phase must be positive and decay non-negative");
  if (decay == 0) return constant(flat, start);
  return LrSchedule(flat + decay, {{0, start}, {flat - 1, start}, {flat + decay - 1, end}});
}

LrSchedule LrSchedule::tfim() { return flat_then_linear(5000, 5000, 1e-4, 1e-6); }

LrSchedule LrSchedule::j1j2(double lr) { return flat_then_linear(30000, 4000, lr, 0.2 * lr); }

double LrSchedule::at(long epoch) const {
  if (epoch < 0 || epoch >= total_) {
    throw std::out_of_range("epoch " + std::to_string(epoch) + " outside schedule of " + std::to_string(total_) +
                            " epochs");
  }
  if (epoch <= knots_.front().first) return knots_.front().second;
  if (epoch >= knots_.back().first) return knots_.back().second;
  const auto hi = std::upper_bound(knots_.begin(), knots_.end(), epoch,
                                   [](long e, const auto& k) { return e < k.first; });
  const auto lo = hi - 1;
  const double f = double(epoch - lo->first) / double(hi->first - lo->first);
  return lo->second + f * (hi->second - lo->second);
}

double lr_at(const LrSchedule& schedule, long epoch) { return schedule.at(epoch); }

AnnealingSpec AnnealingSpec::for_gamma(double gamma) {
  AnnealingSpec a;
  a.h_init = gamma + 0.2;
  return a;
}

void AnnealingSpec::validate() const {
  if (!(h_init > 0.0)) throw ConfigError("annealing h_init must be positive");
  if (stages < 1 || iters_per_stage < 1) throw ConfigError("annealing stages and iters_per_stage must be positive");
  if (post_iters < 0) throw ConfigError("annealing post_iters must be non-negative");
}

double annealing_field(const AnnealingSpec& a, int stage) {
  if (stage < 0 || stage >= a.stages) {
    throw std::out_of_range("annealing stage " + std::to_string(stage) + " outside [0, " + std::to_string(a.stages) +
                            ")");
  }
  return a.h_init * (1.0 - double(stage + 1) / double(a.stages));
}

double annealing_field_at(const AnnealingSpec& a, long epoch) {
  if (epoch < 0 || epoch >= a.biased_epochs()) return 0.0;
  return annealing_field(a, static_cast<int>(epoch / a.iters_per_stage));
}

double j1j2_learning_rate(AnsatzKind kind, bool reflected, int sites, double j2) {
  switch (kind) {
    case AnsatzKind::Rbm:
      return 1e-5;
    case AnsatzKind::Mlp:
      return j2 < 0.4 ? 1e-3 : 1e-4;
    case AnsatzKind::SineKan:
      break;
  }
  const bool tabulated = sites == 32 || sites == 64 || sites == 100;
  if (!tabulated) return j2 < 0.3 ? 1e-3 : 1e-4;
  if (reflected) {
    if (sites == 64) return 1e-3;
    return j2 < 0.3 ? 1e-3 : 1e-4;
  }
  if (sites == 100) return j2 < 0.3 ? 1e-4 : 1e-5;
  return j2 < 0.55 ? 1e-4 : 1e-5;
}

}  // namespace kanvmc
