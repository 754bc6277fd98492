#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "kanvmc/ansatz.hpp"
#include "kanvmc/hamiltonian.hpp"

namespace kanvmc {

/// Piecewise-linear learning rate through (epoch, value) knots, constant
/// before the first and after the last knot.
class LrSchedule {
 public:
  LrSchedule() = default;
  LrSchedule(long total_epochs, std::vector<std::pair<long, double>> knots);

  static LrSchedule constant(long total_epochs, double lr);
  /// Flat at `start` for `flat` epochs, then linear to `end` at the last epoch.
  static LrSchedule flat_then_linear(long flat, long decay, double start, double end);

  /// 5000 epochs at 1e-4, then linear to 1e-6 over 5000 more.
  static LrSchedule tfim();
  /// 30000 epochs at lr, then linear to 0.2 lr over 4000 more.
  static LrSchedule j1j2(double lr);

  long total() const noexcept { return total_; }
  const std::vector<std::pair<long, double>>& knots() const noexcept { return knots_; }

  double at(long epoch) const;

 private:
  long total_ = 0;
  std::vector<std::pair<long, double>> knots_;
};

double lr_at(const LrSchedule& schedule, long epoch);

/// Zeeman-bias quench: `stages` stages of `iters_per_stage` epochs with
/// h_n = h_init (1 - (n+1)/stages), then `post_iters` epochs unbiased.
struct AnnealingSpec {
  double h_init = 0.0;
  int stages = 15;
  long iters_per_stage = 333;
  long post_iters = 5005;
  BiasAxis axis = BiasAxis::None;  // None: default_bias_axis(gamma)

  static AnnealingSpec for_gamma(double gamma);

  void validate() const;
  long biased_epochs() const noexcept { return stages * iters_per_stage; }
  long total_epochs() const noexcept { return biased_epochs() + post_iters; }
};

double annealing_field(const AnnealingSpec& a, int stage);

/// Bias strength in force at `epoch`; zero after the last stage.
double annealing_field_at(const AnnealingSpec& a, long epoch);

/// Constant learning rate the reference runs use for a J1-J2 chain.
double j1j2_learning_rate(AnsatzKind kind, bool reflected, int sites, double j2);

}  // namespace kanvmc
