#pragma once

// Finite-difference reference for log-amplitude gradients, evaluated in
// extended precision so that rounding stays far below the tolerance.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "kanvmc/ansatz.hpp"

namespace gradcheck {

using Wide = kanvmc::Ansatz<long double>;

inline Wide widen(const kanvmc::Model& m) {
  return Wide::restore(m.spec(), m.frozen().cast<long double>(), m.parameters().cast<long double>());
}

// Fourth-order central difference d y / d theta_k at step h.
inline double derivative(Wide& w, const kanvmc::SpinConfig& c, Eigen::Index k, long double h) {
  auto& p = w.parameters();
  const long double x0 = p(k);
  auto at = [&](long double dx) {
    p(k) = x0 + dx;
    return w.log_psi(c);
  };
  const long double d = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
  p(k) = x0;
  return static_cast<double>(d);
}

// Componentwise |a - b| / max(|a|, |b|); pairs that are both below `floor`
// in magnitude count as agreeing.
inline double relative(double a, double b, double floor = 1e-12) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale < floor ? 0.0 : std::abs(a - b) / scale;
}

struct Report {
  double max_rel = 0.0;
  long checked = 0;
};

// Checks `indices` (all parameters when empty) on every config.
inline Report check(const kanvmc::Model& m, const std::vector<kanvmc::SpinConfig>& configs,
                    std::vector<Eigen::Index> indices = {}, long double h = 1e-5L) {
  if (indices.empty()) {
    for (Eigen::Index k = 0; k < m.param_count(); ++k) indices.push_back(k);
  }
  Wide w = widen(m);
  Report r;
  for (const auto& c : configs) {
    const Eigen::VectorXd g = m.grad_log_psi(c);
    for (Eigen::Index k : indices) {
      r.max_rel = std::max(r.max_rel, relative(g(k), derivative(w, c, k, h)));
      ++r.checked;
    }
  }
  return r;
}

inline std::vector<Eigen::Index> sample_indices(Eigen::Index total, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, total - 1);
  std::vector<Eigen::Index> out;
  for (int i = 0; i < count; ++i) out.push_back(pick(rng));
  out.push_back(total - 1);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Adds N(0, scale) noise to every parameter so biases and signs are generic.
inline void perturb(kanvmc::Model& m, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  for (Eigen::Index k = 0; k < m.param_count(); ++k) m.parameters()(k) += n(rng);
}

inline std::vector<kanvmc::SpinConfig> random_configs(int sites, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<kanvmc::SpinConfig> out;
  for (int i = 0; i < count; ++i) {
    kanvmc::SpinConfig c(sites);
    for (int s = 0; s < sites; ++s) c.set(s, (rng() & 1U) != 0);
    out.push_back(c);
  }
  return out;
}

}  // namespace gradcheck
