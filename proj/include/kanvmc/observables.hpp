#pragma once

#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kanvmc/exact.hpp"
#include "kanvmc/hamiltonian.hpp"
#include "kanvmc/vmc.hpp"

namespace kanvmc {

enum class Axis { X, Y, Z };
enum class ObservableKind { SpinSpin, Isotropic, DimerDimer, StructureFactor, M2 };

std::string to_string(Axis axis);
std::string to_string(ObservableKind kind);
ObservableKind parse_observable_kind(const std::string& text);
Axis parse_axis(const std::string& text);

// Operators in connection form. Spin-1/2 normalisation except m2, which uses
// Pauli matrices. With `msr_frame` set, x/y correlators act on amplitudes
// stored in the Marshall-rotated frame but report physical-frame values.

/// (1/L) sum_l S^a_l S^a_{l+r}.
ConnectionGenerator spin_spin_operator(int sites, Axis axis, int r, bool msr_frame);
/// (1/3)(C^xx + C^yy + C^zz) at distance r.
ConnectionGenerator isotropic_operator(int sites, int r, bool msr_frame);
/// (1/L) sum_l S^z_l S^z_{l+1} S^z_{l+r} S^z_{l+r+1}.
ConnectionGenerator dimer_four_point_operator(int sites, int r);
/// (1/L) sum_{i,j} cos(k (i - j)) S^z_i S^z_j.
ConnectionGenerator structure_factor_operator(int sites, double k);
/// (1/L) sum_i sigma^z_i sigma^z_{i+L/2}.
ConnectionGenerator m2_operator(int sites);

/// Momentum index m with k = 2 pi m / L; throws when k is off the grid.
int momentum_index(int sites, double k);
double momentum(int sites, int m);

/// |e_ref - e_model| / |e_ref|.
double relative_error(double e_model, double e_ref);

struct ObservableValue {
  double value = 0.0;
  double std_error = 0.0;
};

/// An explicit state vector over a basis.
struct ExactSource {
  const SectorBasis& basis;
  const Eigen::VectorXd& vector;
  bool msr_frame = false;
};

/// Samples of a model; off-diagonal targets outside the sampled sector drop out.
template <Wavefunction W>
struct SampledSource {
  const W& model;
  std::span<const SpinConfig> samples;
  bool msr_frame = false;
  SectorFilter filter = {};
};

inline int source_sites(const ExactSource& s) { return s.basis.sites(); }
template <Wavefunction W>
int source_sites(const SampledSource<W>& s) {
  return s.model.sites();
}

inline ObservableValue measure(const ExactSource& s, const ConnectionGenerator& op) {
  return {exact_expectation(s.vector, s.basis, op), 0.0};
}

template <Wavefunction W>
ObservableValue measure(const SampledSource<W>& s, const ConnectionGenerator& op) {
  const Eigen::VectorXd loc = local_values(s.model, op, s.samples, s.filter).values;
  const VmcEstimate e = summarize(loc);
  return {e.energy, e.std_error};
}

namespace detail {
void check_distance(int sites, int r);
}

template <typename Source>
ObservableValue spin_spin(const Source& s, Axis axis, int r) {
  const int sites = source_sites(s);
  detail::check_distance(sites, r);
  return measure(s, spin_spin_operator(sites, axis, r, s.msr_frame));
}

template <typename Source>
ObservableValue isotropic(const Source& s, int r) {
  const int sites = source_sites(s);
  detail::check_distance(sites, r);
  return measure(s, isotropic_operator(sites, r, s.msr_frame));
}

ObservableValue dimer_dimer(const ExactSource& s, int r);

/// D(r) = F(r) - C^zz(1)^2 with F the four-point term; the error bar comes
/// from the linearised per-sample quantity F_loc - 2 C C_loc.
template <Wavefunction W>
ObservableValue dimer_dimer(const SampledSource<W>& s, int r) {
  const int sites = s.model.sites();
  detail::check_distance(sites, r);
  const Eigen::VectorXd f = local_values(s.model, dimer_four_point_operator(sites, r), s.samples).values;
  const Eigen::VectorXd c = local_values(s.model, spin_spin_operator(sites, Axis::Z, 1, false), s.samples).values;
  const double cm = c.mean();
  const VmcEstimate lin = summarize((f.array() - 2.0 * cm * c.array()).matrix());
  return {f.mean() - cm * cm, lin.std_error};
}

template <typename Source>
ObservableValue structure_factor(const Source& s, double k) {
  const int sites = source_sites(s);
  momentum_index(sites, k);
  return measure(s, structure_factor_operator(sites, k));
}

template <typename Source>
ObservableValue tfim_m2(const Source& s) {
  return measure(s, m2_operator(source_sites(s)));
}

struct ObservableSeries {
  ObservableKind kind = ObservableKind::SpinSpin;
  Axis axis = Axis::Z;  // spin_spin only
  std::string mode;     // "exact" or "stochastic"
  std::string model_tag;
  std::vector<double> abscissa;
  std::vector<double> values;
  std::vector<double> errors;

  std::string name() const;
};

/// Full series: r = 0..L-1 for correlators, k = 2 pi m / L for S(k), and a
/// single point at L/2 for m2.
template <typename Source>
ObservableSeries series(const Source& s, ObservableKind kind, Axis axis = Axis::Z) {
  ObservableSeries out;
  out.kind = kind;
  out.axis = axis;
  const int sites = source_sites(s);
  auto push = [&](double x, const ObservableValue& v) {
    out.abscissa.push_back(x);
    out.values.push_back(v.value);
    out.errors.push_back(v.std_error);
  };
  switch (kind) {
    case ObservableKind::SpinSpin:
      for (int r = 0; r < sites; ++r) push(r, spin_spin(s, axis, r));
      break;
    case ObservableKind::Isotropic:
      for (int r = 0; r < sites; ++r) push(r, isotropic(s, r));
      break;
    case ObservableKind::DimerDimer:
      for (int r = 0; r < sites; ++r) push(r, dimer_dimer(s, r));
      break;
    case ObservableKind::StructureFactor:
      for (int m = 0; m < sites; ++m) push(momentum(sites, m), structure_factor(s, momentum(sites, m)));
      break;
    case ObservableKind::M2:
      push(sites / 2, tfim_m2(s));
      break;
  }
  return out;
}

/// CSV with columns abscissa, value, stderr, mode, observable, model_tag.
void write_series_csv(std::ostream& os, const std::vector<ObservableSeries>& series);

}  // namespace kanvmc
