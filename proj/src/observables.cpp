#include "kanvmc/observables.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kanvmc/errors.hpp"
#include "kanvmc/io.hpp"

namespace kanvmc {

namespace {

int wrap(int i, int sites) { return ((i % sites) + sites) % sites; }

double sz(const SpinConfig& c, int i) { return c.up(i) ? 0.5 : -0.5; }

// One (1/L) S^a_l S^a_{l+r} term per l, all folded into `out`. Diagonal
// parts are summed before the division so that r = 0 gives exactly 1/4.
void add_pair_terms(const SpinConfig& c, Axis axis, int r, bool msr_frame, double scale, ConnectionSet& out) {
  const int sites = c.sites();
  const double w = scale / sites;
  if (r == 0) {
    out.add_diagonal(0.25 * scale);
    return;
  }
  if (axis == Axis::Z) {
    double sum = 0.0;
    for (int l = 0; l < sites; ++l) sum += sz(c, l) * sz(c, wrap(l + r, sites));
    out.add_diagonal(scale * sum / sites);
    return;
  }
  for (int l = 0; l < sites; ++l) {
    const int j = wrap(l + r, sites);
    double amp = axis == Axis::X ? 0.25 : -0.25 * c.sigma(l) * c.sigma(j);
    if (msr_frame && on_sublattice_a(l) != on_sublattice_a(j)) amp = -amp;
    SpinConfig t = c;
    t.toggle(l);
    t.toggle(j);
    out.add(t, w * amp);
  }
}

}  // namespace

std::string to_string(Axis axis) {
  switch (axis) {
    case Axis::X:
      return "x";
    case Axis::Y:
      return "y";
    case Axis::Z:
      return "z";
  }
  return "?";
}

Axis parse_axis(const std::string& text) {
  if (text == "x") return Axis::X;
  if (text == "y") return Axis::Y;
  if (text == "z") return Axis::Z;
  throw ConfigError("unknown axis '" + text + "' (expected x, y or z)");
}

std::string to_string(ObservableKind kind) {
  switch (kind) {
    case ObservableKind::SpinSpin:
      return "spin_spin";
    case ObservableKind::Isotropic:
      return "isotropic";
    case ObservableKind::DimerDimer:
      return "dimer_dimer";
    case ObservableKind::StructureFactor:
      return "structure_factor";
    case ObservableKind::M2:
      return "m2";
  }
  return "?";
}

ObservableKind parse_observable_kind(const std::string& text) {
  for (auto k : {ObservableKind::SpinSpin, ObservableKind::Isotropic, ObservableKind::DimerDimer,
                 ObservableKind::StructureFactor, ObservableKind::M2}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown observable '" + text + "'");
}

namespace detail {
void check_distance(int sites, int r) {
  if (r < 0 || r >= sites) {
    throw std::out_of_range("distance " + std::to_string(r) + " outside [0, " + std::to_string(sites) + ")");
  }
}
}  // namespace detail

ConnectionGenerator spin_spin_operator(int sites, Axis axis, int r, bool msr_frame) {
  detail::check_distance(sites, r);
  return [=](const SpinConfig& c, ConnectionSet& out) {
    out.reset(c);
    add_pair_terms(c, axis, r, msr_frame, 1.0, out);
  };
}

ConnectionGenerator isotropic_operator(int sites, int r, bool msr_frame) {
  detail::check_distance(sites, r);
  return [=](const SpinConfig& c, ConnectionSet& out) {
    out.reset(c);
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) add_pair_terms(c, a, r, msr_frame, 1.0 / 3.0, out);
  };
}

ConnectionGenerator dimer_four_point_operator(int sites, int r) {
  detail::check_distance(sites, r);
  return [=](const SpinConfig& c, ConnectionSet& out) {
    out.reset(c);
    double sum = 0.0;
    for (int l = 0; l < sites; ++l) {
      sum += sz(c, l) * sz(c, wrap(l + 1, sites)) * sz(c, wrap(l + r, sites)) * sz(c, wrap(l + r + 1, sites));
    }
    out.add_diagonal(sum / sites);
  };
}

int momentum_index(int sites, double k) {
  const double m = k * sites / (2.0 * std::numbers::pi);
  const double rounded = std::round(m);
  if (std::abs(m - rounded) > 1e-9 || rounded < 0 || rounded >= sites) {
    throw std::invalid_argument("momentum " + std::to_string(k) + " is not 2 pi m / L with 0 <= m < L");
  }
  return static_cast<int>(rounded);
}

double momentum(int sites, int m) { return 2.0 * std::numbers::pi * m / sites; }

ConnectionGenerator structure_factor_operator(int sites, double k) {
  const int m = momentum_index(sites, k);
  std::vector<double> cosines(static_cast<std::size_t>(sites)), sines(static_cast<std::size_t>(sites));
  for (int d = 0; d < sites; ++d) {
    cosines[static_cast<std::size_t>(d)] = std::cos(momentum(sites, d));
    sines[static_cast<std::size_t>(d)] = std::sin(momentum(sites, d));
  }
  return [=](const SpinConfig& c, ConnectionSet& out) {
    out.reset(c);
    // |sum_j e^{-ikj} S^z_j|^2 / L, exactly real and non-negative
    double re = 0.0, im = 0.0;
    for (int j = 0; j < sites; ++j) {
      const std::size_t phase = static_cast<std::size_t>((static_cast<long>(m) * j) % sites);
      re += cosines[phase] * sz(c, j);
      im -= sines[phase] * sz(c, j);
    }
    out.add_diagonal((re * re + im * im) / sites);
  };
}

ConnectionGenerator m2_operator(int sites) {
  if (sites % 2 != 0) throw std::invalid_argument("m2 needs an even chain length");
  return [=](const SpinConfig& c, ConnectionSet& out) {
    out.reset(c);
    int sum = 0;
    for (int i = 0; i < sites; ++i) sum += c.sigma(i) * c.sigma(wrap(i + sites / 2, sites));
    out.add_diagonal(double(sum) / sites);
  };
}

double relative_error(double e_model, double e_ref) {
  if (e_ref == 0.0) throw std::invalid_argument("relative error against a zero reference");
  return std::abs(e_ref - e_model) / std::abs(e_ref);
}

ObservableValue dimer_dimer(const ExactSource& s, int r) {
  const int sites = s.basis.sites();
  detail::check_distance(sites, r);
  const double f = exact_expectation(s.vector, s.basis, dimer_four_point_operator(sites, r));
  const double c = exact_expectation(s.vector, s.basis, spin_spin_operator(sites, Axis::Z, 1, false));
  return {f - c * c, 0.0};
}

std::string ObservableSeries::name() const {
  if (kind == ObservableKind::SpinSpin) return "spin_spin_" + to_string(axis) + to_string(axis);
  return to_string(kind);
}

void write_series_csv(std::ostream& os, const std::vector<ObservableSeries>& all) {
  os << "abscissa,value,stderr,mode,observable,model_tag\n";
  for (const auto& s : all) {
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      os << format_double(s.abscissa[i]) << ',' << format_double(s.values[i]) << ',' << format_double(s.errors[i]) << ',' << s.mode << ',' << s.name() << ','
         << s.model_tag << '\n';
    }
  }
}

}  // namespace kanvmc
