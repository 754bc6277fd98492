#include "kanvmc/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

#include "kanvmc/errors.hpp"

namespace kanvmc {

namespace {

constexpr double kIsingLimitGamma = 0.9;

int site_mod(int i, int sites) { return ((i % sites) + sites) % sites; }

// sum_i sigma_i sigma_{i+d} over the periodic chain.
int bond_sum(const SpinConfig& c, int d) {
  const int n = c.sites();
  int s = 0;
  for (int i = 0; i < n; ++i) s += c.sigma(i) * c.sigma(site_mod(i + d, n));
  return s;
}

// Flip-flop entries sigma_i != sigma_{i+d} for every bond at distance d.
void add_flip_flops(const SpinConfig& c, int d, double amplitude, ConnectionSet& out) {
  if (amplitude == 0.0) return;
  const int n = c.sites();
  for (int i = 0; i < n; ++i) {
    const int j = site_mod(i + d, n);
    if (c.up(i) != c.up(j)) {
      SpinConfig t = c;
      t.toggle(i);
      t.toggle(j);
      out.add(t, amplitude);
    }
  }
}

void add_single_flips(const SpinConfig& c, double amplitude, ConnectionSet& out) {
  if (amplitude == 0.0) return;
  for (int i = 0; i < c.sites(); ++i) {
    SpinConfig t = c;
    t.toggle(i);
    out.add(t, amplitude);
  }
}

}  // namespace

HamiltonianModel HamiltonianModel::tfim(int sites, double coupling, double field) {
  HamiltonianModel m;
  m.kind = ModelKind::Tfim;
  m.sites = sites;
  m.coupling = coupling;
  m.field = field;
  m.j1 = 0.0;
  m.validate();
  return m;
}

HamiltonianModel HamiltonianModel::ahm(int sites, double gamma, bool msr) {
  HamiltonianModel m;
  m.kind = ModelKind::Ahm;
  m.sites = sites;
  m.coupling = 0.0;
  m.gamma = gamma;
  m.j1 = 0.0;
  m.msr = msr;
  m.validate();
  return m;
}

HamiltonianModel HamiltonianModel::j1j2(int sites, double j1, double j2, bool msr) {
  HamiltonianModel m;
  m.kind = ModelKind::J1J2;
  m.sites = sites;
  m.coupling = 0.0;
  m.j1 = j1;
  m.j2 = j2;
  m.msr = msr;
  m.validate();
  return m;
}

void HamiltonianModel::validate() const {
  if (sites < 2 || sites > kMaxSites) {
    throw std::invalid_argument("chain length out of range: " + std::to_string(sites));
  }
  if (kind == ModelKind::Ahm && (gamma < -1.0 || gamma > 1.0)) {
    throw std::invalid_argument("anisotropy gamma must lie in [-1, 1]");
  }
  if (kind == ModelKind::J1J2 && (!(j1 > 0.0) || j2 < 0.0)) {
    throw std::invalid_argument("J1-J2 chain requires J1 > 0 and J2 >= 0");
  }
  if (bias.strength < 0.0) throw std::invalid_argument("bias strength must be non-negative");
  if (bias.axis == BiasAxis::None && bias.strength != 0.0) {
    throw std::invalid_argument("bias strength set without an axis");
  }
  if (bias.axis != BiasAxis::None && kind != ModelKind::Ahm) {
    throw std::invalid_argument("bias fields are only defined for the AHM");
  }
}

bool HamiltonianModel::conserves_magnetization() const noexcept {
  if (kind == ModelKind::Tfim) return field == 0.0;
  return !(bias.axis == BiasAxis::UniformX && bias.strength != 0.0);
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Tfim: return "tfim";
    case ModelKind::Ahm: return "ahm";
    case ModelKind::J1J2: return "j1j2";
  }
  return "?";
}

std::string to_string(BiasAxis axis) {
  switch (axis) {
    case BiasAxis::None: return "none";
    case BiasAxis::StaggeredZ: return "staggered_z";
    case BiasAxis::UniformZ: return "uniform_z";
    case BiasAxis::UniformX: return "uniform_x";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& text) {
  for (auto k : {ModelKind::Tfim, ModelKind::Ahm, ModelKind::J1J2}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown Hamiltonian kind '" + text + "' (expected tfim, ahm or j1j2)");
}

BiasAxis parse_bias_axis(const std::string& text) {
  for (auto a : {BiasAxis::None, BiasAxis::StaggeredZ, BiasAxis::UniformZ, BiasAxis::UniformX}) {
    if (to_string(a) == text) return a;
  }
  throw ConfigError("unknown bias axis '" + text + "'");
}

void connections(const HamiltonianModel& m, const SpinConfig& c, ConnectionSet& out) {
  if (c.sites() != m.sites) {
    throw std::invalid_argument("configuration has " + std::to_string(c.sites()) +
                                " sites, Hamiltonian expects " + std::to_string(m.sites));
  }
  out.reset(c);
  const double marshall = m.msr ? -1.0 : 1.0;
  switch (m.kind) {
    case ModelKind::Tfim:
      out.add_diagonal(-m.coupling * bond_sum(c, 1));
      add_single_flips(c, -m.field, out);
      break;
    case ModelKind::Ahm: {
      out.add_diagonal((1.0 + m.gamma) * bond_sum(c, 1) / 4.0);
      const double h = m.bias.strength;
      switch (m.bias.axis) {
        case BiasAxis::StaggeredZ: {
          int staggered = 0;
          for (int i = 0; i < c.sites(); ++i) staggered += (i % 2 == 0 ? 1 : -1) * c.sigma(i);
          out.add_diagonal(-h * staggered / 2.0);
          break;
        }
        case BiasAxis::UniformZ:
          out.add_diagonal(-h * magnetization(c) / 2.0);
          break;
        case BiasAxis::None:
        case BiasAxis::UniformX:
          break;
      }
      add_flip_flops(c, 1, marshall * (1.0 - m.gamma) / 2.0, out);
      if (m.bias.axis == BiasAxis::UniformX) add_single_flips(c, -h / 2.0, out);
      break;
    }
    case ModelKind::J1J2:
      out.add_diagonal(m.j1 * bond_sum(c, 1) / 4.0 + m.j2 * bond_sum(c, 2) / 4.0);
      add_flip_flops(c, 1, marshall * m.j1 / 2.0, out);
      // Next-nearest pairs share a sublattice, so the rotation leaves them alone.
      add_flip_flops(c, 2, m.j2 / 2.0, out);
      break;
  }
}

ConnectionSet connections(const HamiltonianModel& model, const SpinConfig& c) {
  ConnectionSet out;
  connections(model, c, out);
  return out;
}

ConnectionGenerator as_generator(const HamiltonianModel& model) {
  return [model](const SpinConfig& c, ConnectionSet& out) { connections(model, c, out); };
}

BiasAxis default_bias_axis(double gamma) noexcept {
  return gamma < kIsingLimitGamma ? BiasAxis::StaggeredZ : BiasAxis::UniformX;
}

int msr_sign(const SpinConfig& c) noexcept { return sublattice_a_up_count(c) % 2 == 0 ? 1 : -1; }

HamiltonianModel with_bias(const HamiltonianModel& model, double h, BiasAxis axis) {
  if (model.kind != ModelKind::Ahm) throw std::invalid_argument("with_bias requires an AHM");
  if (h < 0.0 || !std::isfinite(h)) throw std::invalid_argument("bias strength must be >= 0");
  HamiltonianModel out = model;
  if (h == 0.0) {
    out.bias = {};
  } else {
    if (axis == BiasAxis::None) axis = default_bias_axis(model.gamma);
    out.bias = {axis, h};
  }
  return out;
}

SparseMatrix build_sector_matrix(const ConnectionGenerator& generator, const SectorBasis& basis) {
  const Index dim = basis.size();
  std::vector<Eigen::Triplet<double, Index>> triplets;
  triplets.reserve(static_cast<std::size_t>(dim) * 8);
  ConnectionSet row;
  for (Index col = 0; col < dim; ++col) {
    generator(basis.state(col), row);
    for (const auto& e : row.entries()) {
      if (e.amplitude == 0.0) continue;
      const auto r = basis.index_of(e.target);
      if (!r) {
        throw std::invalid_argument("operator does not preserve the basis sector (" +
                                    to_string(row.source()) + " -> " + to_string(e.target) + ")");
      }
      triplets.emplace_back(*r, col, e.amplitude);
    }
  }
  SparseMatrix h(dim, dim);
  h.setFromTriplets(triplets.begin(), triplets.end());
  h.makeCompressed();
  return h;
}

SparseMatrix build_sector_matrix(const HamiltonianModel& model, const SectorBasis& basis) {
  if (model.sites != basis.sites()) throw std::invalid_argument("basis and model lengths differ");
  if (model.sites == 2) warn("L = 2: periodic bonds coincide");
  return build_sector_matrix(as_generator(model), basis);
}

Eigen::MatrixXd build_dense_sector_matrix(const HamiltonianModel& model, const SectorBasis& basis) {
  if (basis.size() > kMaxDenseDimension) {
    throw std::invalid_argument("dense matrix requested for dimension " +
                                std::to_string(basis.size()));
  }
  return Eigen::MatrixXd(build_sector_matrix(model, basis));
}

}  // namespace kanvmc
