#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "kanvmc/spin.hpp"

namespace kanvmc {

enum class ModelKind { Tfim, Ahm, J1J2 };

/// Symmetry-breaking field used by the AHM annealing quench.
///   StaggeredZ: -h sum_i (-1)^i S^z_i   (default pinning field)
///   UniformZ:   -h sum_i S^z_i          (literal reading; constant in the Sz=0 sector)
///   UniformX:   -h sum_i S^x_i          (Ising-limit field, gamma >= 0.9)
enum class BiasAxis { None, StaggeredZ, UniformZ, UniformX };

struct BiasField {
  BiasAxis axis = BiasAxis::None;
  double strength = 0.0;
};

/// One of the three periodic chain Hamiltonians.
///
/// TFIM uses Pauli operators (sigma = +-1); AHM and J1-J2 use spin-1/2
/// operators S = sigma/2. With `msr` set, the Marshall rotation
/// (-1)^{N_A} is folded into the off-diagonal nearest-neighbour terms.
struct HamiltonianModel {
  ModelKind kind = ModelKind::J1J2;
  int sites = 0;
  double coupling = 1.0;  // TFIM J
  double field = 0.0;     // TFIM h
  double gamma = 0.0;     // AHM anisotropy
  double j1 = 1.0;
  double j2 = 0.0;
  bool msr = false;
  BiasField bias;

  static HamiltonianModel tfim(int sites, double coupling, double field);
  static HamiltonianModel ahm(int sites, double gamma, bool msr);
  static HamiltonianModel j1j2(int sites, double j1, double j2, bool msr);

  /// Throws std::invalid_argument on out-of-range couplings.
  void validate() const;

  /// True when the Hamiltonian commutes with total S^z.
  bool conserves_magnetization() const noexcept;
};

std::string to_string(ModelKind kind);
std::string to_string(BiasAxis axis);

struct Connection {
  SpinConfig target;
  double amplitude;
};

/// Sparse column <sigma'|H|sigma> for a fixed source sigma. The diagonal
/// entry is always first; off-diagonal entries follow in site order.
class ConnectionSet {
 public:
  void reset(const SpinConfig& source) {
    source_ = source;
    entries_.clear();
    entries_.push_back({source, 0.0});
  }
  void add_diagonal(double amplitude) { entries_.front().amplitude += amplitude; }
  void add(const SpinConfig& target, double amplitude) { entries_.push_back({target, amplitude}); }

  const SpinConfig& source() const noexcept { return source_; }
  double diagonal() const noexcept { return entries_.front().amplitude; }
  const std::vector<Connection>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  SpinConfig source_;
  std::vector<Connection> entries_;
};

/// A local operator described by its connection generator.
using ConnectionGenerator = std::function<void(const SpinConfig&, ConnectionSet&)>;

void connections(const HamiltonianModel& model, const SpinConfig& c, ConnectionSet& out);
ConnectionSet connections(const HamiltonianModel& model, const SpinConfig& c);

ConnectionGenerator as_generator(const HamiltonianModel& model);

/// Marshall sign (-1)^{N_A(sigma)}.
int msr_sign(const SpinConfig& c) noexcept;

/// Staggered z below gamma = 0.9, uniform x from there on.
BiasAxis default_bias_axis(double gamma) noexcept;

/// AHM with pinning field h along `axis` (None picks default_bias_axis).
/// h = 0 removes the field.
HamiltonianModel with_bias(const HamiltonianModel& model, double h, BiasAxis axis = BiasAxis::None);

BiasAxis parse_bias_axis(const std::string& text);
ModelKind parse_model_kind(const std::string& text);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Matrix of `generator` restricted to `basis`; throws when a connection
/// leaves the basis. Element (row sigma', col sigma) = <sigma'|O|sigma>.
SparseMatrix build_sector_matrix(const ConnectionGenerator& generator, const SectorBasis& basis);
SparseMatrix build_sector_matrix(const HamiltonianModel& model, const SectorBasis& basis);

/// Dense variant, limited to kMaxDenseDimension.
Eigen::MatrixXd build_dense_sector_matrix(const HamiltonianModel& model, const SectorBasis& basis);

inline constexpr Index kMaxDenseDimension = 4096;

}  // namespace kanvmc
