#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "kanvmc/hamiltonian.hpp"
#include "kanvmc/spin.hpp"
#include "kanvmc/wavefunction.hpp"

namespace kanvmc {

/// Largest basis the oracle accepts.
inline constexpr Index kMaxOracleDimension = Index{1} << 20;

struct EdSolution {
  SectorBasis basis;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // one column per eigenvalue
};

struct LanczosOptions {
  int block_size = 0;        // 0: max(k, 2)
  int max_basis = 480;       // Krylov vectors held at once
  int max_restarts = 50;
  double tolerance = 1e-11;  // residual bound relative to the spectral radius
  std::uint64_t seed = 0x1a2b3c4d;
};

/// Above this ed_solve switches from the dense solver to Lanczos.
inline constexpr Index kDenseSolveDimension = 1024;

/// k lowest eigenpairs of `model` on `basis`: dense up to kDenseSolveDimension,
/// thick-restarted block Lanczos with full reorthogonalisation above.
EdSolution ed_solve(const HamiltonianModel& model, const SectorBasis& basis, int k, const LanczosOptions& opts = {});

EdSolution ed_solve_dense(const SparseMatrix& h, const SectorBasis& basis, int k);
EdSolution ed_solve_lanczos(const SparseMatrix& h, const SectorBasis& basis, int k, const LanczosOptions& opts = {});

/// Flips the sign of `v` so its largest-magnitude entry is positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v);

/// max_i ||H v_i - lambda_i v_i||.
double max_residual(const SparseMatrix& h, const EdSolution& sol);

/// Normalised amplitudes exp(y - max y) of `model` over every basis state.
template <Wavefunction W>
Eigen::VectorXd model_vector(const W& model, const SectorBasis& basis) {
  if (basis.size() > kMaxOracleDimension) throw std::length_error("basis exceeds the oracle dimension guard");
  if (model.sites() != basis.sites()) throw std::invalid_argument("model and basis disagree on chain length");
  constexpr Index kBlock = 8192;
  Eigen::VectorXd y(basis.size());
  std::vector<SpinConfig> block;
  for (Index start = 0; start < basis.size(); start += kBlock) {
    const Index n = std::min(kBlock, basis.size() - start);
    block.clear();
    for (Index i = 0; i < n; ++i) block.push_back(basis.state(start + i));
    y.segment(start, n) = model.log_psi(std::span<const SpinConfig>(block));
  }
  const double top = y.maxCoeff();
  Eigen::VectorXd v = (y.array() - top).exp().matrix();
  v /= v.norm();
  return v;
}

/// sum over the ground space (eigenvalues within `degenerate_tol` of the
/// lowest) of |<u|v>|^2 / <v|v>.
double fidelity(const Eigen::VectorXd& v, const EdSolution& sol, double degenerate_tol = 1e-8);

/// Number of eigenvalues within `tol` of the lowest.
int ground_multiplicity(const EdSolution& sol, double tol = 1e-8);

/// <v|O|v> / <v|v>, applying O row by row through its connection generator.
double exact_expectation(const Eigen::VectorXd& v, const SectorBasis& basis, const ConnectionGenerator& op);

/// O v for an operator closed on `basis`.
Eigen::VectorXd apply(const ConnectionGenerator& op, const SectorBasis& basis, const Eigen::VectorXd& v);

/// Rayleigh quotient <v|H|v> / <v|v>.
double rayleigh_quotient(const SparseMatrix& h, const Eigen::VectorXd& v);

}  // namespace kanvmc
