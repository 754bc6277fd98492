#include "kanvmc/exact.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "kanvmc/errors.hpp"

namespace kanvmc {

namespace {

void check_request(const SparseMatrix& h, const SectorBasis& basis, int k) {
  if (h.rows() != h.cols() || h.rows() != basis.size()) throw std::invalid_argument("matrix and basis sizes differ");
  if (basis.size() > kMaxOracleDimension) throw std::length_error("basis exceeds the oracle dimension guard");
  if (k < 1 || k > basis.size()) {
    throw std::invalid_argument("requested " + std::to_string(k) + " eigenpairs from a space of dimension " +
                                std::to_string(basis.size()));
  }
}

// Infinity norm, an upper bound on the spectral radius of a symmetric matrix.
double norm_bound(const SparseMatrix& h) {
  double best = 0.0;
  for (Index r = 0; r < h.outerSize(); ++r) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(h, r); it; ++it) row += std::abs(it.value());
    best = std::max(best, row);
  }
  return best;
}

// Orthonormal basis of the columns of `w` after projecting out `v`, twice.
Eigen::MatrixXd orthonormalize_against(const Eigen::Ref<const Eigen::MatrixXd>& v, Eigen::MatrixXd w) {
  for (int pass = 0; pass < 2; ++pass) {
    if (v.cols() > 0) w -= v * (v.transpose() * w);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
    w = qr.householderQ() * Eigen::MatrixXd::Identity(w.rows(), w.cols());
  }
  return w;
}

}  // namespace

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  if (v.size() == 0) return;
  Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  if (v(at) < 0.0) v = -v;
}

EdSolution ed_solve_dense(const SparseMatrix& h, const SectorBasis& basis, int k) {
  check_request(h, basis, k);
  if (basis.size() > kMaxDenseDimension) {
    throw std::length_error("dense solver limited to dimension " + std::to_string(kMaxDenseDimension));
  }
  const Eigen::MatrixXd dense = Eigen::MatrixXd(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success) throw NumericalAbort("dense eigensolver failed");
  EdSolution sol{basis, es.eigenvalues().head(k), es.eigenvectors().leftCols(k)};
  for (int i = 0; i < k; ++i) fix_sign(sol.eigenvectors.col(i));
  return sol;
}

EdSolution ed_solve_lanczos(const SparseMatrix& h, const SectorBasis& basis, int k, const LanczosOptions& opts) {
  check_request(h, basis, k);
  const Index n = basis.size();
  const Index p = std::min<Index>(n, opts.block_size > 0 ? opts.block_size : std::max(k, 2));
  const Index capacity = std::min<Index>(n, std::max<Index>(opts.max_basis, 4 * p));
  const double scale = std::max(norm_bound(h), 1e-300);
  const double target = opts.tolerance * scale;

  Eigen::MatrixXd v(n, capacity);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(capacity, capacity);
  {
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd start(n, p);
    for (Index c = 0; c < p; ++c) {
      for (Index r = 0; r < n; ++r) start(r, c) = gauss(rng);
    }
    v.leftCols(p) = orthonormalize_against(v.leftCols(0), std::move(start));
  }

  // Thick restart keeps this many Ritz vectors when the basis is full.
  const Index keep = std::max<Index>(k, ((capacity - p) / 2 / p) * p);
  Index m = p;
  int restarts = 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz;
  double worst = 0.0;
  for (;;) {
    const Index j0 = m - p;
    Eigen::MatrixXd w = h * v.middleCols(j0, p);
    const Eigen::MatrixXd coeff = v.leftCols(m).transpose() * w;
    t.block(0, j0, m, p) = coeff;
    t.block(j0, 0, p, m) = coeff.transpose();
    w -= v.leftCols(m) * coeff;
    w -= v.leftCols(m) * (v.leftCols(m).transpose() * w);

    ritz.compute(t.topLeftCorner(m, m));
    if (ritz.info() != Eigen::Success) throw NumericalAbort("Rayleigh-Ritz eigensolver failed");

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(p).template triangularView<Eigen::Upper>();
    if (m >= k) {
      worst = 0.0;
      for (int i = 0; i < k; ++i) {
        worst = std::max(worst, (r * ritz.eigenvectors().col(i).tail(p)).norm());
      }
      if (worst <= target || m == n) break;
    }
    if (m + p <= capacity) {
      v.middleCols(m, p) = orthonormalize_against(v.leftCols(m), std::move(w));
      m += p;
      continue;
    }
    if (++restarts > opts.max_restarts) {
      throw NumericalAbort("Lanczos did not converge after " + std::to_string(opts.max_restarts) +
                           " restarts (residual " + std::to_string(worst) + ")");
    }
    // H Y = Y theta + w S_tail for the kept Ritz vectors Y = V S.
    const Eigen::MatrixXd s = ritz.eigenvectors().leftCols(keep);
    const Eigen::MatrixXd y = v.leftCols(m) * s;
    v.leftCols(keep) = y;
    Eigen::MatrixXd q = orthonormalize_against(v.leftCols(keep), w);
    const Eigen::MatrixXd coupling = (q.transpose() * w) * s.bottomRows(p);
    v.middleCols(keep, p) = q;
    t.setZero();
    t.topLeftCorner(keep, keep).diagonal() = ritz.eigenvalues().head(keep);
    t.block(keep, 0, p, keep) = coupling;
    t.block(0, keep, keep, p) = coupling.transpose();
    m = keep + p;
  }

  EdSolution sol{basis, ritz.eigenvalues().head(k), v.leftCols(m) * ritz.eigenvectors().leftCols(k)};
  for (int i = 0; i < k; ++i) {
    sol.eigenvectors.col(i).normalize();
    fix_sign(sol.eigenvectors.col(i));
  }
  return sol;
}

EdSolution ed_solve(const HamiltonianModel& model, const SectorBasis& basis, int k, const LanczosOptions& opts) {
  model.validate();
  if (basis.size() > kMaxOracleDimension) throw std::length_error("basis exceeds the oracle dimension guard");
  const SparseMatrix h = build_sector_matrix(model, basis);
  if (basis.size() <= kDenseSolveDimension) return ed_solve_dense(h, basis, k);
  return ed_solve_lanczos(h, basis, k, opts);
}

double max_residual(const SparseMatrix& h, const EdSolution& sol) {
  double worst = 0.0;
  for (Index i = 0; i < sol.eigenvalues.size(); ++i) {
    const Eigen::VectorXd u = sol.eigenvectors.col(i);
    worst = std::max(worst, (h * u - sol.eigenvalues(i) * u).norm());
  }
  return worst;
}

int ground_multiplicity(const EdSolution& sol, double tol) {
  int count = 0;
  for (Index i = 0; i < sol.eigenvalues.size(); ++i) {
    if (sol.eigenvalues(i) - sol.eigenvalues(0) <= tol) ++count;
  }
  return count;
}

double fidelity(const Eigen::VectorXd& v, const EdSolution& sol, double degenerate_tol) {
  if (v.size() != sol.basis.size() || sol.eigenvectors.rows() != v.size()) {
    throw std::invalid_argument("vector and ED solution dimensions differ");
  }
  const double norm2 = v.squaredNorm();
  if (!(norm2 > 0.0)) throw std::invalid_argument("fidelity of a zero vector");
  double f = 0.0;
  for (int i = 0; i < ground_multiplicity(sol, degenerate_tol); ++i) {
    const double o = sol.eigenvectors.col(i).dot(v);
    f += o * o;
  }
  return std::clamp(f / norm2, 0.0, 1.0);
}

Eigen::VectorXd apply(const ConnectionGenerator& op, const SectorBasis& basis, const Eigen::VectorXd& v) {
  if (v.size() != basis.size()) throw std::invalid_argument("vector and basis dimensions differ");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  ConnectionSet row;
  for (Index s = 0; s < basis.size(); ++s) {
    if (v(s) == 0.0) continue;
    op(basis.state(s), row);
    for (const auto& e : row.entries()) {
      if (e.amplitude == 0.0) continue;
      const auto idx = basis.index_of(e.target);
      if (!idx) throw std::invalid_argument("operator leaves the basis sector");
      out(*idx) += e.amplitude * v(s);
    }
  }
  return out;
}

double exact_expectation(const Eigen::VectorXd& v, const SectorBasis& basis, const ConnectionGenerator& op) {
  if (v.size() != basis.size()) throw std::invalid_argument("vector and basis dimensions differ");
  const double norm2 = v.squaredNorm();
  if (!(norm2 > 0.0)) throw std::invalid_argument("expectation in a zero vector");
  // Targets outside the basis carry zero amplitude in v and drop out.
  double sum = 0.0;
  ConnectionSet row;
  for (Index s = 0; s < basis.size(); ++s) {
    if (v(s) == 0.0) continue;
    op(basis.state(s), row);
    double acc = 0.0;
    for (const auto& e : row.entries()) {
      if (e.amplitude == 0.0) continue;
      if (const auto idx = basis.index_of(e.target)) acc += e.amplitude * v(*idx);
    }
    sum += v(s) * acc;
  }
  return sum / norm2;
}

double rayleigh_quotient(const SparseMatrix& h, const Eigen::VectorXd& v) {
  if (v.size() != h.rows()) throw std::invalid_argument("vector and matrix dimensions differ");
  return v.dot(h * v) / v.squaredNorm();
}

}  // namespace kanvmc
