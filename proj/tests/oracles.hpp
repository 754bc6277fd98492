#pragma once

// Reference implementations used only as test oracles. They share no code
// with the library beyond SpinConfig plumbing.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Single-site matrices in the (down, up) = (0, 1) basis.
inline Eigen::Matrix2d pauli_z() { return (Eigen::Matrix2d() << -1, 0, 0, 1).finished(); }
inline Eigen::Matrix2d pauli_x() { return (Eigen::Matrix2d() << 0, 1, 1, 0).finished(); }
inline Eigen::Matrix2d raise() { return (Eigen::Matrix2d() << 0, 0, 1, 0).finished(); }
inline Eigen::Matrix2d lower() { return (Eigen::Matrix2d() << 0, 1, 0, 0).finished(); }

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

// Operator product placing ops[i] on site i; site i is bit i of the state
// index, so the Kronecker order runs from site L-1 down to site 0.
inline Eigen::MatrixXd site_product(int sites, const std::vector<std::pair<int, Eigen::Matrix2d>>& ops) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
  for (int s = sites - 1; s >= 0; --s) {
    Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
    for (const auto& [site, op] : ops) {
      if (site == s) m = op * m;
    }
    out = kron(out, m);
  }
  return out;
}

inline Eigen::MatrixXd zz(int L, int i, int j) { return site_product(L, {{i, pauli_z()}, {j, pauli_z()}}); }
inline Eigen::MatrixXd flipflop(int L, int i, int j) {
  return site_product(L, {{i, raise()}, {j, lower()}}) + site_product(L, {{i, lower()}, {j, raise()}});
}

// Diagonal Marshall rotation (-1)^{number of up spins on even sites}.
inline Eigen::MatrixXd marshall(int L) {
  const Eigen::Matrix2d u = (Eigen::Matrix2d() << 1, 0, 0, -1).finished();
  std::vector<std::pair<int, Eigen::Matrix2d>> ops;
  for (int i = 0; i < L; i += 2) ops.push_back({i, u});
  return site_product(L, ops);
}

inline Eigen::MatrixXd tfim(int L, double J, double h) {
  const int d = 1 << L;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < L; ++i) {
    H -= J * zz(L, i, (i + 1) % L);
    H -= h * site_product(L, {{i, pauli_x()}});
  }
  return H;
}

// S.S = Sz Sz + (S+S- + S-S+)/2 with S = sigma/2.
inline Eigen::MatrixXd j1j2(int L, double j1, double j2, bool msr) {
  const int d = 1 << L;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < L; ++i) {
    H += j1 * (0.25 * zz(L, i, (i + 1) % L) + 0.5 * flipflop(L, i, (i + 1) % L));
    H += j2 * (0.25 * zz(L, i, (i + 2) % L) + 0.5 * flipflop(L, i, (i + 2) % L));
  }
  if (msr) {
    const Eigen::MatrixXd U = marshall(L);
    H = U * H * U;
  }
  return H;
}

// H = sum (1-gamma)(SxSx + SySy) + (1+gamma) SzSz, plus an optional field
// written in the working frame (after the Marshall rotation).
inline Eigen::MatrixXd ahm(int L, double gamma, bool msr, int bias_kind = 0, double h = 0.0) {
  const int d = 1 << L;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < L; ++i) {
    H += (1.0 + gamma) * 0.25 * zz(L, i, (i + 1) % L) + (1.0 - gamma) * 0.5 * flipflop(L, i, (i + 1) % L);
  }
  if (msr) {
    const Eigen::MatrixXd U = marshall(L);
    H = U * H * U;
  }
  for (int i = 0; i < L; ++i) {
    const Eigen::MatrixXd sz = 0.5 * site_product(L, {{i, pauli_z()}});
    const Eigen::MatrixXd sx = 0.5 * site_product(L, {{i, pauli_x()}});
    if (bias_kind == 1) H -= h * ((i % 2 == 0) ? 1.0 : -1.0) * sz;  // staggered z
    if (bias_kind == 2) H -= h * sz;                                  // uniform z
    if (bias_kind == 3) H -= h * sx;                                  // uniform x
  }
  return H;
}

// Indices (integer encodings) with exactly L/2 up spins, ascending.
inline std::vector<int> sector_indices(int L) {
  std::vector<int> out;
  for (int s = 0; s < (1 << L); ++s) {
    if (__builtin_popcount(static_cast<unsigned>(s)) == L / 2) out.push_back(s);
  }
  return out;
}

inline Eigen::MatrixXd restrict(const Eigen::MatrixXd& H, const std::vector<int>& idx) {
  Eigen::MatrixXd out(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = H(idx[a], idx[b]);
  }
  return out;
}

// Scalar-loop SineKAN layer.
inline std::vector<double> sinekan_layer(const std::vector<double>& x, int M, int N, const double* A, const double* w,
                                         const double* b, const double* delta) {
  const int I = static_cast<int>(x.size());
  std::vector<double> y(M);
  for (int m = 0; m < M; ++m) {
    double s = b[m];
    for (int n = 0; n < N; ++n) {
      for (int l = 0; l < I; ++l) {
        const double phi = M_PI * n / N + M_PI * l / I + delta[n * I + l];
        s += A[(m * N + n) * I + l] * std::sin(w[n * I + l] * x[l] + phi);
      }
    }
    y[m] = s;
  }
  return y;
}

inline double rbm(const std::vector<double>& s, const double* a, const double* b, const double* W, int hidden) {
  const int L = static_cast<int>(s.size());
  double y = 0.0;
  for (int i = 0; i < L; ++i) y += a[i] * s[i];
  for (int j = 0; j < hidden; ++j) {
    double t = b[j];
    for (int i = 0; i < L; ++i) t += W[j * L + i] * s[i];
    y += std::log(2.0 * std::cosh(t));
  }
  return y;
}

inline std::uint64_t binomial(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

}  // namespace oracle
