#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "kanvmc/ansatz.hpp"
#include "kanvmc/hamiltonian.hpp"
#include "kanvmc/spin.hpp"

using namespace kanvmc;

namespace {

// Hand-rolled generators over a seeded engine; each case logs its draw so a
// failure can be replayed.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  bool coin() { return (rng() & 1U) != 0; }

  SpinConfig config(int sites) {
    SpinConfig c(sites);
    for (int i = 0; i < sites; ++i) c.set(i, coin());
    return c;
  }

  HamiltonianModel hamiltonian(int sites) {
    switch (integer(0, 2)) {
      case 0: return HamiltonianModel::tfim(sites, real(0.1, 2.0), real(0.0, 2.0));
      case 1: return HamiltonianModel::ahm(sites, real(-1.0, 1.0), coin());
      default: return HamiltonianModel::j1j2(sites, real(0.1, 2.0), real(0.0, 1.0), coin());
    }
  }

  HamiltonianModel bipartite(int sites) {
    return coin() ? HamiltonianModel::ahm(sites, real(-1.0, 1.0), false)
                  : HamiltonianModel::j1j2(sites, real(0.1, 2.0), real(0.0, 1.0), false);
  }
};

std::string describe(const HamiltonianModel& h) {
  return to_string(h.kind) + " L=" + std::to_string(h.sites) + " J=" + std::to_string(h.coupling) +
         " h=" + std::to_string(h.field) + " gamma=" + std::to_string(h.gamma) + " j1=" + std::to_string(h.j1) +
         " j2=" + std::to_string(h.j2) + " msr=" + std::to_string(h.msr);
}

int differing_sites(const SpinConfig& a, const SpinConfig& b) {
  int n = 0;
  for (int i = 0; i < a.sites(); ++i) n += a.up(i) != b.up(i);
  return n;
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("Hamiltonians are real symmetric on the full space") {
    Gen g(101);
    for (int trial = 0; trial < 40; ++trial) {
      const HamiltonianModel h = g.hamiltonian(g.integer(3, 10));
      CAPTURE(describe(h));
      const SparseMatrix m = build_sector_matrix(h, enumerate_sector(h.sites, false));
      const SparseMatrix t = m.transpose();
      CHECK((m - t).norm() <= 1e-14 * (1.0 + m.norm()));
    }
  }

  TEST_CASE("sector restriction of conserving models is symmetric and closed") {
    Gen g(102);
    for (int trial = 0; trial < 20; ++trial) {
      const HamiltonianModel h = g.bipartite(2 * g.integer(2, 5));
      CAPTURE(describe(h));
      const SparseMatrix m = build_sector_matrix(h, enumerate_sector(h.sites, true));
      CHECK((m - SparseMatrix(m.transpose())).norm() <= 1e-14 * (1.0 + m.norm()));
    }
  }

  TEST_CASE("Marshall rotation leaves the spectrum unchanged") {
    Gen g(103);
    for (int trial = 0; trial < 16; ++trial) {
      HamiltonianModel h = g.bipartite(2 * g.integer(2, 5));
      const bool sector = g.coin();
      CAPTURE(describe(h));
      CAPTURE(sector);
      const SectorBasis basis = enumerate_sector(h.sites, sector);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> plain(build_dense_sector_matrix(h, basis),
                                                           Eigen::EigenvaluesOnly);
      h.msr = true;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rotated(build_dense_sector_matrix(h, basis),
                                                             Eigen::EigenvaluesOnly);
      CHECK((plain.eigenvalues() - rotated.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("encode and decode are inverse") {
    for (int sites = 2; sites <= 10; ++sites) {
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << sites); ++bits) {
        REQUIRE(encode(decode(sites, bits)) == bits);
      }
    }
    Gen g(104);
    for (int trial = 0; trial < 500; ++trial) {
      const int sites = g.integer(2, 64);
      const SpinConfig c = g.config(sites);
      CAPTURE(to_string(c));
      CHECK(decode(sites, encode(c)) == c);
    }
  }

  TEST_CASE("flip and exchange touch only their sites") {
    Gen g(105);
    for (int trial = 0; trial < 500; ++trial) {
      const int sites = g.integer(2, kMaxSites);
      SpinConfig c = g.config(sites);
      const int i = g.integer(0, sites - 1);
      int j = g.integer(0, sites - 2);
      if (j >= i) ++j;
      // exchange is defined on antiparallel pairs
      c.set(j, !c.up(i));
      CAPTURE(sites);
      CAPTURE(i);
      CAPTURE(j);

      const SpinConfig f = flip(c, i);
      CHECK(differing_sites(c, f) == 1);
      CHECK(f.up(i) != c.up(i));
      CHECK(flip(f, i) == c);
      CHECK(std::abs(magnetization(f) - magnetization(c)) == 2);

      const SpinConfig x = exchange(c, i, j);
      CHECK(x.up(i) == c.up(j));
      CHECK(x.up(j) == c.up(i));
      CHECK(differing_sites(c, x) == 2);
      CHECK(magnetization(x) == magnetization(c));
      CHECK(exchange(x, i, j) == c);

      CHECK(reflect(reflect(c)) == c);
      CHECK(magnetization(reflect(c)) == magnetization(c));
    }
  }

  TEST_CASE("connections are local and respect conservation laws") {
    Gen g(106);
    for (int trial = 0; trial < 200; ++trial) {
      const HamiltonianModel h = g.hamiltonian(g.integer(3, 40));
      const SpinConfig c = g.config(h.sites);
      CAPTURE(describe(h));
      CAPTURE(to_string(c));
      const ConnectionSet set = connections(h, c);
      const auto& entries = set.entries();
      REQUIRE(!entries.empty());
      CHECK(entries[0].target == c);
      for (std::size_t k = 1; k < entries.size(); ++k) {
        const int d = differing_sites(c, entries[k].target);
        if (h.kind == ModelKind::Tfim) {
          CHECK(d == 1);
        } else {
          CHECK(d == 2);
          CHECK(magnetization(entries[k].target) == magnetization(c));
        }
      }
    }
  }

  TEST_CASE("symmetrised models are reflection invariant") {
    Gen g(107);
    for (int trial = 0; trial < 6; ++trial) {
      const int sites = g.integer(3, 24);
      const bool mlp = g.coin();
      const AnsatzSpec spec = mlp ? AnsatzSpec::mlp(sites, {6, 5}, true, g.rng())
                                  : AnsatzSpec::sinekan(sites, {6, 5}, g.integer(2, 6), true, g.rng());
      const Model m = Model::create(spec);
      CAPTURE(spec.tag());
      CAPTURE(sites);
      for (int k = 0; k < 20; ++k) {
        const SpinConfig c = g.config(sites);
        CHECK(m.log_psi(c) == m.log_psi(reflect(c)));
      }
    }
  }
}
