#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "kanvmc/exact.hpp"
#include "kanvmc/hamiltonian.hpp"
#include "oracles.hpp"

using namespace kanvmc;

namespace {

Eigen::MatrixXd full_matrix(const HamiltonianModel& m) {
  return Eigen::MatrixXd(build_sector_matrix(m, enumerate_sector(m.sites, false)));
}

Eigen::VectorXd spectrum(const Eigen::MatrixXd& h) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_SUITE("hamiltonian") {
  TEST_CASE("matrices match Kronecker-product oracles") {
    const int L = 6;
    CHECK((full_matrix(HamiltonianModel::tfim(L, 1.0, 0.7)) - oracle::tfim(L, 1.0, 0.7)).cwiseAbs().maxCoeff() < 1e-14);
    for (bool msr : {false, true}) {
      CHECK((full_matrix(HamiltonianModel::j1j2(L, 1.0, 0.35, msr)) - oracle::j1j2(L, 1.0, 0.35, msr))
                .cwiseAbs()
                .maxCoeff() < 1e-14);
      CHECK((full_matrix(HamiltonianModel::ahm(L, -0.4, msr)) - oracle::ahm(L, -0.4, msr)).cwiseAbs().maxCoeff() <
            1e-14);
    }
    auto m = HamiltonianModel::ahm(L, 0.5, true);
    const BiasAxis axes[] = {BiasAxis::StaggeredZ, BiasAxis::UniformZ, BiasAxis::UniformX};
    for (int kind = 1; kind <= 3; ++kind) {
      const auto biased = with_bias(m, 0.3, axes[kind - 1]);
      CHECK((full_matrix(biased) - oracle::ahm(L, 0.5, true, kind, 0.3)).cwiseAbs().maxCoeff() < 1e-14);
    }
  }

  TEST_CASE("sector matrices are the restriction of the full matrix") {
    const int L = 8;
    const auto m = HamiltonianModel::j1j2(L, 1.0, 0.5, true);
    const auto idx = oracle::sector_indices(L);
    const Eigen::MatrixXd ref = oracle::restrict(oracle::j1j2(L, 1.0, 0.5, true), idx);
    const Eigen::MatrixXd got = build_sector_matrix(m, enumerate_sector(L, true));
    CHECK((got - ref).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((got - got.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("connection set structure") {
    const auto c = SpinConfig::parse("uuddudud");
    for (const auto& m : {HamiltonianModel::tfim(8, 1.0, 0.5), HamiltonianModel::ahm(8, 0.3, true),
                          HamiltonianModel::j1j2(8, 1.0, 0.4, false)}) {
      const auto set = connections(m, c);
      CHECK(set.entries().front().target == c);
      CHECK(set.size() <= 1 + 2 * 8);
      int diag = 0;
      for (const auto& e : set.entries()) diag += e.target == c;
      CHECK(diag == 1);
    }
  }

  TEST_CASE("TFIM aligned state without field") {
    const auto set = connections(HamiltonianModel::tfim(4, 1.0, 0.0), SpinConfig::parse("uuuu"));
    CHECK(set.diagonal() == -4.0);
    for (std::size_t k = 1; k < set.size(); ++k) CHECK(set.entries()[k].amplitude == 0.0);
  }

  TEST_CASE("Heisenberg bond sign under the Marshall rotation") {
    const auto c = SpinConfig::parse("uddd");
    const auto target = exchange(c, 0, 1);
    for (bool msr : {true, false}) {
      const auto set = connections(HamiltonianModel::j1j2(4, 1.0, 0.0, msr), c);
      double amp = 0.0;
      for (const auto& e : set.entries()) {
        if (e.target == target) amp += e.amplitude;
      }
      CHECK(amp == doctest::Approx(msr ? -0.5 : 0.5));
    }
  }

  TEST_CASE("AHM at gamma 0 equals the J1-J2 chain at J2 0") {
    const auto a = HamiltonianModel::ahm(6, 0.0, true);
    const auto b = HamiltonianModel::j1j2(6, 1.0, 0.0, true);
    for (std::uint64_t s = 0; s < 64; ++s) {
      const auto c = decode(6, s);
      const auto x = connections(a, c);
      const auto y = connections(b, c);
      REQUIRE(x.size() == y.size());
      for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(x.entries()[k].target == y.entries()[k].target);
        CHECK(x.entries()[k].amplitude == y.entries()[k].amplitude);
      }
    }
  }

  TEST_CASE("small spectra") {
    const auto ev = spectrum(full_matrix(HamiltonianModel::j1j2(4, 1.0, 0.0, false)));
    CHECK(ev(0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(spectrum(oracle::j1j2(4, 1.0, 0.0, false))(0) == doctest::Approx(-2.0).epsilon(1e-12));
    const auto on = spectrum(full_matrix(HamiltonianModel::j1j2(8, 1.0, 0.3, true)));
    const auto off = spectrum(full_matrix(HamiltonianModel::j1j2(8, 1.0, 0.3, false)));
    CHECK((on - off).cwiseAbs().maxCoeff() < 1e-11);
    const auto ising = spectrum(full_matrix(HamiltonianModel::tfim(4, 1.0, 0.0)));
    CHECK(ising(0) == doctest::Approx(-4.0));
    CHECK(ising(1) == doctest::Approx(-4.0));
  }

  TEST_CASE("Marshall sign") {
    CHECK(msr_sign(SpinConfig::parse("udud")) == 1);
    CHECK(msr_sign(SpinConfig::parse("uudd")) == -1);
    CHECK(msr_sign(SpinConfig::parse("dddd")) == 1);
  }

  TEST_CASE("bias selection") {
    CHECK(with_bias(HamiltonianModel::ahm(8, 0.5, true), 0.7).bias.axis == BiasAxis::StaggeredZ);
    CHECK(with_bias(HamiltonianModel::ahm(8, 0.9, true), 0.7).bias.axis == BiasAxis::UniformX);
    const auto bare = HamiltonianModel::ahm(6, 0.8, true);
    const auto zero = with_bias(bare, 0.0);
    CHECK(zero.bias.axis == BiasAxis::None);
    CHECK((spectrum(full_matrix(zero)) - spectrum(full_matrix(bare))).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS(with_bias(HamiltonianModel::j1j2(8, 1.0, 0.0, true), 0.1));
    CHECK_THROWS(with_bias(bare, -0.1));
  }

  TEST_CASE("validation") {
    CHECK_THROWS(HamiltonianModel::ahm(8, 1.5, true).validate());
    CHECK_THROWS(HamiltonianModel::j1j2(8, 0.0, 0.2, true).validate());
    CHECK_THROWS(HamiltonianModel::j1j2(8, 1.0, -0.2, true).validate());
    CHECK_NOTHROW(HamiltonianModel::tfim(8, 1.0, 1.0).validate());
    CHECK(HamiltonianModel::j1j2(8, 1.0, 0.2, true).conserves_magnetization());
    CHECK_FALSE(HamiltonianModel::tfim(8, 1.0, 1.0).conserves_magnetization());
  }

  TEST_CASE("non-closed sector is rejected") {
    CHECK_THROWS(build_sector_matrix(HamiltonianModel::tfim(6, 1.0, 1.0), enumerate_sector(6, true)));
  }
}
