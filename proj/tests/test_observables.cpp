#include <doctest.h>

#include <numbers>
#include <sstream>

#include "kanvmc/observables.hpp"
#include "kanvmc/sampler.hpp"
#include "oracles.hpp"

using namespace kanvmc;

namespace {

Eigen::Matrix2d sz() { return 0.5 * oracle::pauli_z(); }
Eigen::Matrix2d sx() { return 0.5 * oracle::pauli_x(); }
Eigen::Matrix2d d_op() { return oracle::raise() - oracle::lower(); }

// Dense (1/L) sum_l S^a_l S^a_{l+r}; S^y S^y = -(1/4) D D with D = S+ - S- in Pauli units.
Eigen::MatrixXd corr_dense(int L, char axis, int r) {
  const int d = 1 << L;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int l = 0; l < L; ++l) {
    const int j = (l + r) % L;
    if (axis == 'z') out += oracle::site_product(L, {{l, sz()}, {j, sz()}});
    if (axis == 'x') out += oracle::site_product(L, {{l, sx()}, {j, sx()}});
    if (axis == 'y') out -= 0.25 * oracle::site_product(L, {{l, d_op()}, {j, d_op()}});
  }
  return out / L;
}

double quad(const Eigen::MatrixXd& op, const Eigen::VectorXd& v) { return v.dot(op * v) / v.squaredNorm(); }

double four_point(int L, int r, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << L); ++x) {
    auto z = [&](int i) { return ((x >> ((i % L + L) % L)) & 1U) ? 0.5 : -0.5; };
    double f = 0.0;
    for (int l = 0; l < L; ++l) f += z(l) * z(l + 1) * z(l + r) * z(l + r + 1);
    s += v(static_cast<Index>(x)) * v(static_cast<Index>(x)) * f / L;
  }
  return s / v.squaredNorm();
}

double sk_brute(int L, double k, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) s += std::cos(k * (i - j)) * quad(oracle::site_product(L, {{i, sz()}, {j, sz()}}), v);
  }
  return s / L;
}

Eigen::VectorXd random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

Eigen::VectorXd basis_vector(const SectorBasis& b, const SpinConfig& c) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(b.size());
  v(*b.index_of(c)) = 1.0;
  return v;
}

}  // namespace

TEST_SUITE("observables") {
  TEST_CASE("exact estimators equal brute-force operator sums") {
    const int L = 8;
    const SectorBasis full = enumerate_sector(L, false);
    const Eigen::VectorXd v = random_vector(full.size(), 3);
    const ExactSource src{full, v};
    for (int r = 0; r < L; ++r) {
      const double xx = quad(corr_dense(L, 'x', r), v), yy = quad(corr_dense(L, 'y', r), v),
                   zz = quad(corr_dense(L, 'z', r), v);
      CHECK(std::abs(spin_spin(src, Axis::X, r).value - xx) < 1e-12);
      CHECK(std::abs(spin_spin(src, Axis::Y, r).value - yy) < 1e-12);
      CHECK(std::abs(spin_spin(src, Axis::Z, r).value - zz) < 1e-12);
      CHECK(std::abs(isotropic(src, r).value - (xx + yy + zz) / 3.0) < 1e-12);
      CHECK(std::abs(dimer_dimer(src, r).value - (four_point(L, r, v) - std::pow(quad(corr_dense(L, 'z', 1), v), 2))) <
            1e-12);
    }
    for (int m = 0; m < L; ++m) {
      const double k = momentum(L, m);
      CHECK(std::abs(structure_factor(src, k).value - sk_brute(L, k, v)) < 1e-12);
    }
    double m2 = 0.0;
    for (int i = 0; i < L; ++i) m2 += quad(oracle::site_product(L, {{i, oracle::pauli_z()}, {(i + 4) % L, oracle::pauli_z()}}), v);
    CHECK(std::abs(tfim_m2(src).value - m2 / L) < 1e-12);
  }

  TEST_CASE("Marshall frame correction") {
    const int L = 8;
    const SectorBasis full = enumerate_sector(L, false);
    const Eigen::VectorXd v = random_vector(full.size(), 5);
    const Eigen::VectorXd rotated = oracle::marshall(L) * v;
    for (int r = 0; r < L; ++r) {
      for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
        CHECK(std::abs(spin_spin(ExactSource{full, v}, a, r).value -
                       spin_spin(ExactSource{full, rotated, true}, a, r).value) < 1e-12);
      }
    }
  }

  TEST_CASE("product-state values") {
    const int L = 8;
    const SectorBasis sector = enumerate_sector(L, true);
    const Eigen::VectorXd neel = basis_vector(sector, SpinConfig::parse("udududud"));
    const ExactSource src{sector, neel};
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) CHECK(spin_spin(src, a, 0).value == 0.25);
    CHECK(isotropic(src, 0).value == doctest::Approx(0.25));
    CHECK(spin_spin(src, Axis::Z, 1).value == -0.25);
    CHECK(structure_factor(src, std::numbers::pi).value == doctest::Approx(L / 4.0));
    for (int r = 0; r < L; ++r) CHECK(std::abs(dimer_dimer(src, r).value) < 1e-15);
    CHECK(relative_error(-7.5, -7.5) == 0.0);
    CHECK(relative_error(-7.4, -7.5) == doctest::Approx(0.1 / 7.5));
    CHECK_THROWS(relative_error(1.0, 0.0));
  }

  TEST_CASE("ground-state properties") {
    const int L = 10;
    const SectorBasis sector = enumerate_sector(L, true);
    const auto sol = ed_solve(HamiltonianModel::j1j2(L, 1.0, 0.0, true), sector, 1);
    const ExactSource src{sector, sol.eigenvectors.col(0), true};
    for (int r = 0; r < L; ++r) {
      CHECK(std::abs(spin_spin(src, Axis::X, r).value - spin_spin(src, Axis::Z, r).value) < 1e-8);
      CHECK(std::abs(spin_spin(src, Axis::Y, r).value - spin_spin(src, Axis::Z, r).value) < 1e-8);
    }
    CHECK(std::abs(structure_factor(src, 0.0).value) < 1e-12);
    for (int m = 0; m < L; ++m) CHECK(structure_factor(src, momentum(L, m)).value >= 0.0);
    CHECK_THROWS(structure_factor(src, 0.1));
    CHECK_THROWS(spin_spin(src, Axis::Z, L));
    CHECK_THROWS(dimer_dimer(src, -1));
  }

  TEST_CASE("TFIM m2 limits") {
    const int L = 8;
    const SectorBasis full = enumerate_sector(L, false);
    const auto sol = ed_solve(HamiltonianModel::tfim(L, 1.0, 0.0), full, 2);
    for (int i = 0; i < 2; ++i) CHECK(tfim_m2(ExactSource{full, sol.eigenvectors.col(i)}).value == doctest::Approx(1.0));
    CHECK(std::abs(tfim_m2(ExactSource{full, Eigen::VectorXd::Ones(full.size())}).value) < 1e-14);
    CHECK_THROWS(m2_operator(7));
  }

  TEST_CASE("reflection-symmetric models have C(r) = C(L - r)") {
    const int L = 8;
    const SectorBasis sector = enumerate_sector(L, true);
    const auto m = Model::create(AnsatzSpec::sinekan(L, {6, 5}, 3, true, 12));
    const Eigen::VectorXd v = model_vector(m, sector);
    const ExactSource src{sector, v, true};
    for (int r = 1; r < L; ++r) {
      CHECK(std::abs(isotropic(src, r).value - isotropic(src, L - r).value) < 1e-14);
    }
  }

  TEST_CASE("sampled estimators converge to exact values") {
    const int L = 8;
    const SectorBasis sector = enumerate_sector(L, true);
    const auto sol = ed_solve(HamiltonianModel::j1j2(L, 1.0, 0.0, true), sector, 1);
    const TableWavefunction table(sector, sol.eigenvectors.col(0));
    SamplerConfig cfg{.n_chains = 100, .n_samples = 100000, .warmup_sweeps = 50, .move = MoveKind::PairExchange};
    auto e = init_chains(cfg, L, table);
    warmup(e, table, cfg.warmup_sweeps);
    const auto samples = draw_samples(e, table, cfg).configs;
    const ExactSource exact{sector, sol.eigenvectors.col(0), true};
    const SampledSource<TableWavefunction> mc{table, samples, true, SectorFilter{0}};
    auto close = [](ObservableValue s, ObservableValue x) {
      INFO("sampled ", s.value, " +- ", s.std_error, " exact ", x.value);
      CHECK(std::abs(s.value - x.value) <= 3.0 * s.std_error + 1e-12);
    };
    for (int r : {1, 2, 4}) {
      for (Axis a : {Axis::X, Axis::Y, Axis::Z}) close(spin_spin(mc, a, r), spin_spin(exact, a, r));
      close(isotropic(mc, r), isotropic(exact, r));
      close(dimer_dimer(mc, r), dimer_dimer(exact, r));
    }
    close(structure_factor(mc, std::numbers::pi), structure_factor(exact, std::numbers::pi));
    close(structure_factor(mc, momentum(L, 3)), structure_factor(exact, momentum(L, 3)));
  }

  TEST_CASE("series and CSV") {
    const SectorBasis sector = enumerate_sector(6, true);
    const Eigen::VectorXd v = basis_vector(sector, SpinConfig::parse("uduudd"));
    const ExactSource src{sector, v};
    auto s = series(src, ObservableKind::SpinSpin, Axis::Z);
    s.mode = "exact";
    s.model_tag = "ED";
    CHECK(s.values.size() == 6);
    CHECK(s.name() == "spin_spin_zz");
    auto k = series(src, ObservableKind::StructureFactor);
    CHECK(k.abscissa[3] == doctest::Approx(std::numbers::pi));
    auto m = series(src, ObservableKind::M2);
    CHECK(m.abscissa.size() == 1);
    CHECK(m.abscissa[0] == 3);
    std::ostringstream os;
    write_series_csv(os, {s});
    const std::string text = os.str();
    CHECK(text.rfind("abscissa,value,stderr,mode,observable,model_tag\n", 0) == 0);
    INFO(text);
    CHECK(text.find("0,0.25,0,exact,spin_spin_zz,ED\n") != std::string::npos);
    CHECK(parse_observable_kind("dimer_dimer") == ObservableKind::DimerDimer);
    CHECK_THROWS_AS(parse_observable_kind("magnetisation"), ConfigError);
  }
}
