#include <doctest.h>

#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "kanvmc/ansatz.hpp"
#include "oracles.hpp"

using namespace kanvmc;

namespace {

std::vector<double> sigma_vector(const SpinConfig& c) {
  std::vector<double> s;
  for (int i = 0; i < c.sites(); ++i) s.push_back(c.sigma(i));
  return s;
}

// Naive rectifier network with the library's parameter layout.
double naive_mlp(const Model& m, const SpinConfig& c) {
  const auto& p = m.parameters();
  std::vector<double> x = sigma_vector(c);
  std::vector<int> dims = m.spec().hidden;
  dims.push_back(1);
  Index pos = 0;
  for (std::size_t layer = 0; layer < dims.size(); ++layer) {
    const int in = static_cast<int>(x.size()), out = dims[layer];
    std::vector<double> y(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
      double s = p(pos + Index(in) * out + o);
      for (int i = 0; i < in; ++i) s += p(pos + Index(o) * in + i) * x[static_cast<std::size_t>(i)];
      y[static_cast<std::size_t>(o)] = layer + 1 < dims.size() ? std::max(0.0, s) : s;
    }
    pos += Index(in) * out + out;
    x = y;
  }
  return x[0];
}

double naive_sinekan(const Model& m, const SpinConfig& c) {
  const auto& net = std::get<SineKanNetwork<double>>(m.network());
  const double* p = m.parameters().data();
  std::vector<double> x = sigma_vector(c);
  for (const auto& layer : net.layers()) {
    const int M = static_cast<int>(layer.out_dim()), N = static_cast<int>(layer.grid()),
              I = static_cast<int>(layer.in_dim());
    const double* A = p + layer.offset();
    const double* w = A + M * N * I;
    const double* b = w + N * I;
    x = oracle::sinekan_layer(x, M, N, A, w, b, layer.delta().data());
  }
  return x[0];
}

}  // namespace

TEST_SUITE("ansatz") {
  TEST_CASE("parameter counts") {
    CHECK(param_count(AnsatzSpec::sinekan(100, {64, 64}, 8)) == 86433);
    CHECK(param_count(AnsatzSpec::sinekan(64, {64, 64}, 7)) == 59265);
    CHECK(param_count(AnsatzSpec::sinekan(32, {64, 64}, 8)) == 51073);
    CHECK(param_count(AnsatzSpec::mlp(100, {256, 256})) == 91905);
    CHECK(param_count(AnsatzSpec::rbm(100, 128)) == 1292900);
    // per-layer sums, independent of the library formula
    CHECK(64 * 8 * 100 + 8 * 100 + 64 + 64 * 8 * 64 + 8 * 64 + 64 + 1 * 8 * 64 + 8 * 64 + 1 == 86433);
    const auto m = Model::create(AnsatzSpec::sinekan(12, {5, 4}, 3));
    CHECK(m.param_count() == param_count(m.spec()));
    CHECK(m.frozen().size() == 3 * 12 + 3 * 5 + 3 * 4);
  }

  TEST_CASE("layer forward against a scalar loop") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Index I = 4, M = 3, N = 2;
    VectorX<double> delta(N * I);
    for (Index k = 0; k < delta.size(); ++k) delta(k) = 0.01 * (u(rng) + 1.0) / 2.0;
    SineKanLayer<double> layer(I, M, N, 0, delta);
    std::vector<double> params(static_cast<std::size_t>(layer.param_count()));
    for (auto& v : params) v = u(rng);
    VectorX<double> x(I);
    std::vector<double> xs;
    for (Index l = 0; l < I; ++l) {
      x(l) = u(rng);
      xs.push_back(x(l));
    }
    const auto got = layer_forward(layer, params.data(), x);
    const auto ref = oracle::sinekan_layer(xs, M, N, params.data(), params.data() + M * N * I,
                                           params.data() + M * N * I + N * I, delta.data());
    for (Index m = 0; m < M; ++m) CHECK(got(m) == doctest::Approx(ref[static_cast<std::size_t>(m)]).epsilon(1e-13));
  }

  TEST_CASE("degenerate layers") {
    SineKanLayer<double> layer(4, 3, 2, 0, VectorX<double>::Constant(8, 0.005));
    std::vector<double> params(static_cast<std::size_t>(layer.param_count()), 0.0);
    params[params.size() - 3] = 0.5;
    params[params.size() - 2] = -1.0;
    params[params.size() - 1] = 2.0;
    const auto y = layer_forward(layer, params.data(), VectorX<double>(VectorX<double>::Constant(4, 0.3)));
    CHECK(y(0) == 0.5);
    CHECK(y(1) == -1.0);
    CHECK(y(2) == 2.0);

    SineKanLayer<double> single(1, 2, 1, 0, VectorX<double>::Zero(1));
    std::vector<double> q = {3.0, -4.0, 0.0, 0.25, 0.75};
    const auto z = layer_forward(single, q.data(), VectorX<double>(VectorX<double>::Constant(1, 0.9)));
    CHECK(z(0) == 0.25);
    CHECK(z(1) == 0.75);
  }

  TEST_CASE("network evaluation matches naive forward passes") {
    const auto configs = gradcheck::random_configs(8, 20, 3);
    auto kan = Model::create(AnsatzSpec::sinekan(8, {6, 5}, 3, false, 11));
    gradcheck::perturb(kan, 0.1, 1);
    auto mlp = Model::create(AnsatzSpec::mlp(8, {16, 12}, false, 12));
    gradcheck::perturb(mlp, 0.1, 2);
    auto rbm = Model::create(AnsatzSpec::rbm(6, 3, 13));
    gradcheck::perturb(rbm, 0.3, 3);
    const auto rbm_configs = gradcheck::random_configs(6, 20, 4);
    for (const auto& c : configs) {
      CHECK(kan.log_psi(c) == doctest::Approx(naive_sinekan(kan, c)).epsilon(1e-12));
      CHECK(mlp.log_psi(c) == doctest::Approx(naive_mlp(mlp, c)).epsilon(1e-12));
    }
    const double* p = rbm.parameters().data();
    for (const auto& c : rbm_configs) {
      CHECK(rbm.log_psi(c) == doctest::Approx(oracle::rbm(sigma_vector(c), p, p + 6, p + 6 + 18, 18)).epsilon(1e-12));
    }
  }

  TEST_CASE("reflection symmetry is exact") {
    for (const auto& spec : {AnsatzSpec::sinekan(10, {8, 8}, 4, true, 5), AnsatzSpec::mlp(10, {16, 16}, true, 6)}) {
      auto m = Model::create(spec);
      gradcheck::perturb(m, 0.2, 9);
      const auto all = enumerate_sector(10, false).configs();
      std::vector<SpinConfig> mirrored;
      for (const auto& c : all) mirrored.push_back(reflect(c));
      const Eigen::VectorXd a = m.log_psi(std::span<const SpinConfig>(all));
      const Eigen::VectorXd b = m.log_psi(std::span<const SpinConfig>(mirrored));
      CHECK((a.array() == b.array()).all());
    }
    CHECK_THROWS(Model::create([] {
      auto s = AnsatzSpec::rbm(8, 2);
      s.reflected = true;
      return s;
    }()));
  }

  TEST_CASE("zero amplitudes give the final bias everywhere") {
    auto m = Model::create(AnsatzSpec::sinekan(6, {4, 3}, 2, false, 1));
    m.parameters().setZero();
    m.parameters()(m.param_count() - 1) = 0.75;
    const auto all = enumerate_sector(6, false).configs();
    const Eigen::VectorXd y = m.log_psi(std::span<const SpinConfig>(all));
    CHECK((y.array() == 0.75).all());
  }

  TEST_CASE("final bias derivative") {
    const auto c = SpinConfig::parse("uduudddu");
    for (bool reflected : {false, true}) {
      auto kan = Model::create(AnsatzSpec::sinekan(8, {6, 5}, 3, reflected, 2));
      CHECK(kan.grad_log_psi(c)(kan.param_count() - 1) == (reflected ? 2.0 : 1.0));
      auto mlp = Model::create(AnsatzSpec::mlp(8, {6, 5}, reflected, 2));
      CHECK(mlp.grad_log_psi(c)(mlp.param_count() - 1) == (reflected ? 2.0 : 1.0));
    }
  }

  TEST_CASE("gradients match finite differences") {
    const auto configs = gradcheck::random_configs(8, 3, 21);
    std::vector<AnsatzSpec> specs = {AnsatzSpec::sinekan(8, {6, 5}, 3, false, 31),
                                     AnsatzSpec::sinekan(8, {6, 5}, 3, true, 32),
                                     AnsatzSpec::mlp(8, {10, 7}, false, 33), AnsatzSpec::mlp(8, {10, 7}, true, 34),
                                     AnsatzSpec::rbm(8, 2, 35)};
    for (const auto& spec : specs) {
      auto m = Model::create(spec);
      gradcheck::perturb(m, 0.1, spec.seed);
      const auto r = gradcheck::check(m, configs);
      INFO(spec.tag(), " max relative error ", r.max_rel);
      CHECK(r.max_rel < 1e-6);
    }
  }

  TEST_CASE("weighted gradient is the weighted sum of single gradients") {
    auto m = Model::create(AnsatzSpec::sinekan(8, {6, 5}, 3, true, 4));
    const auto configs = gradcheck::random_configs(8, 5, 8);
    Eigen::VectorXd w(5);
    w << 0.3, -1.2, 0.0, 2.5, 0.7;
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(m.param_count());
    for (int b = 0; b < 5; ++b) ref += w(b) * m.grad_log_psi(configs[static_cast<std::size_t>(b)]);
    CHECK((m.weighted_gradient(std::span<const SpinConfig>(configs), w) - ref).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("flatten round trip and determinism") {
    const auto spec = AnsatzSpec::sinekan(10, {8, 6}, 4, false, 77);
    const Model a = Model::create(spec);
    const Model b = Model::create(spec);
    CHECK((a.parameters().array() == b.parameters().array()).all());
    CHECK((a.frozen().array() == b.frozen().array()).all());
    CHECK((a.frozen().array() > 0.0).all());
    CHECK((a.frozen().array() <= 0.01).all());
    const Model c = unflatten(a, flatten(a));
    const auto configs = gradcheck::random_configs(10, 100, 5);
    const Eigen::VectorXd ya = a.log_psi(std::span<const SpinConfig>(configs));
    const Eigen::VectorXd yc = c.log_psi(std::span<const SpinConfig>(configs));
    CHECK((ya.array() == yc.array()).all());
    CHECK_THROWS_AS(unflatten(a, Eigen::VectorXd::Zero(3)), std::invalid_argument);
    CHECK_THROWS_AS(a.log_psi(SpinConfig(8)), std::invalid_argument);
  }

  TEST_CASE("harmonic frequency ramp") {
    const auto m = Model::create(AnsatzSpec::sinekan(4, {3}, 5, false, 1));
    const auto& net = std::get<SineKanNetwork<double>>(m.network());
    const auto w = net.layers()[0].frequencies(m.parameters().data());
    for (Index n = 0; n < 5; ++n) {
      for (Index l = 0; l < 4; ++l) CHECK(w(n * 4 + l) == double(n + 1));
    }
  }

  TEST_CASE("grid anomaly warning") {
    CHECK(sinekan_grid_warnings(64, {64, 64}, 8).size() == 1);
    CHECK(sinekan_grid_warnings(64, {64, 64}, 7).empty());
    CHECK(sinekan_grid_warnings(100, {64, 64}, 10).empty());
    std::vector<std::string> seen;
    auto old = set_warning_handler([&](std::string_view s) { seen.emplace_back(s); });
    Model::create(AnsatzSpec::sinekan(16, {16}, 4));
    set_warning_handler(old);
    CHECK(seen.size() == 1);
  }

  TEST_CASE("tags") {
    CHECK(AnsatzSpec::sinekan(8).tag() == "vSineKAN");
    CHECK(AnsatzSpec::sinekan(8, {64, 64}, 8, true).tag() == "rSineKAN");
    CHECK(AnsatzSpec::mlp(8, {8}, true).tag() == "rMLP");
    CHECK(AnsatzSpec::rbm(8).tag() == "RBM");
  }
}
