#include <doctest.h>

#include <cmath>
#include <random>

#include "bsq/dop853.hpp"
#include "bsq/dynsys.hpp"
#include "bsq/errors.hpp"
#include "bsq/symplectic.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace bsq;
using testing::vec;

TEST_CASE("dop853 exponential growth") {
  OdeOptions opt;
  opt.rtol = opt.atol = 1e-13;
  auto r = dop853([](double, const Vec& y, Vec& dy) { dy = y; }, 0.0, vec({1.0}), 1.0, opt);
  CHECK(std::abs(r.y[0] - std::exp(1.0)) < 1e-11);
  CHECK(r.t == 1.0);
}

TEST_CASE("dop853 dense output of a rotation") {
  OdeOptions opt;
  opt.rtol = opt.atol = 1e-12;
  auto f = [](double, const Vec& y, Vec& dy) {
    dy.resize(2);
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  auto r = dop853(f, 0.0, vec({1.0, 0.0}), 10.0, opt, true);
  for (double t : {0.0, 0.37, 2.5, 7.77, 10.0}) {
    const Vec y = r.dense.eval(t);
    CHECK(std::abs(y[0] - std::cos(t)) < 1e-9);
    CHECK(std::abs(y[1] + std::sin(t)) < 1e-9);
  }
}

TEST_CASE("dop853 reports domain exit") {
  OdeOptions opt;
  auto f = [](double, const Vec& y, Vec& dy) {
    if (y[0] > 2.0) throw DomainError("left");
    dy = Vec::Ones(1);
  };
  CHECK_THROWS_AS(dop853(f, 0.0, vec({0.0}), 5.0, opt), DomainError);
}

TEST_CASE("builtin examples") {
  const auto m = testing::model({1.0});
  CHECK(m.dim_n == 2);
  // z = (t, x, tau, xi)
  CHECK(m.energy(vec({0.0, 0.3, -0.2, 0.5})) == doctest::Approx(0.2 + 0.15).epsilon(1e-15));
  const auto hb = testing::hyperboloid();
  CHECK(hb.energy(vec({0.0, 0.0, 1.0, 0.0})) == doctest::Approx(0.5).epsilon(1e-15));
  const auto cs = testing::stark(1.0);
  CHECK(cs.energy(vec({1.0, 0.0, 0.0, 0.0})) == doctest::Approx(2.0).epsilon(1e-15));
  const auto cs3 = testing::stark(1.0, 3);
  CHECK(cs3.dim_n == 3);
}

TEST_CASE("builtin errors") {
  CHECK_THROWS_AS(parse_kind("pendulum"), ConfigError);
  BuiltinParams p;
  p.a = 0.0;
  CHECK_THROWS_AS(make_builtin(SystemKind::coulomb_stark, p), ConfigError);
  CHECK_THROWS_AS(testing::model({0.0}), ConfigError);
  CHECK_THROWS_AS(testing::model({cplx(1.0, 1.0)}), ConfigError);
}

TEST_CASE("flow for zero time is the identity") {
  const auto sys = testing::hyperboloid();
  const Vec z = vec({0.1, 0.2, 0.9, 0.1});
  auto r = flow(sys, z, 0.0, 1e-12, true);
  CHECK((r.state.packed() - z).norm() == 0.0);
  CHECK((*r.variational - Mat::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("model flow closed form") {
  const auto sys = testing::model({1.0});
  const double e = 0.3, s = 1.7, x0 = 0.2, xi0 = -0.4;
  auto r = flow(sys, vec({0.0, x0, -e, xi0}), s, 1e-13, true);
  const Vec z = r.state.packed();
  CHECK(std::abs(std::remainder(z[0] + s, 2 * oracle::pi)) < 1e-12);
  CHECK(std::abs(z[1] - x0 * std::exp(s)) < 1e-11);
  CHECK(std::abs(z[2] + e) < 1e-14);
  CHECK(std::abs(z[3] - xi0 * std::exp(-s)) < 1e-12);
  Mat expect = Mat::Zero(4, 4);
  expect.diagonal() << 1.0, std::exp(s), 1.0, std::exp(-s);
  CHECK((*r.variational - expect).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(std::abs(r.variational->determinant() - 1.0) < 1e-8);
}

TEST_CASE("harmonic oscillator returns after 2 pi") {
  auto h0 = [](const Vec& z) { return 0.5 * z.squaredNorm(); };
  auto grad = [](const Vec& z) { return Vec(z); };
  const auto sys = make_callback_system(2, h0, grad);
  const Vec z0 = vec({0.3, -0.1, 0.7, 0.2});
  auto r = flow(sys, z0, 2 * oracle::pi, 1e-13, true);
  CHECK((r.state.packed() - z0).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(r.energy_drift < 1e-10);
  CHECK(symplectic_defect(*r.variational) < 1e-10);
}

namespace {

Vec probe(const HamiltonianSystem& sys, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec z(sys.dim_phase());
  for (long i = 0; i < z.size(); ++i) z[i] = u(rng);
  if (sys.kind == SystemKind::coulomb_stark)
    for (int i = 0; i < sys.dim_n; ++i) z[i] = 0.5 + 0.75 * (z[i] + 1.0);
  return z;
}

std::vector<HamiltonianSystem> all_builtins() {
  return {testing::model({1.0}), testing::model({cplx(0.0, 0.3)}),
          testing::model({1.0, cplx(0.0, 0.3)}), testing::hyperboloid(),
          testing::stark(1.0, 2), testing::stark(1.0, 3)};
}

}  // namespace

TEST_CASE("gradient and Hessian consistency on random probes") {
  std::mt19937 rng(12345);
  for (const auto& sys : all_builtins()) {
    CAPTURE(sys.label);
    for (int p = 0; p < 100; ++p) {
      const Vec z = probe(sys, rng);
      const Vec g = sys.gradient(z);
      Vec fd(z.size());
      for (long i = 0; i < z.size(); ++i) {
        const double step = 1e-6 * std::max(1.0, std::abs(z[i]));
        Vec zp = z, zm = z;
        zp[i] += step;
        zm[i] -= step;
        fd[i] = (sys.energy(zp) - sys.energy(zm)) / (2 * step);
      }
      CHECK((fd - g).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, g.cwiseAbs().maxCoeff()));
      const Mat hs = sys.hessian(z);
      CHECK((hs - hs.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      const Mat hfd = fd_hessian(sys.grad_h0, z);
      CHECK((hfd - hs).cwiseAbs().maxCoeff() <= 1e-4 * std::max(1.0, hs.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("variational matrix is symplectic after one period") {
  for (const auto& sys : all_builtins()) {
    CAPTURE(sys.label);
    const double e = sys.kind == SystemKind::coulomb_stark ? 2.5
                     : sys.kind == SystemKind::hyperboloid ? 0.5
                                                           : 0.1;
    const OrbitGuess g = default_orbit_guess(sys, e);
    auto r = flow(sys, g.state, g.period, 1e-13, true);
    CHECK(symplectic_defect(*r.variational) <= 1e-8);
    CHECK(r.energy_drift <= 1e-11);
  }
}

TEST_CASE("Coulomb-Stark threshold is the effective potential minimum") {
  CHECK(coulomb_stark_threshold(1.0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(coulomb_stark_threshold(4.0) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK_THROWS_AS(coulomb_stark_threshold(-1.0), ConfigError);
}

TEST_CASE("flow rejects collisions and bad tolerances") {
  const auto sys = testing::stark();
  CHECK_THROWS_AS(flow(sys, vec({1.0, 0.0, 0.0, 0.0}), 1.0, 1e-3, false), ConfigError);
  CHECK_THROWS_AS(flow(sys, vec({0.0, 0.0, 1.0, 0.0}), 1.0, 1e-10, false), DomainError);
}
