#include <doctest.h>

#include <cmath>

#include "bsq/action.hpp"
#include "bsq/chebyshev.hpp"
#include "bsq/errors.hpp"
#include "bsq/pipeline.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace bsq;

TEST_CASE("chebyshev interpolation of exp") {
  const auto g = lobatto_grid(0.0, 1.0, 21);
  std::vector<double> v;
  for (double x : g) v.push_back(std::exp(x));
  const auto c = Chebyshev::interpolate(0.0, 1.0, v);
  for (cplx z : {cplx(0.1, 0.0), cplx(0.5, 0.05), cplx(0.93, -0.08)}) {
    CHECK(std::abs(c(z) - std::exp(z)) < 1e-12);
    CHECK(std::abs(c.derivative(z) - std::exp(z)) < 1e-11);
  }
  CHECK(c.tail() < 1e-14);
}

TEST_CASE("chebyshev of a line truncates to degree one") {
  const auto g = lobatto_grid(-1.0, 2.0, 9);
  std::vector<double> v;
  for (double x : g) v.push_back(3.0 * x - 1.0);
  const auto c = Chebyshev::interpolate(-1.0, 2.0, v);
  CHECK(c.degree() <= 1);
  CHECK(std::abs(c(cplx(0.5, 0.2)) - cplx(0.5, 0.6)) < 1e-14);
}

TEST_CASE("classical action examples") {
  {
    const auto sys = testing::model({1.0});
    const auto o = testing::orbit_at(sys, 0.2);
    const auto q = classical_action(sys, o);
    CHECK(std::abs(q.value - 0.2) < 1e-12);
    CHECK(q.error < 1e-8);
  }
  {
    const auto sys = testing::hyperboloid();
    const auto o = testing::orbit_at(sys, 0.5);
    CHECK(std::abs(classical_action(sys, o).value - oracle::neck_action(0.5)) < 1e-10);
  }
  {
    const auto sys = testing::stark(1.0);
    const auto o = testing::orbit_at(sys, 2.5);
    const auto q = classical_action(sys, o);
    CHECK(std::abs(q.value - oracle::stark_axial_action(1.0, 2.5)) < 1e-7);
  }
}

TEST_CASE("subprincipal term examples") {
  auto sys = testing::model({1.0});
  const auto o = testing::orbit_at(sys, 0.2);
  CHECK(subprincipal_term(sys, o).value == 0.0);
  sys.h1 = [](const Vec&) { return 1.0; };
  CHECK(std::abs(subprincipal_term(sys, o).value + 1.0) < 1e-12);
  sys.h1 = [](const Vec& z) { return std::cos(z[0]); };
  CHECK(std::abs(subprincipal_term(sys, o).value) < 1e-10);
}

TEST_CASE("assembled semiclassical action") {
  const double tp = 2 * oracle::pi;
  {
    const auto a = assemble_semiclassical_action(0.2, 0.0, {cplx(tp, 0)}, 1, 0);
    CHECK(std::abs(a.s1 - cplx(0, -0.5)) < 1e-15);
  }
  {
    const auto a = assemble_semiclassical_action(0.2, 0.0, {cplx(0, tp * 0.3)}, 1, 0);
    CHECK(std::abs(a.s1 - cplx(0.15, 0)) < 1e-15);
  }
  {
    const auto a = assemble_semiclassical_action(0.0, 0.0, {cplx(tp, 0), cplx(0, tp * 0.3)}, 2, 0);
    CHECK(std::abs(a.s1 - cplx(0.15, -0.5)) < 1e-15);
    CHECK(a.s1 == a.sub_integral + a.mu_sum_term + a.index_term);
  }
  {
    const auto a = assemble_semiclassical_action(0.0, -0.25, {cplx(0, tp * 0.3)}, 1, 2);
    CHECK(a.index_term == 0.5);
    CHECK(a.s1 == a.sub_integral + a.mu_sum_term + a.index_term);
  }
  CHECK_THROWS_AS(assemble_semiclassical_action(0.0, 0.0, {cplx(tp, 0)}, 2, 0), DegeneracyError);
  // spectrum form on the model
  const auto sys = testing::model({1.0});
  const auto o = testing::orbit_at(sys, 0.0);
  const auto s = floquet_spectrum(sys, o);
  const auto a = assemble_semiclassical_action(0.0, 0.0, s, 0);
  CHECK(std::abs(a.s1 - cplx(0, -0.5)) < 1e-12);
}

TEST_CASE("half-density consistency") {
  for (auto [sys, e] : {std::pair{testing::model({1.0, cplx(0, 0.3)}), 0.0},
                        std::pair{testing::hyperboloid(), 0.5}, std::pair{testing::stark(), 2.5}}) {
    const auto o = testing::orbit_at(sys, e);
    const auto s = floquet_spectrum(sys, o);
    const auto a = assemble_semiclassical_action(0.0, 0.0, s, 0);
    double prod = 1.0;
    for (int i : s.selected) prod *= std::abs(s.multipliers[i]);
    CHECK(std::exp(2 * oracle::pi * a.mu_sum_term.imag()) ==
          doctest::Approx(1.0 / std::sqrt(prod)).epsilon(1e-8));
  }
}

namespace {

RunConfig hyperboloid_config() {
  RunConfig cfg = load_config(testing::config_path("hyperboloid"));
  return cfg;
}

}  // namespace

TEST_CASE("model family fit is exact") {
  RunConfig cfg = load_config(testing::config_path("model_mixed"));
  const auto sys = cfg.system();
  const auto fam = analyze_family(sys, cfg);
  const auto fit = fit_from(fam);
  CHECK(fit.max_fit_error() < 1e-12);
  CHECK(fit.s0.degree() <= 1);
  CHECK(std::abs(fit.S0(cplx(0.1, -0.1)) - cplx(0.1, -0.1)) < 1e-12);
  CHECK(std::abs(fit.S1(0.3) - cplx(0.15, -0.5)) < 1e-12);
}

TEST_CASE("hyperboloid family fit") {
  const RunConfig cfg = hyperboloid_config();
  const auto sys = cfg.system();
  const auto fam = analyze_family(sys, cfg);
  const auto fit = fit_from(fam);
  CHECK(std::abs(fit.S0(0.5) - 1.0) < 1e-8);
  // action-period identity at grid nodes and midpoints
  for (std::size_t i = 0; i < fam.actions.size(); ++i) {
    const double e = fam.actions[i].energy;
    CHECK(std::abs(2 * oracle::pi * fit.dS0(e) - fam.actions[i].t_period) <=
          1e-4 * fam.actions[i].t_period);
    if (i + 1 < fam.actions.size()) {
      const double fd = 2 * oracle::pi * (fam.actions[i + 1].s0 - fam.actions[i].s0) /
                        (fam.actions[i + 1].energy - e);
      const double em = 0.5 * (e + fam.actions[i + 1].energy);
      CHECK(std::abs(fd - oracle::neck_period(em)) <= 1e-2 * oracle::neck_period(em));
      CHECK(fam.actions[i + 1].s0 > fam.actions[i].s0);
    }
  }
  CHECK_THROWS_AS(fit.S0(cplx(0.5, 2 * fit.band)), DomainError);
  CHECK_THROWS_AS(fit.S0(cplx(0.9, 0.0)), DomainError);
}

TEST_CASE("action increases with energy on every built-in family") {
  for (const char* name : {"model_hr", "model_mixed", "coulomb_stark"}) {
    CAPTURE(name);
    RunConfig cfg = load_config(testing::config_path(name));
    const auto fam = analyze_family(cfg.system(), cfg);
    for (std::size_t i = 1; i < fam.actions.size(); ++i)
      CHECK(fam.actions[i].s0 > fam.actions[i - 1].s0);
  }
}

TEST_CASE("fit rejects coarse or malformed grids") {
  std::vector<ActionData> rows(3);
  std::vector<std::vector<cplx>> mu(3, std::vector<cplx>{1.0});
  CHECK_THROWS_AS(fit_family(rows, mu), ConfigError);
  // a kink is not representable on 5 nodes
  const auto g = lobatto_grid(-1.0, 1.0, 5);
  rows.assign(5, {});
  mu.assign(5, std::vector<cplx>{1.0});
  for (int i = 0; i < 5; ++i) {
    rows[i].energy = g[i];
    rows[i].s0 = std::abs(g[i] - 0.1);
    rows[i].t_period = 1.0;
  }
  CHECK_THROWS_AS(fit_family(rows, mu), AccuracyError);
}
