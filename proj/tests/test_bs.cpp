#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "bsq/bs.hpp"
#include "bsq/errors.hpp"
#include "bsq/pipeline.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace bsq;

namespace {

BSConfig cfg_for(double h, double eps0, double delta) {
  BSConfig c;
  c.h = h;
  c.eps0 = eps0;
  c.delta = delta;
  return c;
}

const ResonanceRun& model_run(const std::string& name) {
  static std::map<std::string, ResonanceRun> cache;
  auto it = cache.find(name);
  if (it == cache.end())
    it = cache.emplace(name, run_resonances(load_config(testing::config_path(name)))).first;
  return it->second;
}

}  // namespace

TEST_CASE("lattice enumeration examples") {
  const auto l = enumerate_lattice(cfg_for(0.1, 0.25, 0.5), 1);
  REQUIRE(l.size() == 20);
  CHECK(l.front().m == -2);
  CHECK(l.front().k == KVec{0});
  CHECK(l[3].k == KVec{3});
  CHECK(l.back().m == 2);
  CHECK(l.back().k == KVec{3});
  for (std::size_t i = 1; i < l.size(); ++i)
    CHECK((l[i - 1].m < l[i].m || (l[i - 1].m == l[i].m && l[i - 1].k < l[i].k)));

  for (const auto& p : enumerate_lattice(cfg_for(0.1, 0.05, 0.5), 1)) CHECK(p.m == 0);

  const auto l2 = enumerate_lattice(cfg_for(0.1, 0.25, 0.5), 2);
  CHECK(l2.size() == 5 * 10);
  for (const auto& p : l2) CHECK(p.k[0] + p.k[1] <= 3);

  BSConfig big = cfg_for(0.1, 0.25, 0.5);
  big.lattice_cap = 10;
  CHECK_THROWS_AS(enumerate_lattice(big, 1), ConfigError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(cfg_for(0.0, 0.25, 0.5).validate(), ConfigError);
  CHECK_THROWS_AS(cfg_for(0.05, 0.25, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(cfg_for(0.05, -1.0, 0.5).validate(), ConfigError);
  CHECK_NOTHROW(cfg_for(0.05, 0.25, 0.5).validate());
}

TEST_CASE("single lattice points on the model") {
  {
    const auto& run = model_run("model_hr");
    const BSConfig c = load_config(testing::config_path("model_hr")).bs;
    const auto r = solve_bs(run.fit, c, 1, {0}, k0_seed(run.fit, c, 1));
    CHECK(std::abs(r.energy - cplx(0.05, -0.025)) < 1e-10);
    CHECK(r.residual < 1e-10);
  }
  {
    const auto& run = model_run("model_ee");
    const BSConfig c = load_config(testing::config_path("model_ee")).bs;
    const auto r = solve_bs(run.fit, c, 0, {1}, k0_seed(run.fit, c, 0));
    CHECK(std::abs(r.energy - 0.0225) < 1e-10);
  }
  {
    const auto& run = model_run("model_mixed");
    const BSConfig c = load_config(testing::config_path("model_mixed")).bs;
    const auto r = solve_bs(run.fit, c, 0, {0, 0}, k0_seed(run.fit, c, 0));
    CHECK(std::abs(r.energy - cplx(0.0075, -0.025)) < 1e-10);
  }
}

TEST_CASE("model resonance set equals the closed form") {
  RunConfig cfg = load_config(testing::config_path("model_hr"));
  cfg.bs.eps0 = 0.2;
  const auto run = run_resonances(cfg);
  const auto want = oracle::model_resonances({1.0}, 0.05, 0.2, 0.5);
  REQUIRE(run.set.resonances.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(std::abs(run.set.resonances[i].energy - want[i].e) < 1e-8);
    CHECK(run.set.resonances[i].m == want[i].m);
    CHECK(run.set.resonances[i].k == KVec(want[i].k.begin(), want[i].k.end()));
  }
}

TEST_CASE("window with no resonances") {
  RunConfig cfg = load_config(testing::config_path("model_hr"));
  cfg.bs.e_center = 0.025;
  cfg.bs.eps0 = 0.01;
  const auto run = run_resonances(cfg);
  CHECK(run.set.resonances.empty());
}

TEST_CASE("width is linear in k on the model") {
  const auto& run = model_run("model_hr");
  for (int m : {-2, 0, 3}) {
    std::vector<std::pair<int, double>> col;
    for (const auto& r : run.set.resonances)
      if (r.m == m) col.emplace_back(r.k[0], -r.energy.imag());
    REQUIRE(col.size() >= 2);
    std::sort(col.begin(), col.end());
    for (std::size_t i = 1; i < col.size(); ++i)
      CHECK(std::abs((col[i].second - col[i - 1].second) / (col[i].first - col[i - 1].first) -
                     0.05) < 1e-8);
  }
}

TEST_CASE("labels are stable under a tighter Newton tolerance") {
  RunConfig cfg = load_config(testing::config_path("hyperboloid"));
  const auto a = run_resonances(cfg);
  cfg.bs.newton_tol *= 0.5;
  const auto b = run_resonances(cfg);
  REQUIRE(a.set.resonances.size() == b.set.resonances.size());
  for (std::size_t i = 0; i < a.set.resonances.size(); ++i) {
    CHECK(a.set.resonances[i].m == b.set.resonances[i].m);
    CHECK(std::abs(a.set.resonances[i].energy - b.set.resonances[i].energy) <= 10 * 1e-10);
  }
}

TEST_CASE("hyperboloid spacing and widths follow the fitted data") {
  RunConfig cfg = load_config(testing::config_path("hyperboloid"));
  const auto run = run_resonances(cfg);
  REQUIRE(run.set.resonances.size() >= 3);
  for (const auto& r : run.set.resonances) {
    const double e = r.energy.real();
    const double mu = run.fit.mu_j(0, e).real();
    const double width = cfg.bs.h * (r.k[0] + 0.5) * mu / run.fit.T(e).real();
    CHECK(std::abs(-r.energy.imag() - width) < 5 * cfg.bs.h * cfg.bs.h);
  }
  std::vector<double> k0;
  for (const auto& r : run.set.resonances)
    if (r.k[0] == 0) k0.push_back(r.energy.real());
  for (std::size_t i = 1; i < k0.size(); ++i) {
    const double mid = 0.5 * (k0[i] + k0[i - 1]);
    CHECK(std::abs((k0[i] - k0[i - 1]) - cfg.bs.h * std::sqrt(2 * mid)) < 1e-3 * cfg.bs.h);
  }
}

TEST_CASE("window discipline") {
  for (const char* name : {"model_hr", "model_ee", "model_mixed", "hyperboloid", "coulomb_stark"}) {
    CAPTURE(name);
    const RunConfig cfg = load_config(testing::config_path(name));
    const auto run = run_resonances(cfg);
    for (const auto& r : run.set.resonances) {
      CHECK(r.in_window);
      CHECK(r.energy.imag() <= cfg.bs.newton_tol);
      CHECK(r.energy.imag() >= -cfg.bs.depth() - cfg.bs.newton_tol);
      CHECK(std::abs(r.energy.real() - cfg.bs.e_center) <= cfg.bs.eps0 + 1e-10);
      CHECK(r.residual <= cfg.bs.newton_tol);
    }
  }
}

TEST_CASE("duplicates are merged with both labels") {
  Resonance a, b, c;
  a.energy = cplx(0.1, -0.2);
  a.m = 1;
  a.k = {0};
  b.energy = cplx(0.1 + 1e-13, -0.2);
  b.m = 3;
  b.k = {1};
  c.energy = cplx(-0.1, -0.2);
  c.m = 0;
  c.k = {0};
  const auto out = sort_and_merge({a, b, c});
  REQUIRE(out.size() == 2);
  CHECK(out[0].energy == c.energy);
  REQUIRE(out[1].alt_labels.size() == 1);
  CHECK(out[1].alt_labels[0].m == 3);
}
