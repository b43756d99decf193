#include <doctest.h>

#include <cmath>

#include "bsq/czindex.hpp"
#include "bsq/errors.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace bsq;

namespace {

struct Setup {
  HamiltonianSystem sys;
  PeriodicOrbit orbit;
  FloquetSpectrum spec;
};

Setup ee(double w, double e = 0.0) {
  Setup s{testing::model({cplx(0.0, w)}), {}, {}};
  s.orbit = testing::orbit_at(s.sys, e);
  s.spec = floquet_spectrum(s.sys, s.orbit);
  return s;
}

}  // namespace

TEST_CASE("cayley transform examples") {
  const CMat u = cayley(Mat::Identity(2, 2), Mat::Zero(2, 2));
  CHECK((u - CMat::Identity(2, 2)).norm() < 1e-15);
  for (double th : {0.1, 1.0, 2.5}) {
    Mat c(1, 1), b(1, 1);
    c << std::cos(th);
    b << std::sin(th);
    CHECK(std::abs(cayley(c, b)(0, 0) - std::exp(cplx(0, 2 * th))) < 1e-14);
  }
}

TEST_CASE("frame starts at the identity and stays unitary") {
  for (double w : {0.3, 1.3}) {
    const Setup s = ee(w);
    const auto p = plus_path(s.sys, s.orbit, s.spec, 64);
    CHECK((p.c_mats.front() - Mat::Identity(2, 2)).norm() == 0.0);
    CHECK(p.b_mats.front().norm() == 0.0);
    for (const CMat& u : cayley(p)) {
      const double defect = (u.adjoint() * u - CMat::Identity(2, 2)).cwiseAbs().maxCoeff();
      if (std::isfinite(defect)) CHECK(defect < 1e-7);
    }
  }
}

TEST_CASE("hyperbolic model frame has no caustics") {
  const auto sys = testing::model({1.0});
  const auto o = testing::orbit_at(sys, 0.0);
  const auto spec = floquet_spectrum(sys, o);
  const auto p = plus_path(sys, o, spec, 64);
  CHECK(p.caustics.empty());
  for (const Mat& psi : p.psi) CHECK(std::abs(psi(0, 1)) + std::abs(psi(1, 0)) < 1e-10);
  CHECK(compute_index(sys, o, spec).g == 0);
}

TEST_CASE("elliptic caustic counts") {
  CHECK(plus_path(ee(0.3).sys, ee(0.3).orbit, ee(0.3).spec, 64).caustics.empty());
  const Setup s = ee(1.3);
  const auto p = plus_path(s.sys, s.orbit, s.spec, 64);
  REQUIRE(p.caustics.size() == 1);
  CHECK(p.caustics[0] > 0.0);
  CHECK(p.caustics[0] <= s.orbit.period);
}

TEST_CASE("model index values") {
  CHECK(compute_index(ee(0.3).sys, ee(0.3).orbit, ee(0.3).spec).g == 0);
  const Setup s = ee(1.3);
  const auto r = compute_index(s.sys, s.orbit, s.spec);
  CHECK(r.g == 2);
  CHECK(r.g_mod4 == 2);
  int jumps = 0;
  for (const auto& c : r.per_caustic) jumps += c.jump;
  CHECK(jumps == r.jump_count);
}

TEST_CASE("index is stable under sampling and perturbation") {
  for (double w : {0.3, 0.7, 1.3, 1.7}) {
    CAPTURE(w);
    const Setup s = ee(w);
    const int g = compute_index(s.sys, s.orbit, s.spec, 16).g;
    CHECK(compute_index(s.sys, s.orbit, s.spec, 32).g == g);
    CHECK(compute_index(s.sys, s.orbit, s.spec, 128).g == g);
    for (double dw : {-1e-4, 1e-4}) {
      const Setup t = ee(w + dw);
      CHECK(compute_index(t.sys, t.orbit, t.spec).g == g);
    }
  }
}

TEST_CASE("winding is affine in the frequency") {
  std::vector<double> ws{0.3, 0.7, 1.3, 1.7, 2.3};
  std::vector<double> wind;
  for (double w : ws) {
    const Setup s = ee(w);
    wind.push_back(compute_index(s.sys, s.orbit, s.spec).winding);
  }
  const double slope = (wind.back() - wind.front()) / (ws.back() - ws.front());
  for (std::size_t i = 0; i < ws.size(); ++i)
    CHECK(std::abs(wind[i] - (wind.front() + slope * (ws[i] - ws.front()))) < 1e-8);
  CHECK(std::abs(slope - 2.0) < 1e-8);
}

TEST_CASE("hyperbolic orbits have vanishing index") {
  for (auto [sys, e] : {std::pair{testing::hyperboloid(), 0.5}, std::pair{testing::stark(), 2.5},
                        std::pair{testing::model({2.0}), 0.1}}) {
    CAPTURE(sys.label);
    const auto o = testing::orbit_at(sys, e);
    const auto spec = floquet_spectrum(sys, o);
    CHECK_FALSE(spec.has_elliptic());
    CHECK(compute_index(sys, o, spec).g == 0);
  }
}

TEST_CASE("mismatched endpoints are rejected") {
  const Setup s = ee(0.3);
  const auto p = plus_path(s.sys, s.orbit, s.spec, 32);
  const auto q = principal_path(ee(0.4).spec, s.orbit.period, 32);
  CHECK_THROWS_AS(cz_index(p, q), DegeneracyError);
}
