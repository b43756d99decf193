#pragma once

#include <string>

#include "bsq/config.hpp"
#include "bsq/dynsys.hpp"
#include "bsq/orbit.hpp"

namespace testing {

inline std::string config_path(const std::string& name) {
  return std::string(BSQ_CONFIG_DIR) + "/" + name + ".json";
}

inline bsq::HamiltonianSystem model(std::vector<bsq::cplx> c) {
  bsq::BuiltinParams p;
  p.coeffs = std::move(c);
  return bsq::make_builtin(bsq::SystemKind::model, p);
}

inline bsq::HamiltonianSystem hyperboloid() {
  return bsq::make_builtin(bsq::SystemKind::hyperboloid, {});
}

inline bsq::HamiltonianSystem stark(double a = 1.0, int dim = 2) {
  bsq::BuiltinParams p;
  p.a = a;
  p.dim = dim;
  return bsq::make_builtin(bsq::SystemKind::coulomb_stark, p);
}

inline bsq::PeriodicOrbit orbit_at(const bsq::HamiltonianSystem& sys, double e) {
  const bsq::OrbitGuess g = bsq::default_orbit_guess(sys, e);
  return bsq::find_periodic_orbit(sys, g.state, g.period, e, 1e-10);
}

inline bsq::Vec vec(std::initializer_list<double> v) {
  bsq::Vec out(static_cast<long>(v.size()));
  long i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace testing
