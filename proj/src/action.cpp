#include "bsq/action.hpp"

#include <cmath>

#include "bsq/errors.hpp"

namespace bsq {

Quadrature orbit_quadrature(const PeriodicOrbit& orbit,
                            const std::function<double(const Vec&)>& f,
                            double target) {
  if (orbit.dense.empty()) throw ConfigError("quadrature: orbit has no dense output");
  const double t = orbit.period;
  auto rule = [&](int n) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += f(orbit.dense.eval(t * k / n));
    return s * t / n;
  };
  Quadrature q;
  int n = 64;
  double prev = rule(n);
  for (int it = 0; it < 12; ++it) {
    n *= 2;
    const double cur = rule(n);
    const double err = std::abs(cur - prev);
    if (err < target) {
      q.value = cur;
      q.error = err;
      q.nodes = n;
      return q;
    }
    prev = cur;
  }
  throw AccuracyError("quadrature: refinement did not converge");
}

Quadrature classical_action(const HamiltonianSystem& sys,
                            const PeriodicOrbit& orbit, double target) {
  const int n = sys.dim_n;
  Quadrature q = orbit_quadrature(
      orbit,
      [&](const Vec& z) { return z.tail(n).dot(sys.gradient(z).tail(n)); },
      target * kTwoPi);
  q.value /= kTwoPi;
  q.error /= kTwoPi;
  return q;
}

Quadrature subprincipal_term(const HamiltonianSystem& sys,
                             const PeriodicOrbit& orbit, double target) {
  if (!sys.h1) return {};
  Quadrature q = orbit_quadrature(
      orbit, [&](const Vec& z) { return sys.subprincipal(z); }, target * kTwoPi);
  q.value /= -kTwoPi;
  q.error /= kTwoPi;
  return q;
}

ActionData assemble_semiclassical_action(double s0, double sub,
                                         const FloquetSpectrum& spectrum, int g) {
  ActionData a = assemble_semiclassical_action(
      s0, sub, spectrum.selected_exponents(), spectrum.dim_d(), g);
  a.energy = spectrum.energy;
  return a;
}

ActionData assemble_semiclassical_action(double s0, double sub,
                                         const std::vector<cplx>& mu, int d,
                                         int g) {
  if (static_cast<int>(mu.size()) != d)
    throw DegeneracyError("action: selected exponent count differs from d");
  ActionData a;
  a.s0 = s0;
  a.sub_integral = sub;
  cplx sum = 0.0;
  for (const cplx& m : mu) sum += m;
  a.mu_sum_term = sum / (4.0 * kPi * kI);
  a.g = g;
  a.index_term = g / 4.0;
  a.s1 = a.sub_integral + a.mu_sum_term + a.index_term;
  return a;
}

double FamilyFit::max_fit_error() const {
  double m = 0.0;
  for (const auto& [name, e] : fit_errors) m = std::max(m, e);
  return m;
}

void FamilyFit::check_domain(cplx e) const {
  if (std::abs(e.imag()) > band || e.real() < e_min - band || e.real() > e_max + band)
    throw DomainError("family fit: energy outside the validity band");
}

cplx FamilyFit::S0(cplx e) const { check_domain(e); return s0(e); }
cplx FamilyFit::dS0(cplx e) const { check_domain(e); return s0.derivative(e); }
cplx FamilyFit::T(cplx e) const { check_domain(e); return period(e); }
cplx FamilyFit::S1(cplx e) const { check_domain(e); return s1(e); }
cplx FamilyFit::dS1(cplx e) const { check_domain(e); return s1.derivative(e); }
cplx FamilyFit::mu_j(int j, cplx e) const { check_domain(e); return mu.at(j)(e); }
cplx FamilyFit::dmu_j(int j, cplx e) const { check_domain(e); return mu.at(j).derivative(e); }

FamilyFit fit_family(const OrbitFamily& family,
                     const std::vector<std::vector<cplx>>& tracked_mu,
                     std::vector<ActionData> actions, double max_error) {
  if (actions.size() != family.orbits.size())
    throw ConfigError("family fit: per-orbit data size mismatch");
  for (std::size_t i = 0; i < actions.size(); ++i) {
    actions[i].energy = family.orbits[i].energy;
    actions[i].t_period = family.orbits[i].period;
  }
  return fit_family(actions, tracked_mu, max_error);
}

FamilyFit fit_family(const std::vector<ActionData>& actions,
                     const std::vector<std::vector<cplx>>& tracked_mu,
                     double max_error) {
  const std::size_t n = actions.size();
  if (n < 5) throw ConfigError("family fit: need at least 5 grid energies");
  if (tracked_mu.size() != n)
    throw ConfigError("family fit: per-orbit data size mismatch");
  const double a = actions.front().energy, b = actions.back().energy;
  const std::vector<double> grid = lobatto_grid(a, b, static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(grid[i] - actions[i].energy) > 1e-12 * std::max(1.0, std::abs(grid[i])))
      throw ConfigError("family fit: energies are not a Lobatto grid");

  FamilyFit fit;
  fit.e_min = a;
  fit.e_max = b;
  fit.d = static_cast<int>(tracked_mu.front().size());
  for (std::size_t i = 1; i < n; ++i)
    fit.band = std::max(fit.band, grid[i] - grid[i - 1]);

  std::vector<double> s0(n), tp(n);
  std::vector<cplx> s1(n);
  for (std::size_t i = 0; i < n; ++i) {
    s0[i] = actions[i].s0;
    tp[i] = actions[i].t_period;
    s1[i] = actions[i].s1;
  }
  fit.s0 = Chebyshev::interpolate(a, b, s0);
  fit.period = Chebyshev::interpolate(a, b, tp);
  fit.s1 = Chebyshev::interpolate(a, b, s1);
  fit.fit_errors = {{"S0", fit.s0.tail()}, {"T", fit.period.tail()}, {"S1", fit.s1.tail()}};
  for (int j = 0; j < fit.d; ++j) {
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = tracked_mu[i].at(j);
    fit.mu.push_back(Chebyshev::interpolate(a, b, v));
    fit.fit_errors.emplace_back("mu_" + std::to_string(j + 1), fit.mu.back().tail());
  }
  for (const auto& [name, e] : fit.fit_errors)
    if (e > max_error)
      throw AccuracyError("family fit: " + name + " residual above tolerance (grid too coarse)");
  return fit;
}

}  // namespace bsq
