#pragma once

#include <string>
#include <vector>

#include "bsq/chebyshev.hpp"
#include "bsq/dynsys.hpp"
#include "bsq/floquet.hpp"
#include "bsq/orbit.hpp"
#include "bsq/types.hpp"

namespace bsq {

struct Quadrature {
  double value = 0.0;
  double error = 0.0;
  int nodes = 0;
};

/// Periodic trapezoid rule on the orbit's dense output, doubling from 64
/// nodes until successive values differ by less than `target`.
Quadrature orbit_quadrature(const PeriodicOrbit& orbit,
                            const std::function<double(const Vec&)>& f,
                            double target = 1e-9);

/// S0 = (1/2pi) closed integral of eta . dy along the flow.
Quadrature classical_action(const HamiltonianSystem& sys,
                            const PeriodicOrbit& orbit, double target = 1e-9);

/// -(1/2pi) int_0^T H1 dt.
Quadrature subprincipal_term(const HamiltonianSystem& sys,
                             const PeriodicOrbit& orbit, double target = 1e-9);

struct ActionData {
  double energy = 0.0;
  double s0 = 0.0;
  double t_period = 0.0;
  double sub_integral = 0.0;
  cplx mu_sum_term = 0.0;  // (1/4 pi i) sum of selected mu_j
  double index_term = 0.0; // g / 4
  cplx s1 = 0.0;
  int g = 0;
};

ActionData assemble_semiclassical_action(double s0, double sub,
                                         const FloquetSpectrum& spectrum, int g);
/// Same with an explicit exponent list (e.g. continuously tracked values).
ActionData assemble_semiclassical_action(double s0, double sub,
                                         const std::vector<cplx>& mu, int d,
                                         int g);

/// Chebyshev fits of the family data, evaluable in a thin complex band.
struct FamilyFit {
  double e_min = 0.0;
  double e_max = 0.0;
  double band = 0.0;  // allowed |Im E|; the maximal grid spacing
  int d = 0;
  Chebyshev s0, period, s1;
  std::vector<Chebyshev> mu;  // one per selected exponent, tracked order
  std::vector<std::pair<std::string, double>> fit_errors;

  double max_fit_error() const;
  void check_domain(cplx e) const;  // throws DomainError outside the band
  cplx S0(cplx e) const;
  cplx dS0(cplx e) const;
  cplx T(cplx e) const;
  cplx S1(cplx e) const;
  cplx dS1(cplx e) const;
  cplx mu_j(int j, cplx e) const;
  cplx dmu_j(int j, cplx e) const;
};

/// Requires at least 5 energies on the Lobatto grid of [e_min, e_max].
/// `actions[i].s1` must already include the (tracked) exponent sum and
/// `actions[i].t_period` the period.
FamilyFit fit_family(const std::vector<ActionData>& actions,
                     const std::vector<std::vector<cplx>>& tracked_mu,
                     double max_error = 1e-6);
FamilyFit fit_family(const OrbitFamily& family,
                     const std::vector<std::vector<cplx>>& tracked_mu,
                     std::vector<ActionData> actions, double max_error = 1e-6);

}  // namespace bsq
