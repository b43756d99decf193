#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bsq/dynsys.hpp"
#include "bsq/types.hpp"

namespace bsq {

struct PeriodicOrbit {
  double energy = 0.0;
  double period = 0.0;
  Vec base_point;              // packed (y, eta)
  std::vector<double> times;   // uniform over [0, T), times[0] = 0
  std::vector<Vec> states;     // packed states at `times`
  double closure_error = 0.0;
  int iterations = 0;
  DenseTrajectory dense;       // one period from base_point

  PhaseState base() const { return PhaseState::unpack(base_point); }
};

struct OrbitFamily {
  std::vector<PeriodicOrbit> orbits;
  std::vector<double> energy_grid;
};

struct OrbitOptions {
  double flow_tol = 1e-13;
  int max_iter = 50;
  int n_samples = 256;
  /// A section multiplier this close to 1 marks the orbit degenerate.
  double unit_multiplier_tol = 1e-7;
};

/// z1 - z0 with angle coordinates reduced to (-pi, pi].
Vec wrapped_difference(const HamiltonianSystem& sys, const Vec& z1,
                       const Vec& z0);

/// Gauss-Newton shooting on (z0, T) with section and energy constraints.
PeriodicOrbit find_periodic_orbit(const HamiltonianSystem& sys,
                                  const PhaseState& guess, double guess_period,
                                  double energy, double tol,
                                  const OrbitOptions& opt = {});

/// Re-flows the orbit and returns n uniform samples over one period.
void resample(const HamiltonianSystem& sys, PeriodicOrbit& orbit, int n,
              double flow_tol = 1e-13);

/// Chebyshev-Lobatto nodes on [a, b], increasing.
std::vector<double> lobatto_grid(double a, double b, int n);

struct ContinuationResult {
  OrbitFamily family;
  std::optional<double> failed_energy;
  std::string message;
};

/// Marches outward from the grid node nearest the seed energy.
ContinuationResult continue_family(const HamiltonianSystem& sys,
                                   const PeriodicOrbit& seed, double e_min,
                                   double e_max, int n_grid, double tol = 1e-10,
                                   const OrbitOptions& opt = {});

struct OrbitGuess {
  PhaseState state;
  double period = 0.0;
};

/// Built-in starting guesses: model central orbit, hyperboloid neck,
/// Coulomb-Stark axial libration (started at the outer turning point).
OrbitGuess default_orbit_guess(const HamiltonianSystem& sys, double energy);

/// Turning radii of the axial libration 1/r + a r = E.
std::pair<double, double> libration_turning_radii(double a, double energy);

}  // namespace bsq
