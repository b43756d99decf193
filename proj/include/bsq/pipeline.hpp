#pragma once

#include <string>
#include <vector>

#include "bsq/action.hpp"
#include "bsq/bs.hpp"
#include "bsq/config.hpp"
#include "bsq/czindex.hpp"
#include "bsq/floquet.hpp"
#include "bsq/orbit.hpp"

namespace bsq {

struct OrbitAnalysis {
  PeriodicOrbit orbit;
  FloquetSpectrum spectrum;
  IndexResult index;
  Quadrature s0;
  Quadrature sub;
  ActionData action;  // principal exponents
};

struct FamilyAnalysis {
  OrbitFamily family;
  std::vector<OrbitAnalysis> per_orbit;
  TrackedExponents tracked;
  /// Tracked exponents with the index shifted to keep S1 unchanged:
  /// g' = g - 2 sum_j n_j when mu_j is moved by 2 pi i n_j.
  std::vector<ActionData> actions;
};

PeriodicOrbit seed_orbit(const HamiltonianSystem& sys, const RunConfig& cfg);
OrbitAnalysis analyze_orbit(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
                            const RunConfig& cfg);
/// Throws ConvergenceError if the continuation does not cover the grid.
FamilyAnalysis analyze_family(const HamiltonianSystem& sys, const RunConfig& cfg,
                              int threads = 1);
FamilyFit fit_from(const FamilyAnalysis& fam);

struct ResonanceRun {
  FamilyFit fit;
  NonResonanceReport nonres;
  ResonanceSet set;
  std::vector<std::string> warnings;
};

/// Full chain orbit -> floquet -> index -> action -> fit -> bs.
ResonanceRun run_resonances(const RunConfig& cfg, int threads = 1);
/// BS stage only, from precomputed family rows.
ResonanceRun run_resonances(const RunConfig& cfg, const std::vector<ActionData>& actions,
                            const std::vector<std::vector<cplx>>& tracked_mu,
                            const NonResonanceReport& nonres, int threads = 1);

}  // namespace bsq
