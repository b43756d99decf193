#include "bsq/pipeline.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "bsq/errors.hpp"
#include "bsq/parallel.hpp"

namespace bsq {

PeriodicOrbit seed_orbit(const HamiltonianSystem& sys, const RunConfig& cfg) {
  const OrbitGuess g = cfg.guess();
  OrbitOptions opt;
  opt.flow_tol = cfg.flow_tol;
  return find_periodic_orbit(sys, g.state, g.period, cfg.seed(), cfg.orbit_tol, opt);
}

OrbitAnalysis analyze_orbit(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
                            const RunConfig& cfg) {
  OrbitAnalysis a;
  a.orbit = orbit;
  a.spectrum = floquet_spectrum(sys, orbit, cfg.flow_tol, cfg.class_tol);
  a.index = compute_index(sys, orbit, a.spectrum, cfg.index_samples, cfg.flow_tol);
  a.s0 = classical_action(sys, orbit, cfg.quadrature_tol);
  a.sub = subprincipal_term(sys, orbit, cfg.quadrature_tol);
  a.action = assemble_semiclassical_action(a.s0.value, a.sub.value, a.spectrum, a.index.g);
  a.action.energy = orbit.energy;
  a.action.t_period = orbit.period;
  return a;
}

FamilyAnalysis analyze_family(const HamiltonianSystem& sys, const RunConfig& cfg,
                              int threads) {
  const PeriodicOrbit seed = seed_orbit(sys, cfg);
  OrbitOptions opt;
  opt.flow_tol = cfg.flow_tol;
  ContinuationResult cr =
      continue_family(sys, seed, cfg.e_min, cfg.e_max, cfg.n_energies, cfg.orbit_tol, opt);
  if (cr.failed_energy) {
    std::ostringstream os;
    os.precision(17);
    os << "continuation failed at E=" << *cr.failed_energy << ": " << cr.message;
    throw ConvergenceError(os.str());
  }
  FamilyAnalysis fam;
  fam.family = std::move(cr.family);
  const std::size_t n = fam.family.orbits.size();
  fam.per_orbit.resize(n);
  std::vector<std::string> errors(n);
  parallel_for(n, threads, [&](std::size_t i) {
    try {
      fam.per_orbit[i] = analyze_orbit(sys, fam.family.orbits[i], cfg);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    if (!errors[i].empty()) {
      std::ostringstream os;
      os.precision(17);
      os << "analysis failed at E=" << fam.family.energy_grid[i] << ": " << errors[i];
      throw ConvergenceError(os.str());
    }

  std::vector<FloquetSpectrum> spectra;
  for (const auto& a : fam.per_orbit) spectra.push_back(a.spectrum);
  fam.tracked = track_exponents(spectra);
  const int d = sys.dim_d();
  for (std::size_t i = 0; i < n; ++i) {
    const OrbitAnalysis& a = fam.per_orbit[i];
    int shift = 0;
    for (int s : fam.tracked.shift[i]) shift += s;
    ActionData ad = assemble_semiclassical_action(a.s0.value, a.sub.value,
                                                  fam.tracked.tracked[i], d,
                                                  a.index.g - 2 * shift);
    ad.energy = a.orbit.energy;
    ad.t_period = a.orbit.period;
    fam.actions.push_back(ad);
  }
  return fam;
}

FamilyFit fit_from(const FamilyAnalysis& fam) {
  return fit_family(fam.actions, fam.tracked.tracked);
}

namespace {

void check_window(const RunConfig& cfg, const FamilyFit& fit) {
  const double lo = cfg.bs.e_center - cfg.bs.eps0, hi = cfg.bs.e_center + cfg.bs.eps0;
  if (lo < fit.e_min || hi > fit.e_max)
    throw ConfigError("/grid: energy grid does not cover the window");
  if (cfg.bs.depth() > fit.band)
    throw ConfigError("/grid: window depth h^delta exceeds the fit band (max grid spacing)");
}

}  // namespace

ResonanceRun run_resonances(const RunConfig& cfg, const std::vector<ActionData>& actions,
                            const std::vector<std::vector<cplx>>& tracked_mu,
                            const NonResonanceReport& nonres, int threads) {
  ResonanceRun run;
  run.fit = fit_family(actions, tracked_mu);
  check_window(cfg, run.fit);
  run.nonres = nonres;
  if (!nonres.clean())
    run.warnings.push_back("non-resonance condition violated; rows flagged warn_nonres");
  run.set = compute_resonances(run.fit, cfg.bs, nonres.clean(), threads);
  if (!run.set.skipped.empty())
    run.warnings.push_back(std::to_string(run.set.skipped.size()) +
                           " lattice points skipped (outside the fit band or no convergence)");
  return run;
}

ResonanceRun run_resonances(const RunConfig& cfg, int threads) {
  const HamiltonianSystem sys = cfg.system();
  const FamilyAnalysis fam = analyze_family(sys, cfg, threads);
  // non-resonance is checked on the orbit nearest the window centre
  std::size_t best = 0;
  for (std::size_t i = 1; i < fam.per_orbit.size(); ++i)
    if (std::abs(fam.family.energy_grid[i] - cfg.bs.e_center) <
        std::abs(fam.family.energy_grid[best] - cfg.bs.e_center))
      best = i;
  const NonResonanceReport nr =
      check_nonresonance(fam.per_orbit[best].spectrum, cfg.nonres_k_max, cfg.nonres_tol);
  return run_resonances(cfg, fam.actions, fam.tracked.tracked, nr, threads);
}

}  // namespace bsq
