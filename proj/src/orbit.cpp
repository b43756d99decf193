#include "bsq/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bsq/errors.hpp"
#include "bsq/symplectic.hpp"

namespace bsq {

namespace {

double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  return a <= -kPi ? a + kTwoPi : a;
}

struct Shot {
  Vec end;
  Mat z;
  Vec residual;
  double closure = 0.0;
};

Shot shoot(const HamiltonianSystem& sys, const Vec& z0, double t, double energy,
           double flow_tol, bool with_var) {
  FlowResult fr = flow(sys, z0, t, flow_tol, with_var);
  Shot s;
  s.end = fr.state.packed();
  if (with_var) s.z = *fr.variational;
  const Vec diff = wrapped_difference(sys, s.end, z0);
  s.closure = diff.cwiseAbs().maxCoeff();
  s.residual.resize(diff.size() + 2);
  s.residual << diff, 0.0, sys.energy(z0) - energy;
  return s;
}

}  // namespace

Vec wrapped_difference(const HamiltonianSystem& sys, const Vec& z1,
                       const Vec& z0) {
  Vec d = z1 - z0;
  for (int i : sys.angle_coords) d[i] = wrap_angle(d[i]);
  return d;
}

PeriodicOrbit find_periodic_orbit(const HamiltonianSystem& sys,
                                  const PhaseState& guess, double guess_period,
                                  double energy, double tol,
                                  const OrbitOptions& opt) {
  if (!(guess_period > 0.0)) throw ConfigError("orbit: guess period must be > 0");
  Vec z = guess.packed();
  if (z.size() != sys.dim_phase())
    throw ConfigError("orbit: guess has wrong dimension");
  double t = guess_period;
  const long m = z.size();

  Shot cur = shoot(sys, z, t, energy, opt.flow_tol, true);
  int it = 0;
  for (;; ++it) {
    const double herr = std::abs(cur.residual[m + 1]);
    if (cur.closure <= tol && herr <= tol) break;
    if (it >= opt.max_iter) {
      std::ostringstream os;
      os << "orbit: Newton did not converge after " << opt.max_iter
         << " iterations (closure " << cur.closure << ")";
      throw ConvergenceError(os.str());
    }
    const Vec x = sys.vector_field(z);
    const double xn = x.norm();
    if (!(xn > 1e-12)) throw DegeneracyError("orbit: equilibrium, flow vanishes");
    Mat a = Mat::Zero(m + 2, m + 1);
    a.topLeftCorner(m, m) = cur.z - Mat::Identity(m, m);
    a.topRightCorner(m, 1) = sys.vector_field(cur.end);
    a.block(m, 0, 1, m) = (x / xn).transpose();
    a.block(m + 1, 0, 1, m) = sys.gradient(z).transpose();
    const Vec step = -a.colPivHouseholderQr().solve(cur.residual);
    if (!step.allFinite())
      throw DegeneracyError("orbit: singular shooting Jacobian");

    const double r0 = cur.residual.norm();
    double lam = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 12; ++ls, lam *= 0.5) {
      const Vec zt = z + lam * step.head(m);
      const double tt = t + lam * step[m];
      if (!(tt > 0.0)) continue;
      try {
        Shot trial = shoot(sys, zt, tt, energy, opt.flow_tol, true);
        if (trial.residual.norm() < r0 || ls == 11) {
          z = zt;
          t = tt;
          cur = std::move(trial);
          accepted = true;
          break;
        }
      } catch (const DomainError&) {
      }
    }
    if (!accepted) throw ConvergenceError("orbit: line search failed");
  }

  // Multiplier 1 in the transverse block means a degenerate orbit.
  const SectionBasis basis = section_basis(sys, z);
  const Mat dp = reduce_with_bases(cur.z, basis, basis);
  Eigen::EigenSolver<Mat> es(dp);
  for (long i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()[i] - cplx(1.0, 0.0)) <= opt.unit_multiplier_tol)
      throw DegeneracyError("orbit: transverse multiplier equal to 1");
  }

  PeriodicOrbit o;
  o.energy = energy;
  o.period = t;
  o.base_point = z;
  o.closure_error = cur.closure;
  o.iterations = it;
  resample(sys, o, opt.n_samples, opt.flow_tol);
  return o;
}

void resample(const HamiltonianSystem& sys, PeriodicOrbit& orbit, int n,
              double flow_tol) {
  if (n < 2) throw ConfigError("orbit: need at least 2 samples");
  FlowResult fr = flow(sys, orbit.base_point, orbit.period, flow_tol, false, true);
  orbit.dense = std::move(fr.dense);
  orbit.times.resize(n);
  orbit.states.resize(n);
  for (int k = 0; k < n; ++k) {
    const double s = orbit.period * k / n;
    orbit.times[k] = s;
    orbit.states[k] = k == 0 ? orbit.base_point : orbit.dense.eval(s);
  }
}

std::vector<double> lobatto_grid(double a, double b, int n) {
  if (n < 2) throw ConfigError("grid: need at least 2 nodes");
  std::vector<double> g(n);
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) g[i] = c - r * std::cos(kPi * i / (n - 1));
  g.front() = a;
  g.back() = b;
  if (n % 2 == 1) g[n / 2] = c;
  return g;
}

ContinuationResult continue_family(const HamiltonianSystem& sys,
                                   const PeriodicOrbit& seed, double e_min,
                                   double e_max, int n_grid, double tol,
                                   const OrbitOptions& opt) {
  if (n_grid < 3) throw ConfigError("continuation: need at least 3 grid points");
  if (!(e_min < e_max)) throw ConfigError("continuation: empty energy interval");
  if (seed.energy < e_min || seed.energy > e_max)
    throw ConfigError("continuation: seed energy outside [e_min, e_max]");
  const std::vector<double> grid = lobatto_grid(e_min, e_max, n_grid);
  int start = 0;
  for (int i = 1; i < n_grid; ++i)
    if (std::abs(grid[i] - seed.energy) < std::abs(grid[start] - seed.energy))
      start = i;

  std::vector<std::optional<PeriodicOrbit>> found(n_grid);
  ContinuationResult res;
  auto solve_at = [&](int i, const PeriodicOrbit& prev,
                      const PeriodicOrbit* prev2) -> bool {
    double tg = prev.period;
    if (prev2) {
      const double slope =
          (prev.period - prev2->period) / (prev.energy - prev2->energy);
      const double ext = prev.period + slope * (grid[i] - prev.energy);
      if (ext > 0.0) tg = ext;
    }
    try {
      found[i] = find_periodic_orbit(sys, PhaseState::unpack(prev.base_point),
                                     tg, grid[i], tol, opt);
      return true;
    } catch (const Error& e) {
      if (!res.failed_energy) {
        res.failed_energy = grid[i];
        res.message = e.what();
      }
      return false;
    }
  };

  if (!solve_at(start, seed, nullptr)) return res;
  int lo = start, hi = start;
  for (int i = start + 1; i < n_grid; ++i) {
    const PeriodicOrbit* p2 = i - 2 >= start ? &*found[i - 2] : nullptr;
    if (!solve_at(i, *found[i - 1], p2)) break;
    hi = i;
  }
  for (int i = start - 1; i >= 0; --i) {
    const PeriodicOrbit* p2 = i + 2 <= start ? &*found[i + 2] : nullptr;
    if (!solve_at(i, *found[i + 1], p2)) break;
    lo = i;
  }
  for (int i = lo; i <= hi; ++i) {
    res.family.energy_grid.push_back(grid[i]);
    res.family.orbits.push_back(std::move(*found[i]));
  }
  return res;
}

std::pair<double, double> libration_turning_radii(double a, double energy) {
  const double disc = energy * energy - 4.0 * a;
  if (!(disc > 0.0))
    throw DomainError("coulomb_stark: energy below the axial threshold");
  const double s = std::sqrt(disc);
  return {(energy - s) / (2.0 * a), (energy + s) / (2.0 * a)};
}

OrbitGuess default_orbit_guess(const HamiltonianSystem& sys, double energy) {
  const int n = sys.dim_n;
  OrbitGuess g;
  Vec z = Vec::Zero(2 * n);
  switch (sys.kind) {
    case SystemKind::model:
      z[n] = -energy;
      g.period = kTwoPi;
      break;
    case SystemKind::hyperboloid: {
      if (!(energy > 0.0)) throw DomainError("hyperboloid: need E > 0");
      const double p = std::sqrt(2.0 * energy);
      z[2] = p;
      g.period = kTwoPi / p;
      break;
    }
    case SystemKind::coulomb_stark: {
      const double a = sys.stark_a;
      const auto [rm, rp] = libration_turning_radii(a, energy);
      z[0] = rp;
      // T = int_0^pi sqrt(r(theta)/a) dtheta, r = c - D cos(theta);
      // the integrand is even and periodic so the trapezoid rule is spectral.
      const double c = 0.5 * (rp + rm), dd = 0.5 * (rp - rm);
      const int m = 128;
      double sum = 0.0;
      for (int k = 0; k <= m; ++k) {
        const double th = kPi * k / m;
        const double w = (k == 0 || k == m) ? 0.5 : 1.0;
        sum += w * std::sqrt((c - dd * std::cos(th)) / a);
      }
      g.period = sum * kPi / m;
      break;
    }
    case SystemKind::callback:
      throw ConfigError("no default orbit guess for callback systems");
  }
  g.state = PhaseState::unpack(z);
  return g;
}

}  // namespace bsq
