#include "bsq/czindex.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "bsq/errors.hpp"
#include "bsq/symplectic.hpp"

namespace bsq {

namespace {

// Sign convention of the winding, fixed by the model calibration
// (elliptic block with omega = 1.3 must give g = 2).
constexpr double kIndexNormalization = 1.0;

constexpr int kMaxRefine = 40;

double wrap(double a) {
  a = std::remainder(a, kTwoPi);
  return a <= -kPi ? a + kTwoPi : a;
}

double det_phase(const CMat& u) {
  const cplx det = u.determinant();
  return std::arg(det * det);
}

bool fine_enough(const CMat& u0, const CMat& u1) {
  return std::abs(wrap(det_phase(u1) - det_phase(u0))) <= 0.5 * kPi &&
         (u1 - u0).norm() <= 0.5;
}

using PsiFn = std::function<Mat(double)>;

LagrangianPath sample_path(const PsiFn& psi, double period, int n) {
  if (n < 2) throw ConfigError("index: need at least 2 samples");
  std::vector<double> times;
  std::vector<Mat> mats;
  for (int k = 0; k <= n; ++k) {
    const double s = period * k / n;
    times.push_back(s);
    mats.push_back(psi(s));
  }
  // refine by bisection until neighbouring Cayley matrices are close
  std::vector<double> out_t{times[0]};
  std::vector<Mat> out_m{mats[0]};
  for (int k = 0; k < n; ++k) {
    struct Seg { double a, b; Mat ma, mb; int depth; };
    std::vector<Seg> stack{{times[k], times[k + 1], mats[k], mats[k + 1], 0}};
    while (!stack.empty()) {
      Seg sg = stack.back();
      stack.pop_back();
      const int dd = static_cast<int>(sg.ma.rows() / 2);
      const Mat j = symplectic_j(dd);
      const Mat id = Mat::Identity(2 * dd, 2 * dd);
      const CMat ua = cayley((id + sg.ma) / 2, j * (id - sg.ma) / 2);
      const CMat ub = cayley((id + sg.mb) / 2, j * (id - sg.mb) / 2);
      if (fine_enough(ua, ub)) {
        out_t.push_back(sg.b);
        out_m.push_back(sg.mb);
        continue;
      }
      if (sg.depth >= kMaxRefine) {
        std::ostringstream os;
        os.precision(17);
        os << "index: refinement exhausted near a caustic in [" << sg.a << ", "
           << sg.b << "]";
        throw AccuracyError(os.str());
      }
      const double mid = 0.5 * (sg.a + sg.b);
      const Mat mm = psi(mid);
      stack.push_back({mid, sg.b, mm, sg.mb, sg.depth + 1});
      stack.push_back({sg.a, mid, sg.ma, mm, sg.depth + 1});
    }
  }
  return path_from_psi(out_t, out_m);
}

struct PhaseTrack {
  double winding = 0.0;
  int crossings = 0;
  std::vector<Caustic> caustics;
};

PhaseTrack track(const LagrangianPath& path) {
  const std::vector<CMat> us = cayley(path);
  PhaseTrack pt;
  const long m = us.front().rows();
  Eigen::ComplexEigenSolver<CMat> es0(us.front(), false);
  std::vector<double> theta(m);
  for (long i = 0; i < m; ++i) theta[i] = std::arg(es0.eigenvalues()[i]);
  double acc = 0.0;
  for (std::size_t k = 1; k < us.size(); ++k) {
    acc += wrap(det_phase(us[k]) - det_phase(us[k - 1]));
    Eigen::ComplexEigenSolver<CMat> es(us[k], false);
    std::vector<bool> used(m, false);
    int jump = 0;
    double t_cross = 0.0;
    for (long j = 0; j < m; ++j) {
      long best = -1;
      double bd = INFINITY;
      for (long i = 0; i < m; ++i) {
        if (used[i]) continue;
        const double dphi = std::abs(wrap(std::arg(es.eigenvalues()[i]) - theta[j]));
        if (dphi < bd) {
          bd = dphi;
          best = i;
        }
      }
      used[best] = true;
      const double old = theta[j];
      const double nw = old + wrap(std::arg(es.eigenvalues()[best]) - old);
      const int c = static_cast<int>(std::floor((nw + kPi) / kTwoPi) -
                                     std::floor((old + kPi) / kTwoPi));
      if (c != 0) {
        // time where the phase meets the odd multiple of pi
        const double target =
            kTwoPi * std::floor((std::max(old, nw) + kPi) / kTwoPi) - kPi;
        const double frac = nw != old ? (target - old) / (nw - old) : 0.5;
        t_cross = path.times[k - 1] + frac * (path.times[k] - path.times[k - 1]);
        jump += c;
      }
      theta[j] = nw;
    }
    if (jump != 0) {
      pt.caustics.push_back({t_cross, jump});
      pt.crossings += jump;
    }
  }
  pt.winding = acc / (4.0 * kPi);
  return pt;
}

}  // namespace

LagrangianPath path_from_psi(const std::vector<double>& times,
                             const std::vector<Mat>& psi) {
  LagrangianPath p;
  p.times = times;
  p.psi = psi;
  if (psi.empty()) return p;
  const int d2 = static_cast<int>(psi.front().rows());
  const Mat j = symplectic_j(d2 / 2);
  const Mat id = Mat::Identity(d2, d2);
  for (const Mat& m : psi) {
    p.c_mats.push_back((id + m) / 2);
    p.b_mats.push_back(j * (id - m) / 2);
  }
  return p;
}

CMat cayley(const Mat& c, const Mat& b) {
  const CMat plus = c.cast<cplx>() + kI * b.cast<cplx>();
  const CMat minus = c.cast<cplx>() - kI * b.cast<cplx>();
  Eigen::PartialPivLU<CMat> lu(minus.transpose());
  // U = plus * minus^{-1}  <=>  minus^T U^T = plus^T
  return lu.solve(plus.transpose()).transpose();
}

std::vector<CMat> cayley(const LagrangianPath& path) {
  std::vector<CMat> out;
  out.reserve(path.c_mats.size());
  for (std::size_t k = 0; k < path.c_mats.size(); ++k)
    out.push_back(cayley(path.c_mats[k], path.b_mats[k]));
  return out;
}

LagrangianPath plus_path(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
                         const FloquetSpectrum& spectrum, int n_samples,
                         double flow_tol) {
  const long m = sys.dim_phase();
  FlowResult fr = flow(sys, orbit.base_point, orbit.period, flow_tol, true, true);
  const SectionBasis b0 = section_basis(sys, orbit.base_point);
  const Mat b0m = b0.matrix();
  const long d2 = b0m.cols();
  if (d2 != 2 * spectrum.dim_d())
    throw ConfigError("index: spectrum dimension does not match the system");
  PsiFn psi = [&](double s) -> Mat {
    if (s == 0.0) return Mat::Identity(d2, d2);
    const Vec y = fr.dense.eval(s);
    const Vec z = y.head(m);
    const Mat zm = Eigen::Map<const Mat>(y.data() + m, m, m);
    const SectionBasis bs = transported_basis(sys, z, b0);
    return bs.dual() * zm * b0m;
  };
  LagrangianPath p = sample_path(psi, orbit.period, n_samples);
  for (const Caustic& c : track(p).caustics) p.caustics.push_back(c.t);
  return p;
}

LagrangianPath principal_path(const FloquetSpectrum& spectrum, double period,
                              int n_samples) {
  const CMat& v = spectrum.eigenvectors;
  const CMat vinv = v.inverse();
  const long n = v.rows();
  PsiFn psi = [&](double s) -> Mat {
    CVec ev(n);
    for (long j = 0; j < n; ++j) ev[j] = std::exp(spectrum.exponents[j] * (s / period));
    return (v * ev.asDiagonal() * vinv).real();
  };
  LagrangianPath p = sample_path(psi, period, n_samples);
  for (const Caustic& c : track(p).caustics) p.caustics.push_back(c.t);
  return p;
}

IndexResult cz_index(const LagrangianPath& path, const LagrangianPath& reference) {
  if (path.psi.empty() || reference.psi.empty())
    throw ConfigError("index: empty Lagrangian path");
  const Mat& end_a = path.psi.back();
  const Mat& end_p = reference.psi.back();
  const double scale = std::max(1.0, end_p.norm());
  if ((end_a - end_p).norm() > 1e-6 * scale)
    throw DegeneracyError("index: path and reference end at different maps");

  const PhaseTrack a = track(path);
  const PhaseTrack p = track(reference);
  IndexResult r;
  r.winding = a.winding;
  r.principal_winding = p.winding;
  r.jump_count = a.crossings;
  r.regular_winding = a.winding - a.crossings;
  r.per_caustic = a.caustics;
  const double raw = kIndexNormalization * (a.winding - p.winding);
  r.g = static_cast<int>(std::lround(raw));
  if (std::abs(raw - r.g) > 1e-3)
    throw DegeneracyError("index: winding difference is not an integer");
  const int g_jumps = static_cast<int>(
      std::lround(kIndexNormalization * (a.crossings - p.crossings)));
  if (g_jumps != r.g)
    throw DegeneracyError("index: ambiguous caustic jumps (winding and jump routes disagree)");
  r.g_mod4 = ((r.g % 4) + 4) % 4;
  return r;
}

IndexResult compute_index(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
                          const FloquetSpectrum& spectrum, int n_samples,
                          double flow_tol) {
  const LagrangianPath a = plus_path(sys, orbit, spectrum, n_samples, flow_tol);
  const LagrangianPath p = principal_path(spectrum, orbit.period, n_samples);
  return cz_index(a, p);
}

}  // namespace bsq
