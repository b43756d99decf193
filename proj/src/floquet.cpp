#include "bsq/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bsq/errors.hpp"
#include "bsq/symplectic.hpp"

namespace bsq {

namespace {

constexpr double kUnitTol = 1e-7;
constexpr double kCondMax = 1e8;

// (1/2i) conj(u)^T J v
cplx krein_form(const CVec& u, const CVec& v) {
  return omega(CVec(u.conjugate()), v) / (2.0 * kI);
}

double dist_to_2pi_z(double x) {
  return std::abs(std::remainder(x, kTwoPi));
}

}  // namespace

const char* class_name(FloquetClass c) {
  switch (c) {
    case FloquetClass::ee: return "ee";
    case FloquetClass::hr: return "hr";
    case FloquetClass::hc: return "hc";
  }
  return "?";
}

std::vector<cplx> FloquetSpectrum::selected_exponents() const {
  std::vector<cplx> out;
  for (int i : selected) out.push_back(exponents[i]);
  return out;
}

bool FloquetSpectrum::has_elliptic() const {
  return std::any_of(classes.begin(), classes.end(),
                     [](FloquetClass c) { return c == FloquetClass::ee; });
}

Mat monodromy(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
              double tol) {
  if (orbit.period == 0.0) return Mat::Identity(sys.dim_phase(), sys.dim_phase());
  FlowResult fr = flow(sys, orbit.base_point, orbit.period, tol, true);
  const Mat z = *fr.variational;
  const double defect = symplectic_defect(z) / std::max(1.0, z.squaredNorm());
  if (defect > 1e-6)
    throw AccuracyError("monodromy: symplectic defect too large, tighten tolerances");
  return z;
}

Mat reduce_to_section(const Mat& z, const PeriodicOrbit& orbit,
                      const HamiltonianSystem& sys) {
  const SectionBasis b = section_basis(sys, orbit.base_point);
  const Mat dp = reduce_with_bases(z, b, b);
  Eigen::EigenSolver<Mat> es(dp, false);
  for (long i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i] - cplx(1.0, 0.0)) <= kUnitTol)
      throw DegeneracyError("section map: unit multiplier in the transverse block");
  return dp;
}

FloquetSpectrum exponents_and_classes(const Mat& dp, double tol) {
  const long m = dp.rows();
  if (m % 2 != 0 || dp.cols() != m || m == 0)
    throw ConfigError("floquet: section map must be 2d x 2d");
  const int d = static_cast<int>(m / 2);
  const double scale = std::max(1.0, dp.squaredNorm());
  if (symplectic_defect(dp) / scale > 1e-7)
    throw DegeneracyError("floquet: section map is not symplectic");

  Eigen::ComplexEigenSolver<CMat> ces(dp.cast<cplx>());
  if (ces.info() != Eigen::Success)
    throw ConvergenceError("floquet: eigen-decomposition failed");
  CVec vals = ces.eigenvalues();
  CMat vecs = ces.eigenvectors();
  for (long j = 0; j < m; ++j) vecs.col(j).normalize();
  {
    Eigen::JacobiSVD<CMat> svd(vecs);
    const auto& sv = svd.singularValues();
    if (!(sv[m - 1] > 0.0) || sv[0] / sv[m - 1] > kCondMax)
      throw DegeneracyError("floquet: section map is not diagonalizable");
  }

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<cplx> mu(m);
  for (long j = 0; j < m; ++j) {
    const cplx lam = vals[j];
    if (std::abs(lam - cplx(1.0, 0.0)) <= kUnitTol)
      throw DegeneracyError("floquet: multiplier equal to 1");
    if (lam.real() < 0.0 && std::abs(lam.imag()) <= tol * std::abs(lam))
      throw DegeneracyError("floquet: multiplier on the negative real axis");
    mu[j] = std::log(lam);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (mu[a].real() != mu[b].real()) return mu[a].real() > mu[b].real();
    return mu[a].imag() > mu[b].imag();
  });

  FloquetSpectrum s;
  s.section_monodromy = dp;
  s.eigenvectors.resize(m, m);
  for (long j = 0; j < m; ++j) {
    const int o = order[j];
    s.multipliers.push_back(vals[o]);
    s.exponents.push_back(mu[o]);
    s.eigenvectors.col(j) = vecs.col(o);
    const cplx lam = vals[o];
    const double r = std::abs(lam);
    if (std::abs(r - 1.0) <= tol)
      s.classes.push_back(FloquetClass::ee);
    else if (std::abs(lam.imag()) <= tol * r)
      s.classes.push_back(FloquetClass::hr);
    else
      s.classes.push_back(FloquetClass::hc);
  }

  s.krein.assign(m, 0.0);
  s.first_kind.assign(m, false);
  std::vector<bool> done(m, false);
  for (long a = 0; a < m; ++a) {
    if (s.classes[a] != FloquetClass::ee || done[a]) continue;
    std::vector<int> cluster{static_cast<int>(a)};
    for (long b = a + 1; b < m; ++b)
      if (s.classes[b] == FloquetClass::ee && !done[b] &&
          std::abs(s.multipliers[b] - s.multipliers[a]) <= 1e-7)
        cluster.push_back(static_cast<int>(b));
    const int c = static_cast<int>(cluster.size());
    CMat u(m, c);
    for (int i = 0; i < c; ++i) u.col(i) = s.eigenvectors.col(cluster[i]);
    CMat k(c, c);
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < c; ++j) k(i, j) = krein_form(u.col(i), u.col(j));
    k = 0.5 * (k + k.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMat> hs(k);
    // descending so the positive (first kind) directions come first
    for (int i = 0; i < c; ++i) {
      const int src = c - 1 - i;
      const int dst = cluster[i];
      CVec v = u * hs.eigenvectors().col(src);
      s.eigenvectors.col(dst) = v.normalized();
      const double kap = hs.eigenvalues()[src];
      if (std::abs(kap) < 1e-12)
        throw DegeneracyError("floquet: elliptic multiplier with null Krein form");
      s.krein[dst] = krein_form(s.eigenvectors.col(dst), s.eigenvectors.col(dst)).real();
      s.first_kind[dst] = kap > 0.0;
      done[dst] = true;
    }
  }

  for (long j = 0; j < m; ++j) {
    const bool sel = s.classes[j] == FloquetClass::ee
                         ? s.first_kind[j]
                         : std::abs(s.multipliers[j]) > 1.0;
    if (sel) s.selected.push_back(static_cast<int>(j));
  }
  if (static_cast<int>(s.selected.size()) != d)
    throw DegeneracyError("floquet: selected exponent set does not have size d");

  double pr = 0.0;
  for (long a = 0; a < m; ++a) {
    double best = INFINITY;
    for (long b = 0; b < m; ++b)
      if (b != a)
        best = std::min(best, std::abs(s.multipliers[a] * s.multipliers[b] - 1.0));
    pr = std::max(pr, best);
  }
  s.pairing_residual = pr;
  return s;
}

FloquetSpectrum floquet_spectrum(const HamiltonianSystem& sys,
                                 const PeriodicOrbit& orbit, double flow_tol,
                                 double class_tol) {
  const Mat z = monodromy(sys, orbit, flow_tol);
  FloquetSpectrum s = exponents_and_classes(reduce_to_section(z, orbit, sys), class_tol);
  s.energy = orbit.energy;
  return s;
}

NonResonanceReport check_nonresonance(const FloquetSpectrum& spec, int k_max,
                                      double tol) {
  return check_nonresonance(spec.selected_exponents(), k_max, tol);
}

NonResonanceReport check_nonresonance(const std::vector<cplx>& mu, int k_max,
                                      double tol) {
  if (k_max < 0 || k_max > 30) throw ConfigError("nonresonance: k_max must lie in [0, 30]");
  NonResonanceReport rep;
  rep.k_max = k_max;
  rep.tolerance = tol;
  const int d = static_cast<int>(mu.size());
  if (d == 0 || k_max == 0) return rep;
  KVec k(d, -k_max);
  for (;;) {
    if (std::any_of(k.begin(), k.end(), [](int v) { return v != 0; })) {
      cplx s = 0.0;
      for (int j = 0; j < d; ++j) s += static_cast<double>(k[j]) * mu[j];
      if (std::abs(s.real()) <= tol && dist_to_2pi_z(s.imag()) <= tol) {
        rep.violations_strong.push_back(k);
        if (std::abs(s) > tol) rep.violations_weak.push_back(k);
      }
    }
    int j = d - 1;
    while (j >= 0 && k[j] == k_max) k[j--] = -k_max;
    if (j < 0) break;
    ++k[j];
  }
  return rep;
}

TrackedExponents track_exponents(const std::vector<FloquetSpectrum>& spectra) {
  TrackedExponents t;
  if (spectra.empty()) return t;
  const int d = spectra.front().dim_d();
  t.tracked.push_back(spectra.front().selected_exponents());
  t.shift.push_back(std::vector<int>(d, 0));
  for (std::size_t i = 1; i < spectra.size(); ++i) {
    const std::vector<cplx> cur = spectra[i].selected_exponents();
    if (static_cast<int>(cur.size()) != d)
      throw DegeneracyError("floquet: dimension change along family");
    const std::vector<cplx>& prev = t.tracked.back();
    std::vector<cplx> out(d);
    std::vector<int> sh(d);
    std::vector<bool> used(d, false);
    for (int j = 0; j < d; ++j) {
      int best = -1, best_n = 0;
      double bd = INFINITY;
      for (int c = 0; c < d; ++c) {
        if (used[c]) continue;
        const int n = static_cast<int>(std::lround((prev[j].imag() - cur[c].imag()) / kTwoPi));
        const double dist = std::abs(cur[c] + kTwoPi * kI * static_cast<double>(n) - prev[j]);
        if (dist < bd) {
          bd = dist;
          best = c;
          best_n = n;
        }
      }
      used[best] = true;
      out[j] = cur[best] + kTwoPi * kI * static_cast<double>(best_n);
      sh[j] = best_n;
    }
    t.tracked.push_back(out);
    t.shift.push_back(sh);
  }
  return t;
}

}  // namespace bsq
