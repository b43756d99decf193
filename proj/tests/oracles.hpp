#pragma once

// Independent reference values used by the tests. Nothing here calls into
// the library; each function is a closed form or a third-party quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = 3.14159265358979323846;

struct Label {
  int m;
  std::vector<int> k;
  cplx e;
};

/// E = m h - i h sum c_j (k_j + 1/2) for k >= 0 with |k|_1 <= floor(kc h^(delta-1)),
/// kept when Re E is within eps0 of e_center and -h^delta <= Im E <= 0.
inline std::vector<Label> model_resonances(const std::vector<cplx>& c, double h, double eps0,
                                           double delta, double kc = 1.0,
                                           double e_center = 0.0) {
  const int d = static_cast<int>(c.size());
  const int kcap = static_cast<int>(std::floor(kc * std::pow(h, delta - 1.0) + 1e-12));
  const double depth = std::pow(h, delta);
  const double slack = 1e-10;
  std::vector<Label> out;
  std::vector<int> k(d, 0);
  // odometer over [0, kcap]^d
  while (true) {
    int sum = 0;
    for (int v : k) sum += v;
    if (sum <= kcap) {
      cplx shift = 0.0;
      for (int j = 0; j < d; ++j) shift += c[j] * (k[j] + 0.5);
      shift *= cplx(0.0, -h);
      const int m_lo = static_cast<int>(std::floor((e_center - eps0 - shift.real()) / h)) - 1;
      const int m_hi = static_cast<int>(std::ceil((e_center + eps0 - shift.real()) / h)) + 1;
      for (int m = m_lo; m <= m_hi; ++m) {
        const cplx e = m * h + shift;
        if (std::abs(e.real() - e_center) <= eps0 + slack && e.imag() <= slack &&
            e.imag() >= -depth - slack)
          out.push_back({m, k, e});
      }
    }
    int j = 0;
    while (j < d && ++k[j] > kcap) k[j++] = 0;
    if (j == d) break;
  }
  std::sort(out.begin(), out.end(), [](const Label& a, const Label& b) {
    // ties only for merged labels, absent in the closed form
    if (a.e.real() != b.e.real()) return a.e.real() < b.e.real();
    return a.e.imag() < b.e.imag();
  });
  return out;
}

/// Roots of 1/r + a r = E.
inline std::pair<double, double> stark_turning_radii(double a, double e) {
  const double disc = std::sqrt(e * e - 4.0 * a);
  return {(e - disc) / (2.0 * a), (e + disc) / (2.0 * a)};
}

/// (1/pi) int_{r1}^{r2} sqrt(E - 1/r - a r) dr for H = |eta|^2 + V.
inline double stark_axial_action(double a, double e) {
  const auto [r1, r2] = stark_turning_radii(a, e);
  boost::math::quadrature::tanh_sinh<double> q;
  const double v = q.integrate(
      [&](double r) { return std::sqrt(std::max(0.0, e - 1.0 / r - a * r)); }, r1, r2);
  return v / pi;
}

/// Period of the axial libration, dt = dr / (2 |eta|) with |eta| = sqrt(E - V).
/// With r = r1 + (r2 - r1) sin^2(th) the half period becomes
/// int_0^{pi/2} sqrt(r / a) dth, which has no endpoint singularity.
inline double stark_axial_period(double a, double e) {
  const auto [r1, r2] = stark_turning_radii(a, e);
  boost::math::quadrature::tanh_sinh<double> q;
  const double v = q.integrate(
      [&](double th) {
        const double s = std::sin(th);
        return std::sqrt((r1 + (r2 - r1) * s * s) / a);
      },
      0.0, pi / 2);
  return 2.0 * v;
}

/// Neck geodesic of x^2 + y^2 - z^2 = 1: length 2 pi, speed sqrt(2E).
inline double neck_action(double e) { return std::sqrt(2.0 * e); }
inline double neck_period(double e) { return 2.0 * pi / std::sqrt(2.0 * e); }

/// Jacobi field J'' = J (curvature -1) over arclength L: the monodromy is
/// [[cosh L, sinh L], [sinh L, cosh L]], eigenvalues exp(+-L). Integrated
/// here with classical RK4 so the value does not rest on the closed form.
inline double jacobi_multiplier(double length, int steps = 20000) {
  auto rhs = [](const std::array<double, 4>& s) {
    return std::array<double, 4>{s[1], s[0], s[3], s[2]};
  };
  std::array<double, 4> s{1.0, 0.0, 0.0, 1.0};  // columns (J, J') of the fundamental matrix
  const double dt = length / steps;
  for (int i = 0; i < steps; ++i) {
    auto add = [](const std::array<double, 4>& a, const std::array<double, 4>& b, double f) {
      return std::array<double, 4>{a[0] + f * b[0], a[1] + f * b[1], a[2] + f * b[2], a[3] + f * b[3]};
    };
    const auto k1 = rhs(s);
    const auto k2 = rhs(add(s, k1, dt / 2));
    const auto k3 = rhs(add(s, k2, dt / 2));
    const auto k4 = rhs(add(s, k3, dt));
    for (int j = 0; j < 4; ++j) s[j] += dt / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  // matrix [[s0, s2], [s1, s3]]
  const double tr = s[0] + s[3], det = s[0] * s[3] - s[1] * s[2];
  return tr / 2 + std::sqrt(tr * tr / 4 - det);
}

/// k in Z^d, 0 < |k|_inf <= kmax, with sum k_j mu_j in 2 pi i Z (within tol).
/// `strong` keeps sums that vanish too.
inline std::vector<std::vector<int>> resonant_k(const std::vector<cplx>& mu, int kmax, double tol,
                                                bool strong) {
  const int d = static_cast<int>(mu.size());
  std::vector<std::vector<int>> out;
  std::vector<int> k(d, -kmax);
  while (true) {
    bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
    if (!zero) {
      cplx s = 0.0;
      for (int j = 0; j < d; ++j) s += double(k[j]) * mu[j];
      const double n = std::round(s.imag() / (2 * pi));
      const bool member = std::abs(s.real()) <= tol && std::abs(s.imag() - 2 * pi * n) <= tol;
      if (member && (strong || std::abs(s) > tol)) out.push_back(k);
    }
    int j = 0;
    while (j < d && ++k[j] > kmax) k[j++] = -kmax;
    if (j == d) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
