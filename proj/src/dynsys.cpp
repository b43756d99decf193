#include "bsq/dynsys.hpp"

#include <cmath>

#include <boost/math/tools/minima.hpp>

#include "bsq/errors.hpp"

namespace bsq {

Vec PhaseState::packed() const {
  Vec z(y.size() + eta.size());
  z << y, eta;
  return z;
}

PhaseState PhaseState::unpack(const Vec& z) {
  const long n = z.size() / 2;
  return {z.head(n), z.tail(n)};
}

Mat symplectic_j(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return j;
}

Mat fd_hessian(const VectorField& grad, const Vec& z) {
  const long m = z.size();
  Mat h(m, m);
  for (long i = 0; i < m; ++i) {
    const double step = 1e-5 * std::max(1.0, std::abs(z[i]));
    Vec zp = z, zm = z;
    zp[i] += step;
    zm[i] -= step;
    h.col(i) = (grad(zp) - grad(zm)) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

Mat HamiltonianSystem::hessian(const Vec& z) const {
  return hess_h0 ? hess_h0(z) : fd_hessian(grad_h0, z);
}

Vec HamiltonianSystem::vector_field(const Vec& z) const {
  const Vec g = grad_h0(z);
  const long n = dim_n;
  Vec v(2 * n);
  v.head(n) = g.tail(n);
  v.tail(n) = -g.head(n);
  return v;
}

SystemKind parse_kind(const std::string& name) {
  if (name == "model") return SystemKind::model;
  if (name == "hyperboloid") return SystemKind::hyperboloid;
  if (name == "coulomb_stark") return SystemKind::coulomb_stark;
  throw ConfigError("unknown system kind '" + name + "'");
}

std::string kind_name(SystemKind k) {
  switch (k) {
    case SystemKind::model: return "model";
    case SystemKind::hyperboloid: return "hyperboloid";
    case SystemKind::coulomb_stark: return "coulomb_stark";
    case SystemKind::callback: return "callback";
  }
  return "callback";
}

namespace {

// z = (t, x_1..x_d, tau, xi_1..xi_d)
HamiltonianSystem make_model(const std::vector<cplx>& coeffs) {
  const int d = static_cast<int>(coeffs.size());
  if (d < 1) throw ConfigError("model: need at least one coefficient");
  // hr: c real > 0 (block c x xi); ee: c = i w, w > 0 (block w (x^2+xi^2)/2)
  std::vector<double> cr(d, 0.0), om(d, 0.0);
  for (int j = 0; j < d; ++j) {
    const cplx c = coeffs[j];
    if (c == cplx(0.0, 0.0))
      throw ConfigError("model: coefficient c_" + std::to_string(j + 1) +
                        " is zero (degenerate Poincare map)");
    if (c.imag() == 0.0) {
      if (c.real() < 0.0)
        throw ConfigError("model: hyperbolic coefficient must be positive");
      cr[j] = c.real();
    } else if (c.real() == 0.0) {
      if (c.imag() < 0.0)
        throw ConfigError("model: elliptic frequency must be positive");
      om[j] = c.imag();
    } else {
      throw ConfigError(
          "model: coefficients must be purely real or purely imaginary");
    }
  }
  const int n = d + 1;
  HamiltonianSystem s;
  s.dim_n = n;
  s.kind = SystemKind::model;
  s.label = "model";
  s.model_coeffs = coeffs;
  s.angle_coords = {0};
  s.h0 = [=](const Vec& z) {
    double h = -z[n];
    for (int j = 0; j < d; ++j) {
      const double x = z[1 + j], xi = z[n + 1 + j];
      h += cr[j] * x * xi + 0.5 * om[j] * (x * x + xi * xi);
    }
    return h;
  };
  s.grad_h0 = [=](const Vec& z) {
    Vec g = Vec::Zero(2 * n);
    g[n] = -1.0;
    for (int j = 0; j < d; ++j) {
      const double x = z[1 + j], xi = z[n + 1 + j];
      g[1 + j] = cr[j] * xi + om[j] * x;
      g[n + 1 + j] = cr[j] * x + om[j] * xi;
    }
    return g;
  };
  s.hess_h0 = [=](const Vec&) {
    Mat hm = Mat::Zero(2 * n, 2 * n);
    for (int j = 0; j < d; ++j) {
      const int ix = 1 + j, ixi = n + 1 + j;
      hm(ix, ix) = om[j];
      hm(ixi, ixi) = om[j];
      hm(ix, ixi) = cr[j];
      hm(ixi, ix) = cr[j];
    }
    return hm;
  };
  return s;
}

// z = (u, v, eta_u, eta_v), metric cosh^2 v du^2 + cosh 2v dv^2
HamiltonianSystem make_hyperboloid() {
  HamiltonianSystem s;
  s.dim_n = 2;
  s.kind = SystemKind::hyperboloid;
  s.label = "hyperboloid";
  s.angle_coords = {0};
  s.h0 = [](const Vec& z) {
    const double cv = std::cosh(z[1]);
    return 0.5 * (z[2] * z[2] / (cv * cv) + z[3] * z[3] / std::cosh(2 * z[1]));
  };
  s.grad_h0 = [](const Vec& z) {
    const double v = z[1], cv = std::cosh(v), c2 = std::cosh(2 * v);
    const double a = 1.0 / (cv * cv), b = 1.0 / c2;
    const double da = -2.0 * std::sinh(v) / (cv * cv * cv);
    const double db = -2.0 * std::sinh(2 * v) / (c2 * c2);
    Vec g(4);
    g << 0.0, 0.5 * (da * z[2] * z[2] + db * z[3] * z[3]), a * z[2], b * z[3];
    return g;
  };
  s.hess_h0 = [](const Vec& z) {
    const double v = z[1], cv = std::cosh(v), sv = std::sinh(v);
    const double c2 = std::cosh(2 * v), s2 = std::sinh(2 * v);
    const double a = 1.0 / (cv * cv), b = 1.0 / c2;
    const double da = -2.0 * sv / (cv * cv * cv);
    const double db = -2.0 * s2 / (c2 * c2);
    const double dda = -2.0 * (cv * cv - 3.0 * sv * sv) / std::pow(cv, 4);
    const double ddb = -4.0 * (c2 * c2 - 2.0 * s2 * s2) / std::pow(c2, 3);
    Mat hm = Mat::Zero(4, 4);
    hm(1, 1) = 0.5 * (dda * z[2] * z[2] + ddb * z[3] * z[3]);
    hm(1, 2) = hm(2, 1) = da * z[2];
    hm(1, 3) = hm(3, 1) = db * z[3];
    hm(2, 2) = a;
    hm(3, 3) = b;
    return hm;
  };
  return s;
}

constexpr double kCoulombMinRadius = 1e-8;

double checked_radius(const Vec& y) {
  const double r = y.norm();
  if (!(r > kCoulombMinRadius))
    throw DomainError("coulomb_stark: collision with the nucleus");
  return r;
}

// z = (y, eta) in R^{2n}, n in {2, 3}
HamiltonianSystem make_coulomb_stark(double a, int n) {
  if (!(a > 0.0)) throw ConfigError("coulomb_stark: need a > 0");
  if (n != 2 && n != 3) throw ConfigError("coulomb_stark: dim must be 2 or 3");
  HamiltonianSystem s;
  s.dim_n = n;
  s.kind = SystemKind::coulomb_stark;
  s.label = "coulomb_stark";
  s.stark_a = a;
  s.h0 = [=](const Vec& z) {
    const Vec y = z.head(n);
    const double r = checked_radius(y);
    return z.tail(n).squaredNorm() + 1.0 / r + a * y[0];
  };
  s.grad_h0 = [=](const Vec& z) {
    const Vec y = z.head(n);
    const double r = checked_radius(y);
    Vec g(2 * n);
    g.head(n) = -y / (r * r * r);
    g[0] += a;
    g.tail(n) = 2.0 * z.tail(n);
    return g;
  };
  s.hess_h0 = [=](const Vec& z) {
    const Vec y = z.head(n);
    const double r = checked_radius(y);
    Mat hm = Mat::Zero(2 * n, 2 * n);
    hm.topLeftCorner(n, n) =
        (3.0 * y * y.transpose() - r * r * Mat::Identity(n, n)) /
        std::pow(r, 5);
    hm.bottomRightCorner(n, n) = 2.0 * Mat::Identity(n, n);
    return hm;
  };
  return s;
}

}  // namespace

HamiltonianSystem make_builtin(SystemKind kind, const BuiltinParams& p) {
  switch (kind) {
    case SystemKind::model: return make_model(p.coeffs);
    case SystemKind::hyperboloid: return make_hyperboloid();
    case SystemKind::coulomb_stark: return make_coulomb_stark(p.a, p.dim);
    case SystemKind::callback: break;
  }
  throw ConfigError("make_builtin: callback systems are not built in");
}

HamiltonianSystem make_builtin(const std::string& kind, const BuiltinParams& p) {
  return make_builtin(parse_kind(kind), p);
}

HamiltonianSystem make_callback_system(int n, ScalarField h0, VectorField grad,
                                       MatrixField hess, ScalarField h1,
                                       std::string label) {
  if (n < 2) throw ConfigError("system dimension must be at least 2");
  HamiltonianSystem s;
  s.dim_n = n;
  s.label = std::move(label);
  s.h0 = std::move(h0);
  s.grad_h0 = std::move(grad);
  s.hess_h0 = std::move(hess);
  s.h1 = std::move(h1);
  return s;
}

FlowResult flow(const HamiltonianSystem& sys, const PhaseState& start, double t,
                double tol, bool with_variational, bool keep_dense) {
  return flow(sys, start.packed(), t, tol, with_variational, keep_dense);
}

FlowResult flow(const HamiltonianSystem& sys, const Vec& z0, double t,
                double tol, bool with_variational, bool keep_dense) {
  if (!(tol >= 1e-14 && tol <= 1e-6))
    throw ConfigError("flow: tolerance must lie in [1e-14, 1e-6]");
  if (!(t >= 0.0)) throw ConfigError("flow: negative time");
  const long m = 2 * sys.dim_n;
  if (z0.size() != m) throw ConfigError("flow: state has wrong dimension");
  if (!z0.allFinite()) throw DomainError("flow: non-finite start state");

  OdeRhs rhs;
  Vec y0;
  if (with_variational) {
    y0.resize(m + m * m);
    y0.head(m) = z0;
    Eigen::Map<Mat>(y0.data() + m, m, m).setIdentity();
    rhs = [&sys, m](double, const Vec& y, Vec& dy) {
      const Vec z = y.head(m);
      dy.resize(y.size());
      dy.head(m) = sys.vector_field(z);
      const Mat hm = sys.hessian(z);
      const long n = m / 2;
      Mat jh(m, m);
      jh.topRows(n) = hm.bottomRows(n);
      jh.bottomRows(n) = -hm.topRows(n);
      Eigen::Map<const Mat> zm(y.data() + m, m, m);
      Eigen::Map<Mat>(dy.data() + m, m, m) = jh * zm;
    };
  } else {
    y0 = z0;
    rhs = [&sys](double, const Vec& y, Vec& dy) { dy = sys.vector_field(y); };
  }

  OdeOptions opt;
  opt.rtol = tol;
  opt.atol = tol;
  OdeResult r = dop853(rhs, 0.0, y0, t, opt, keep_dense);

  FlowResult out;
  const Vec zt = r.y.head(m);
  out.state = PhaseState::unpack(zt);
  out.time = r.t;
  out.energy_drift = std::abs(sys.energy(zt) - sys.energy(z0));
  if (with_variational)
    out.variational = Eigen::Map<const Mat>(r.y.data() + m, m, m);
  out.dense = std::move(r.dense);
  return out;
}

double coulomb_stark_threshold(double a) {
  if (!(a > 0.0)) throw ConfigError("coulomb_stark: need a > 0");
  auto v = [a](double r) { return 1.0 / r + a * r; };
  const double scale = 1.0 / std::sqrt(a);
  auto res = boost::math::tools::brent_find_minima(v, 1e-3 * scale,
                                                   1e3 * scale, 60);
  return res.second;
}

}  // namespace bsq
