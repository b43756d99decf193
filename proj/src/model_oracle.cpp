#include "bsq/model_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "bsq/errors.hpp"

namespace bsq {

namespace {

double wrap(double a) {
  a = std::remainder(a, kTwoPi);
  return a <= -kPi ? a + kTwoPi : a;
}

cplx normalised_factor(cplx nu) { return (1.0 - nu) / std::max(1.0, std::abs(nu)); }

cplx normalised_zeta(const ZetaFactors& f, cplx z) {
  cplx p = 1.0;
  for (const KVec& k : f.labels) p *= normalised_factor(f.nu(z, k));
  return p;
}

// Winding of 1 - nu_k along the segment a -> b, bisecting large phase steps.
double segment_winding(const ZetaFactors& f, const KVec& k, cplx a, cplx b,
                       int depth = 0) {
  const double pa = std::arg(1.0 - f.nu(a, k));
  const double pb = std::arg(1.0 - f.nu(b, k));
  const double dp = wrap(pb - pa);
  if (std::abs(dp) <= 0.25 * kPi || depth >= 30) return dp;
  const cplx mid = 0.5 * (a + b);
  return segment_winding(f, k, a, mid, depth + 1) + segment_winding(f, k, mid, b, depth + 1);
}

int cell_winding(const ZetaFactors& f, const KVec& k, cplx lo, cplx hi) {
  const cplx c1 = lo, c2{hi.real(), lo.imag()}, c3 = hi, c4{lo.real(), hi.imag()};
  const double w = segment_winding(f, k, c1, c2) + segment_winding(f, k, c2, c3) +
                   segment_winding(f, k, c3, c4) + segment_winding(f, k, c4, c1);
  return static_cast<int>(std::lround(w / kTwoPi));
}

bool newton_factor(const ZetaFactors& f, const KVec& k, cplx& z, double scale) {
  for (int it = 0; it < 100; ++it) {
    const cplx nu = f.nu(z, k);
    const cplx dl = f.dlog_nu(z, k);
    // d/dz (1 - nu) = -nu * dlog nu
    const cplx step = (1.0 - nu) / (-nu * dl);
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    if (std::abs(step) <= 1e-15 * scale) return true;
  }
  return std::abs(1.0 - f.nu(z, k)) < 1e-12;
}

void search_cell(const ZetaFactors& f, const KVec& k, cplx lo, cplx hi,
                 int depth, double scale, std::vector<cplx>& out) {
  const int w = cell_winding(f, k, lo, hi);
  if (w == 0) return;
  if (w > 1 && depth < 6) {
    const cplx mid = 0.5 * (lo + hi);
    search_cell(f, k, lo, mid, depth + 1, scale, out);
    search_cell(f, k, {mid.real(), lo.imag()}, {hi.real(), mid.imag()}, depth + 1, scale, out);
    search_cell(f, k, {lo.real(), mid.imag()}, {mid.real(), hi.imag()}, depth + 1, scale, out);
    search_cell(f, k, mid, hi, depth + 1, scale, out);
    return;
  }
  if (w < 0) return;  // poles do not occur; negative winding is noise
  cplx z = 0.5 * (lo + hi);
  if (newton_factor(f, k, z, scale)) out.push_back(z);
}

}  // namespace

void ModelSpec::validate() const {
  if (coeffs.empty()) throw ConfigError("model: need at least one coefficient");
  if (!(h > 0.0)) throw ConfigError("model: h must be positive");
  for (const cplx& c : coeffs) {
    if (c == cplx(0.0, 0.0)) throw ConfigError("model: zero coefficient");
    if (c.real() != 0.0 && c.imag() != 0.0)
      throw ConfigError("model: coefficients must be purely real or purely imaginary");
    if (c.real() == 0.0 && c.imag() < 0.0)
      throw ConfigError("model: elliptic frequency must be positive");
  }
}

cplx model_monodromy_eigenvalue(const ModelSpec& spec, cplx e, const KVec& k) {
  cplx expo = -kTwoPi * kI * e / spec.h;
  for (int j = 0; j < spec.dim_d(); ++j)
    expo += kPi * spec.coeffs[j] * (1.0 + 2.0 * k.at(j));
  return std::exp(expo);
}

std::vector<Resonance> model_exact_resonances(const ModelSpec& spec,
                                              const BSConfig& cfg) {
  spec.validate();
  cfg.validate();
  const double h = spec.h;
  std::vector<Resonance> out;
  for (const KVec& k : enumerate_k(spec.dim_d(), cfg.k_cap())) {
    cplx shift = 0.0;
    for (int j = 0; j < spec.dim_d(); ++j)
      shift += -kI * h * spec.coeffs[j] * (k[j] + 0.5);
    const int m_lo = static_cast<int>(std::floor((cfg.e_center - cfg.eps0 - shift.real()) / h)) - 1;
    const int m_hi = static_cast<int>(std::ceil((cfg.e_center + cfg.eps0 - shift.real()) / h)) + 1;
    for (int m = m_lo; m <= m_hi; ++m) {
      const cplx e = m * h + shift;
      if (!cfg.in_window(e)) continue;
      Resonance r;
      r.energy = e;
      r.m = m;
      r.k = k;
      r.in_window = true;
      out.push_back(r);
    }
  }
  return sort_and_merge(std::move(out));
}

ZetaFactors model_factors(const ModelSpec& spec, int n_degree) {
  spec.validate();
  ZetaFactors f;
  f.labels = enumerate_k(spec.dim_d(), n_degree);
  f.nu = [spec](cplx z, const KVec& k) { return model_monodromy_eigenvalue(spec, z, k); };
  const double h = spec.h;
  f.dlog_nu = [h](cplx, const KVec&) { return -kTwoPi * kI / h; };
  return f;
}

ZetaFactors fitted_factors(const FamilyFit& fit, double h, int n_degree) {
  ZetaFactors f;
  f.labels = enumerate_k(fit.d, n_degree);
  f.nu = [&fit, h](cplx z, const KVec& k) {
    cplx l = kTwoPi * kI * (fit.S0(z) - h * fit.S1(z)) / h;
    for (std::size_t j = 0; j < k.size(); ++j)
      l -= static_cast<double>(k[j]) * fit.mu_j(static_cast<int>(j), z);
    return std::exp(l);
  };
  f.dlog_nu = [&fit, h](cplx z, const KVec& k) {
    cplx l = kTwoPi * kI * (fit.dS0(z) - h * fit.dS1(z)) / h;
    for (std::size_t j = 0; j < k.size(); ++j)
      l -= static_cast<double>(k[j]) * fit.dmu_j(static_cast<int>(j), z);
    return l;
  };
  return f;
}

ZetaGrid zeta_zeros(const ModelSpec& spec, const BSConfig& cfg, int n_degree) {
  return zeta_zeros(model_factors(spec, n_degree), cfg, n_degree);
}

ZetaGrid zeta_zeros(const ZetaFactors& f, const BSConfig& cfg, int n_degree) {
  cfg.validate();
  if (n_degree < 0) throw ConfigError("zeta: negative truncation degree");
  if (n_degree > std::pow(cfg.h, -cfg.delta) + 1e-12)
    throw ConfigError("zeta: truncation degree exceeds h^-delta");
  ZetaGrid g;
  const double h = cfg.h, depth = cfg.depth();
  const double cell = 0.25 * h;
  const double margin = 0.5 * h;
  // irrational offsets keep cell edges away from the zero lattice
  const double x0 = cfg.e_center - cfg.eps0 - margin + 0.2360679774997897 * cell;
  const double y1 = 0.3819660112501051 * cell;
  const int nx = static_cast<int>(std::ceil((2.0 * cfg.eps0 + 2.0 * margin) / cell));
  const int ny = static_cast<int>(std::ceil((depth + margin + y1) / cell));
  const double scale = std::max(1.0, std::abs(cfg.e_center) + cfg.eps0);

  for (int iy = 0; iy <= ny; ++iy)
    for (int ix = 0; ix <= nx; ++ix) {
      const cplx z{x0 + ix * cell, y1 - iy * cell};
      try {
        const cplx v = normalised_zeta(f, z);
        g.z_nodes.push_back(z);
        g.zeta_values.push_back(v);
      } catch (const DomainError&) {
      }
    }

  std::vector<cplx> raw;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const cplx lo{x0 + ix * cell, y1 - (iy + 1) * cell};
      const cplx hi{x0 + (ix + 1) * cell, y1 - iy * cell};
      for (const KVec& k : f.labels) {
        try {
          search_cell(f, k, lo, hi, 0, scale, raw);
        } catch (const DomainError&) {
        }
      }
    }

  std::sort(raw.begin(), raw.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (const cplx& z : raw) {
    if (!cfg.in_window(z)) continue;
    bool dup = false;
    for (const cplx& w : g.located_zeros)
      if (std::abs(w - z) <= 1e-10) dup = true;
    if (dup) continue;
    const double res = std::abs(normalised_zeta(f, z));
    if (res > 1e-10) continue;
    g.located_zeros.push_back(z);
    g.residuals.push_back(res);
    const double edge = 1e-8;
    g.unreliable.push_back(std::abs(z.real() - (cfg.e_center - cfg.eps0)) < edge ||
                           std::abs(z.real() - (cfg.e_center + cfg.eps0)) < edge ||
                           std::abs(z.imag() + depth) < edge);
  }
  return g;
}

}  // namespace bsq
