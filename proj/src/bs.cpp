#include "bsq/bs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "bsq/errors.hpp"
#include "bsq/parallel.hpp"

namespace bsq {

void BSConfig::validate() const {
  if (!(h > 0.0 && h <= 0.5)) throw ConfigError("h must lie in (0, 0.5]");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(eps0 > 0.0)) throw ConfigError("eps0 must be positive");
  if (!(k_cap_const > 0.0)) throw ConfigError("k_cap_const must be positive");
  if (!(newton_tol > 0.0)) throw ConfigError("newton tolerance must be positive");
  if (newton_max_iter < 1) throw ConfigError("newton_max_iter must be positive");
}

double BSConfig::depth() const { return std::pow(h, delta); }

int BSConfig::k_cap() const {
  return static_cast<int>(std::floor(k_cap_const * std::pow(h, delta - 1.0) + 1e-12));
}

bool BSConfig::in_window(cplx e, double slack) const {
  return e.real() >= e_center - eps0 - slack && e.real() <= e_center + eps0 + slack &&
         e.imag() <= slack && e.imag() >= -depth() - slack;
}

std::vector<KVec> enumerate_k(int d, int k_cap) {
  if (d < 1) throw ConfigError("lattice: d must be at least 1");
  std::vector<KVec> out;
  if (k_cap < 0) return out;
  KVec k(d, 0);
  for (;;) {
    out.push_back(k);
    int j = d - 1;
    for (; j >= 0; --j) {
      ++k[j];
      int s = 0;
      for (int v : k) s += v;
      if (s <= k_cap) break;
      k[j] = 0;
    }
    if (j < 0) break;
  }
  return out;
}

std::vector<LatticePoint> enumerate_lattice(const BSConfig& cfg, int d,
                                            int m_center) {
  cfg.validate();
  const int mm = static_cast<int>(std::floor(cfg.eps0 / cfg.h + 1e-12));
  const std::vector<KVec> ks = enumerate_k(d, cfg.k_cap());
  const double total = static_cast<double>(2 * mm + 1) * static_cast<double>(ks.size());
  if (total > static_cast<double>(cfg.lattice_cap))
    throw ConfigError("lattice: size exceeds lattice_cap");
  std::vector<LatticePoint> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int m = m_center - mm; m <= m_center + mm; ++m)
    for (const KVec& k : ks) out.push_back({m, k});
  return out;
}

cplx bs_function(const FamilyFit& fit, const BSConfig& cfg, int m,
                 const KVec& k, cplx e) {
  cplx kmu = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j)
    if (k[j] != 0) kmu += static_cast<double>(k[j]) * fit.mu_j(static_cast<int>(j), e);
  return fit.S0(e) - cfg.h * (fit.S1(e) + kmu / (kTwoPi * kI)) - m * cfg.h;
}

cplx bs_derivative(const FamilyFit& fit, const BSConfig& cfg, const KVec& k,
                   cplx e) {
  cplx kmu = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j)
    if (k[j] != 0) kmu += static_cast<double>(k[j]) * fit.dmu_j(static_cast<int>(j), e);
  return fit.dS0(e) - cfg.h * (fit.dS1(e) + kmu / (kTwoPi * kI));
}

Resonance solve_bs(const FamilyFit& fit, const BSConfig& cfg, int m,
                   const KVec& k, cplx seed) {
  if (static_cast<int>(k.size()) != fit.d)
    throw ConfigError("bs: label dimension differs from d");
  Resonance r;
  r.m = m;
  r.k = k;
  cplx e = seed;
  for (int it = 0;; ++it) {
    const cplx g = bs_function(fit, cfg, m, k, e);
    r.residual = std::abs(g) / cfg.h;
    if (r.residual <= cfg.newton_tol) {
      r.iters = it;
      break;
    }
    if (it >= cfg.newton_max_iter) throw ConvergenceError("bs: Newton did not converge");
    const cplx dg = bs_derivative(fit, cfg, k, e);
    if (!(std::abs(dg) > 1e-14)) throw DegeneracyError("bs: vanishing derivative");
    e -= g / dg;
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
      throw ConvergenceError("bs: Newton diverged");
  }
  r.energy = e;
  r.in_window = cfg.in_window(e);
  double k2 = 0.0;
  for (int v : k) k2 += static_cast<double>(v) * v;
  r.claimed_accuracy = cfg.accuracy_const * cfg.h * k2;
  return r;
}

double k0_seed(const FamilyFit& fit, const BSConfig& cfg, int m) {
  double e = cfg.e_center;
  for (int it = 0; it < 60; ++it) {
    const double f = fit.S0(e).real() - m * cfg.h - cfg.h * fit.S1(e).real();
    const double df = fit.dS0(e).real() - cfg.h * fit.dS1(e).real();
    if (!(std::abs(df) > 1e-14)) throw DegeneracyError("bs: flat action");
    const double step = f / df;
    e -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(e))) break;
  }
  return e;
}

namespace {

cplx k_shift(const FamilyFit& fit, const BSConfig& cfg, const KVec& k, cplx e) {
  cplx kmu = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j)
    kmu += static_cast<double>(k[j]) * fit.mu_j(static_cast<int>(j), e);
  return cfg.h * kmu / (kTwoPi * kI) / fit.dS0(e);
}

cplx seed_for(const FamilyFit& fit, const BSConfig& cfg, int m, const KVec& k,
              const std::map<int, cplx>& k0) {
  auto it = k0.find(m);
  const cplx base = it != k0.end() ? it->second : cplx(k0_seed(fit, cfg, m), 0.0);
  return base + k_shift(fit, cfg, k, base);
}

}  // namespace

std::vector<Resonance> sort_and_merge(std::vector<Resonance> rs, double tol) {
  std::sort(rs.begin(), rs.end(), [](const Resonance& a, const Resonance& b) {
    if (a.energy.real() != b.energy.real()) return a.energy.real() < b.energy.real();
    if (a.energy.imag() != b.energy.imag()) return a.energy.imag() < b.energy.imag();
    if (a.m != b.m) return a.m < b.m;
    return a.k < b.k;
  });
  std::vector<Resonance> out;
  for (Resonance& r : rs) {
    bool merged = false;
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      if (r.energy.real() - it->energy.real() > tol) break;
      if (std::abs(r.energy - it->energy) <= tol) {
        it->alt_labels.push_back({r.m, r.k});
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(std::move(r));
  }
  return out;
}

ResonanceSet compute_resonances(const FamilyFit& fit, const BSConfig& cfg,
                                bool nonres_clean, int threads) {
  cfg.validate();
  ResonanceSet set;
  const cplx e0 = cfg.e_center;
  set.m_center = static_cast<int>(
      std::lround((fit.S0(e0).real() - cfg.h * fit.S1(e0).real()) / cfg.h));
  const std::vector<LatticePoint> lattice = enumerate_lattice(cfg, fit.d, set.m_center);
  set.lattice_size = lattice.size();
  if (lattice.empty()) return set;

  // k = 0 string first: it seeds every other label with the same m
  const int mm = static_cast<int>(std::floor(cfg.eps0 / cfg.h + 1e-12));
  const KVec zero(fit.d, 0);
  std::map<int, cplx> k0;
  for (int m = set.m_center - mm; m <= set.m_center + mm; ++m) {
    try {
      k0[m] = solve_bs(fit, cfg, m, zero, k0_seed(fit, cfg, m)).energy;
    } catch (const Error&) {
    }
  }

  struct Slot {
    std::optional<Resonance> res;
    std::string err;
  };
  std::vector<Slot> slots(lattice.size());
  parallel_for(lattice.size(), threads, [&](std::size_t i) {
    const LatticePoint& p = lattice[i];
    try {
      slots[i].res = solve_bs(fit, cfg, p.m, p.k, seed_for(fit, cfg, p.m, p.k, k0));
    } catch (const Error& e) {
      slots[i].err = e.what();
    }
  });

  std::vector<Resonance> all;
  std::map<KVec, std::pair<int, int>> m_span;  // solved m range per k
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const LatticePoint& p = lattice[i];
    if (slots[i].res) {
      all.push_back(*slots[i].res);
    } else {
      set.skipped.push_back({p, slots[i].err});
    }
    auto [it, fresh] = m_span.try_emplace(p.k, p.m, p.m);
    if (!fresh) {
      it->second.first = std::min(it->second.first, p.m);
      it->second.second = std::max(it->second.second, p.m);
    }
  }

  // Transverse terms shift Re E; extend m per k until the string leaves the
  // window so that every window point is reached.
  for (const auto& [k, span] : m_span) {
    for (int dir : {-1, 1}) {
      int m = dir < 0 ? span.first : span.second;
      for (int step = 0; step < 100000; ++step) {
        m += dir;
        try {
          Resonance r = solve_bs(fit, cfg, m, k, seed_for(fit, cfg, m, k, k0));
          const double re = r.energy.real();
          const bool beyond = dir > 0 ? re > cfg.e_center + cfg.eps0 + 1e-10
                                      : re < cfg.e_center - cfg.eps0 - 1e-10;
          if (beyond) break;
          all.push_back(std::move(r));
        } catch (const Error&) {
          break;
        }
      }
    }
  }

  std::vector<Resonance> inside;
  for (Resonance& r : all) {
    r.warn_nonres = !nonres_clean;
    if (r.in_window) inside.push_back(std::move(r));
  }
  set.resonances = sort_and_merge(std::move(inside));
  return set;
}

}  // namespace bsq
