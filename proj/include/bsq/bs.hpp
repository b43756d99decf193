#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bsq/action.hpp"
#include "bsq/types.hpp"

namespace bsq {

struct BSConfig {
  double h = 0.05;
  double delta = 0.5;
  double eps0 = 0.25;
  double k_cap_const = 1.0;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  double e_center = 0.0;         // window is [e_center - eps0, e_center + eps0]
  std::size_t lattice_cap = 1000000;
  double accuracy_const = 1.0;   // claimed_accuracy = const * h * |k|^2

  void validate() const;
  double depth() const;          // h^delta
  int k_cap() const;             // floor(k_cap_const * h^(delta - 1))
  bool in_window(cplx e, double slack = 1e-10) const;
};

struct LatticePoint {
  int m = 0;
  KVec k;
};

struct Resonance {
  cplx energy = 0.0;
  int m = 0;
  KVec k;
  double residual = 0.0;
  int iters = 0;
  bool in_window = false;
  double claimed_accuracy = 0.0;
  bool warn_nonres = false;
  std::vector<LatticePoint> alt_labels;  // merged duplicates
};

/// k in Z_+^d with |k|_1 <= k_cap, ordered lexicographically.
std::vector<KVec> enumerate_k(int d, int k_cap);

/// m in [m_center - M, m_center + M], M = floor(eps0 / h); m ascending,
/// then k lexicographic.
std::vector<LatticePoint> enumerate_lattice(const BSConfig& cfg, int d,
                                            int m_center = 0);

/// G(E) = S0(E) - h [S1(E) + (1/2 pi i) sum_j k_j mu_j(E)] - m h.
cplx bs_function(const FamilyFit& fit, const BSConfig& cfg, int m,
                 const KVec& k, cplx e);
cplx bs_derivative(const FamilyFit& fit, const BSConfig& cfg, const KVec& k,
                   cplx e);

/// Complex Newton on G from `seed`.
Resonance solve_bs(const FamilyFit& fit, const BSConfig& cfg, int m,
                   const KVec& k, cplx seed);

/// Real root of S0(E) = m h + h Re S1(E), starting from cfg.e_center.
double k0_seed(const FamilyFit& fit, const BSConfig& cfg, int m);

struct SkippedPoint {
  LatticePoint label;
  std::string reason;
};

struct ResonanceSet {
  std::vector<Resonance> resonances;
  std::vector<SkippedPoint> skipped;
  int m_center = 0;
  std::size_t lattice_size = 0;
};

ResonanceSet compute_resonances(const FamilyFit& fit, const BSConfig& cfg,
                                bool nonres_clean = true, int threads = 1);

/// Sort by (Re, Im) and merge energies closer than `tol`.
std::vector<Resonance> sort_and_merge(std::vector<Resonance> rs,
                                      double tol = 1e-12);

}  // namespace bsq
