#pragma once

#include <functional>
#include <vector>

#include "bsq/action.hpp"
#include "bsq/bs.hpp"
#include "bsq/types.hpp"

namespace bsq {

/// Model coefficients c_j: real for hyperbolic blocks, i*omega for elliptic.
struct ModelSpec {
  std::vector<cplx> coeffs;
  double h = 0.05;

  void validate() const;
  int dim_d() const { return static_cast<int>(coeffs.size()); }
};

/// nu_k(E) = exp(-2 pi i E / h) prod_j exp(pi c_j (1 + 2 k_j)).
cplx model_monodromy_eigenvalue(const ModelSpec& spec, cplx e, const KVec& k);

/// E = m h - i h sum_j c_j (k_j + 1/2) inside the window, with k ranging over
/// the lattice of `cfg` and m over all integers.
std::vector<Resonance> model_exact_resonances(const ModelSpec& spec,
                                              const BSConfig& cfg);

struct ZetaGrid {
  std::vector<cplx> z_nodes;
  std::vector<cplx> zeta_values;   // normalised |zeta| on the nodes
  std::vector<cplx> located_zeros;
  std::vector<double> residuals;   // normalised |zeta| at each zero
  std::vector<bool> unreliable;    // zero close to a window edge
  bool consistency_view = false;   // true when built from fitted data
};

/// Diagonal eigenvalues nu_k(z) of the truncated monodromy and their
/// logarithmic derivatives.
struct ZetaFactors {
  std::vector<KVec> labels;
  std::function<cplx(cplx, const KVec&)> nu;
  std::function<cplx(cplx, const KVec&)> dlog_nu;
};

ZetaFactors model_factors(const ModelSpec& spec, int n_degree);
/// exp(2 pi i (S0 - h S1)/h) prod_j exp(-k_j mu_j) from a family fit.
ZetaFactors fitted_factors(const FamilyFit& fit, double h, int n_degree);

/// zeros of prod_k (1 - nu_k) in the window of cfg, by cell-wise argument
/// principle and Newton refinement. n_degree must not exceed h^-delta.
ZetaGrid zeta_zeros(const ZetaFactors& f, const BSConfig& cfg, int n_degree);
ZetaGrid zeta_zeros(const ModelSpec& spec, const BSConfig& cfg, int n_degree);

}  // namespace bsq
