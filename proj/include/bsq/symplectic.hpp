#pragma once

#include "bsq/dynsys.hpp"
#include "bsq/types.hpp"

namespace bsq {

/// Omega(u, v) = u^T J v, so Omega(e_y, e_eta) = 1.
double omega(const Vec& u, const Vec& v);
cplx omega(const CVec& u, const CVec& v);

/// max_ij |(M^T J M - J)_ij|.
double symplectic_defect(const Mat& m);

/// Symplectic basis (e_1..e_d, f_1..f_d) of the complement N of
/// span{X_H, grad H} with Omega(e_i, f_j) = delta_ij.
struct SectionBasis {
  Mat e;  // 2n x d
  Mat f;  // 2n x d

  int dim_d() const { return static_cast<int>(e.cols()); }
  /// [e f], 2n x 2d
  Mat matrix() const;
  /// Section coordinates (a, b) of w: w = e a + f b modulo span{X, grad H}.
  Mat dual() const;
};

/// Omega-orthogonal projector onto N at z.
Mat section_projector(const HamiltonianSystem& sys, const Vec& z);

/// Pivoted symplectic Gram-Schmidt on projected coordinate vectors.
/// Throws DegeneracyError if X_H and grad H are degenerate at z.
SectionBasis section_basis(const HamiltonianSystem& sys, const Vec& z);

/// Basis at z continuously transported from `ref`: unpivoted symplectic
/// Gram-Schmidt of the projected reference vectors.
SectionBasis transported_basis(const HamiltonianSystem& sys, const Vec& z,
                               const SectionBasis& ref);

/// Section map dual(z1) * Z * basis(z0).matrix().
Mat reduce_with_bases(const Mat& z, const SectionBasis& from,
                      const SectionBasis& to);

}  // namespace bsq
