#pragma once

#include <vector>

#include "bsq/dynsys.hpp"
#include "bsq/orbit.hpp"
#include "bsq/types.hpp"

namespace bsq {

enum class FloquetClass { ee, hr, hc };
const char* class_name(FloquetClass c);

struct FloquetSpectrum {
  Mat section_monodromy;            // dP_E, 2d x 2d
  std::vector<cplx> multipliers;    // lambda_j, length 2d
  std::vector<cplx> exponents;      // principal logs mu_j
  std::vector<FloquetClass> classes;
  std::vector<double> krein;        // (1/2i) Omega(conj u, u), 0 off the circle
  std::vector<bool> first_kind;     // per multiplier, elliptic only
  std::vector<int> selected;        // d indices entering the action
  CMat eigenvectors;                // columns, section coordinates
  double pairing_residual = 0.0;
  double energy = 0.0;

  int dim_d() const { return static_cast<int>(multipliers.size() / 2); }
  std::vector<cplx> selected_exponents() const;
  bool has_elliptic() const;
};

struct NonResonanceReport {
  int k_max = 0;
  double tolerance = 0.0;
  std::vector<KVec> violations_weak;
  std::vector<KVec> violations_strong;

  bool clean() const { return violations_weak.empty() && violations_strong.empty(); }
};

/// Z(T) along the orbit from its base point.
Mat monodromy(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
              double tol = 1e-13);

/// dP_E in the symplectic section basis at the base point.
Mat reduce_to_section(const Mat& z, const PeriodicOrbit& orbit,
                      const HamiltonianSystem& sys);

FloquetSpectrum exponents_and_classes(const Mat& dp, double tol = 1e-6);

/// monodromy + reduce_to_section + exponents_and_classes.
FloquetSpectrum floquet_spectrum(const HamiltonianSystem& sys,
                                 const PeriodicOrbit& orbit,
                                 double flow_tol = 1e-13,
                                 double class_tol = 1e-6);

/// Exhaustive scan of k in Z^d, |k|_inf <= k_max, k != 0, over the selected
/// exponents.
NonResonanceReport check_nonresonance(const FloquetSpectrum& spec, int k_max,
                                      double tol);
NonResonanceReport check_nonresonance(const std::vector<cplx>& mu, int k_max,
                                      double tol);

/// Selected exponents followed continuously along a family. `shift[i][j]` is
/// the integer n with tracked = principal + 2 pi i n.
struct TrackedExponents {
  std::vector<std::vector<cplx>> tracked;
  std::vector<std::vector<int>> shift;
};
TrackedExponents track_exponents(const std::vector<FloquetSpectrum>& spectra);

}  // namespace bsq
