#pragma once

#include <vector>

#include "bsq/dynsys.hpp"
#include "bsq/floquet.hpp"
#include "bsq/orbit.hpp"
#include "bsq/types.hpp"

namespace bsq {

/// Lagrangian frame of the graph of the section path Psi(s):
/// C = (I + Psi)/2, B = J (I - Psi)/2, so C(0) = I, B(0) = 0, and C is
/// singular exactly when Psi(s) has eigenvalue -1 (a caustic).
struct LagrangianPath {
  std::vector<double> times;
  std::vector<Mat> psi;
  std::vector<Mat> c_mats;
  std::vector<Mat> b_mats;
  std::vector<double> caustics;
};

struct Caustic {
  double t = 0.0;
  int jump = 0;
};

struct IndexResult {
  int g = 0;
  double winding = 0.0;           // (1/4pi) total arg change of det U^2
  double principal_winding = 0.0; // same for the principal reference path
  double regular_winding = 0.0;   // winding minus the caustic jumps
  int jump_count = 0;             // signed eigenphase crossings of pi
  std::vector<Caustic> per_caustic;
  int g_mod4 = 0;
};

/// Frame for a given section path.
LagrangianPath path_from_psi(const std::vector<double>& times,
                             const std::vector<Mat>& psi);

/// Transports the section basis along the orbit; refines until the phase of
/// det U^2 moves by less than pi/2 between neighbours.
LagrangianPath plus_path(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
                         const FloquetSpectrum& spectrum, int n_samples,
                         double flow_tol = 1e-13);

/// Reference path Re(V exp(s mu / T) V^-1) built from principal exponents.
LagrangianPath principal_path(const FloquetSpectrum& spectrum, double period,
                              int n_samples);

/// Cayley transforms (C + iB)(C - iB)^{-1}.
std::vector<CMat> cayley(const LagrangianPath& path);
CMat cayley(const Mat& c, const Mat& b);

/// Compares the orbit path with the principal reference; g is the
/// calibrated winding difference, cross-checked against caustic jumps.
IndexResult cz_index(const LagrangianPath& path, const LagrangianPath& reference);

IndexResult compute_index(const HamiltonianSystem& sys, const PeriodicOrbit& orbit,
                          const FloquetSpectrum& spectrum, int n_samples = 64,
                          double flow_tol = 1e-13);

}  // namespace bsq
