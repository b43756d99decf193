#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bsq/dop853.hpp"
#include "bsq/types.hpp"

namespace bsq {

/// A point (y, eta) of R^{2n}. Internally states are packed as z = (y, eta).
struct PhaseState {
  Vec y;
  Vec eta;

  Vec packed() const;
  static PhaseState unpack(const Vec& z);
};

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;

enum class SystemKind { model, hyperboloid, coulomb_stark, callback };

struct HamiltonianSystem {
  int dim_n = 0;
  std::string label;
  SystemKind kind = SystemKind::callback;
  ScalarField h0;
  VectorField grad_h0;
  MatrixField hess_h0;  // empty: finite differences of grad_h0
  ScalarField h1;       // empty: identically zero
  /// Position indices living on a circle of length 2*pi.
  std::vector<int> angle_coords;
  /// Model coefficients c_j; empty for other kinds.
  std::vector<cplx> model_coeffs;
  double stark_a = 0.0;

  int dim_d() const { return dim_n - 1; }
  int dim_phase() const { return 2 * dim_n; }
  double energy(const Vec& z) const { return h0(z); }
  Vec gradient(const Vec& z) const { return grad_h0(z); }
  Mat hessian(const Vec& z) const;
  double subprincipal(const Vec& z) const { return h1 ? h1(z) : 0.0; }
  /// Hamiltonian vector field J grad H.
  Vec vector_field(const Vec& z) const;
};

struct BuiltinParams {
  std::vector<cplx> coeffs;  // model
  double a = 1.0;            // coulomb_stark
  int dim = 2;               // coulomb_stark configuration dimension
};

SystemKind parse_kind(const std::string& name);
std::string kind_name(SystemKind k);

HamiltonianSystem make_builtin(SystemKind kind, const BuiltinParams& p);
HamiltonianSystem make_builtin(const std::string& kind, const BuiltinParams& p);

/// Generic system from user callbacks.
HamiltonianSystem make_callback_system(int n, ScalarField h0, VectorField grad,
                                       MatrixField hess = {},
                                       ScalarField h1 = {},
                                       std::string label = "callback");

/// Symmetrized central differences of grad, step 1e-5 * max(1, |z_i|).
Mat fd_hessian(const VectorField& grad, const Vec& z);

/// Standard symplectic matrix [[0, I], [-I, 0]] of size 2n.
Mat symplectic_j(int n);

struct FlowResult {
  PhaseState state;
  std::optional<Mat> variational;
  double time = 0.0;
  double energy_drift = 0.0;
  /// Dense output of the packed state (and Z columns when variational).
  DenseTrajectory dense;
};

/// Integrates Hamilton's equations for time t >= 0, optionally with the
/// variational matrix Z' = J H'' Z, Z(0) = I.
FlowResult flow(const HamiltonianSystem& sys, const PhaseState& start, double t,
                double tol, bool with_variational, bool keep_dense = false);
FlowResult flow(const HamiltonianSystem& sys, const Vec& z0, double t,
                double tol, bool with_variational, bool keep_dense = false);

/// Minimum over r > 0 of the axial effective potential 1/r + a r.
double coulomb_stark_threshold(double a);

}  // namespace bsq
