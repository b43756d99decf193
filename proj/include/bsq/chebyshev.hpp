#pragma once

#include <vector>

#include "bsq/types.hpp"

namespace bsq {

/// Chebyshev expansion on [a, b] with complex coefficients, evaluable at
/// complex arguments.
class Chebyshev {
 public:
  Chebyshev() = default;

  /// Interpolates values sampled at lobatto_grid(a, b, n); trailing
  /// coefficients below 1e-13 of the largest are dropped.
  static Chebyshev interpolate(double a, double b, const std::vector<cplx>& values);
  static Chebyshev interpolate(double a, double b, const std::vector<double>& values);

  cplx operator()(cplx x) const;
  cplx derivative(cplx x) const;
  Chebyshev derivative() const;

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  /// |c_{N-1}| + |c_N| of the untruncated interpolant.
  double tail() const { return tail_; }
  const CVec& coefficients() const { return c_; }
  double lower() const { return a_; }
  double upper() const { return b_; }

 private:
  double a_ = -1.0, b_ = 1.0;
  CVec c_;
  double tail_ = 0.0;
};

}  // namespace bsq
