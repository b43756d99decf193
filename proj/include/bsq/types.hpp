#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace bsq {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Transverse quantum numbers; entries are non-negative in resonance labels
/// but may be negative in non-resonance scans.
using KVec = std::vector<int>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

}  // namespace bsq
