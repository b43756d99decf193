#include "bsq/chebyshev.hpp"

#include <algorithm>
#include <cmath>

#include "bsq/errors.hpp"

namespace bsq {

Chebyshev Chebyshev::interpolate(double a, double b, const std::vector<double>& values) {
  return interpolate(a, b, std::vector<cplx>(values.begin(), values.end()));
}

Chebyshev Chebyshev::interpolate(double a, double b, const std::vector<cplx>& values) {
  const int n = static_cast<int>(values.size());
  if (n < 2) throw ConfigError("chebyshev: need at least 2 samples");
  if (!(a < b)) throw ConfigError("chebyshev: empty interval");
  const int nn = n - 1;
  // lobatto_grid is increasing: x_j = -cos(pi j / N), so f(cos(pi k / N)) = values[N-k]
  CVec c = CVec::Zero(n);
  for (int k = 0; k <= nn; ++k) {
    cplx sum = 0.0;
    for (int j = 0; j <= nn; ++j) {
      const double w = (j == 0 || j == nn) ? 0.5 : 1.0;
      sum += w * values[nn - j] * std::cos(kPi * j * k / nn);
    }
    c[k] = 2.0 / nn * sum;
  }
  c[0] *= 0.5;
  c[nn] *= 0.5;

  Chebyshev ch;
  ch.a_ = a;
  ch.b_ = b;
  ch.tail_ = nn >= 2 ? std::abs(c[nn - 1]) + std::abs(c[nn]) : 0.0;
  double scale = 0.0;
  for (int k = 0; k <= nn; ++k) scale = std::max(scale, std::abs(c[k]));
  int last = nn;
  while (last > 0 && std::abs(c[last]) <= 1e-13 * scale) --last;
  ch.c_ = c.head(last + 1);
  return ch;
}

cplx Chebyshev::operator()(cplx x) const {
  if (c_.size() == 0) return 0.0;
  const cplx t = (2.0 * x - (a_ + b_)) / (b_ - a_);
  cplx b1 = 0.0, b2 = 0.0;
  for (long k = c_.size() - 1; k >= 1; --k) {
    const cplx b0 = 2.0 * t * b1 - b2 + c_[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c_[0];
}

Chebyshev Chebyshev::derivative() const {
  Chebyshev d;
  d.a_ = a_;
  d.b_ = b_;
  const long n = c_.size();
  if (n <= 1) {
    d.c_ = CVec::Zero(1);
    return d;
  }
  CVec dc = CVec::Zero(n + 1);
  for (long k = n - 1; k >= 1; --k) dc[k - 1] = dc[k + 1] + 2.0 * static_cast<double>(k) * c_[k];
  dc[0] *= 0.5;
  d.c_ = dc.head(n - 1) * (2.0 / (b_ - a_));
  return d;
}

cplx Chebyshev::derivative(cplx x) const { return derivative()(x); }

}  // namespace bsq
