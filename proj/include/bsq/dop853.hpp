#pragma once

#include <array>
#include <functional>
#include <vector>

#include "bsq/types.hpp"

namespace bsq {

/// Right-hand side dy = f(t, y). May throw DomainError.
using OdeRhs = std::function<void(double, const Vec&, Vec&)>;

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double h_init = 0.0;     // 0 selects an automatic first step
  double h_max = 0.0;      // 0 means unbounded
  long max_steps = 2000000;
};

/// Degree-7 interpolant over one accepted step.
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec, 8> r;

  Vec eval(double t) const;
};

/// Piecewise dense output over the whole integration interval.
class DenseTrajectory {
 public:
  void push(DenseSegment seg) { segs_.push_back(std::move(seg)); }
  bool empty() const { return segs_.empty(); }
  double t_begin() const { return segs_.front().t0; }
  double t_end() const { return segs_.back().t0 + segs_.back().h; }
  const std::vector<DenseSegment>& segments() const { return segs_; }

  /// Clamped to [t_begin, t_end].
  Vec eval(double t) const;

 private:
  std::vector<DenseSegment> segs_;
};

struct OdeResult {
  Vec y;
  double t = 0.0;
  long steps = 0;
  long rejected = 0;
  DenseTrajectory dense;  // populated only when requested
};

/// Dormand-Prince 8(5,3) with step size control after Hairer-Norsett-Wanner.
/// Forward integration only (t1 >= t0).
OdeResult dop853(const OdeRhs& f, double t0, const Vec& y0, double t1,
                 const OdeOptions& opt, bool keep_dense = false);

}  // namespace bsq
