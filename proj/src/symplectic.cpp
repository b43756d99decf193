#include "bsq/symplectic.hpp"

#include <cmath>

#include "bsq/errors.hpp"

namespace bsq {

namespace {

Vec apply_j(const Vec& v) {
  const long n = v.size() / 2;
  Vec w(v.size());
  w.head(n) = v.tail(n);
  w.tail(n) = -v.head(n);
  return w;
}

// v <- v - Omega(v, f) e + Omega(v, e) f
void omega_orthogonalize(Vec& v, const Vec& e, const Vec& f) {
  const double vf = omega(v, f), ve = omega(v, e);
  v += -vf * e + ve * f;
}

}  // namespace

double omega(const Vec& u, const Vec& v) { return u.dot(apply_j(v)); }

cplx omega(const CVec& u, const CVec& v) {
  const long n = v.size() / 2;
  CVec w(v.size());
  w.head(n) = v.tail(n);
  w.tail(n) = -v.head(n);
  return (u.transpose() * w)(0, 0);
}

double symplectic_defect(const Mat& m) {
  const Mat j = symplectic_j(static_cast<int>(m.rows() / 2));
  return (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
}

Mat SectionBasis::matrix() const {
  Mat b(e.rows(), 2 * e.cols());
  b << e, f;
  return b;
}

Mat SectionBasis::dual() const {
  const Mat j = symplectic_j(static_cast<int>(e.rows() / 2));
  Mat d(2 * e.cols(), e.rows());
  d.topRows(e.cols()) = f.transpose() * j.transpose();
  d.bottomRows(e.cols()) = e.transpose() * j;
  return d;
}

Mat section_projector(const HamiltonianSystem& sys, const Vec& z) {
  const Vec g = sys.gradient(z);
  const Vec x = sys.vector_field(z);
  const double xg = omega(x, g);
  if (!(std::abs(xg) > 1e-14))
    throw DegeneracyError("section: grad H vanishes (non-regular level)");
  const long m = z.size();
  // P_L v = alpha X + beta G, alpha = Omega(v,G)/Omega(X,G),
  // beta = -Omega(v,X)/Omega(X,G)
  const Mat j = symplectic_j(static_cast<int>(m / 2));
  const Vec jg = j * g, jx = j * x;
  Mat pl = (x * jg.transpose() - g * jx.transpose()) / xg;
  return Mat::Identity(m, m) - pl;
}

SectionBasis section_basis(const HamiltonianSystem& sys, const Vec& z) {
  const int n = sys.dim_n, d = n - 1;
  const Mat p = section_projector(sys, z);
  std::vector<Vec> cand;
  std::vector<bool> position;
  for (int i = 0; i < 2 * n; ++i) {
    cand.push_back(p.col(i));
    position.push_back(i < n);
  }
  SectionBasis b;
  b.e.resize(2 * n, d);
  b.f.resize(2 * n, d);
  const double scale = p.cwiseAbs().maxCoeff();
  for (int k = 0; k < d; ++k) {
    // e: largest remaining vector, position-type first
    int ie = -1;
    double best = 1e-8 * scale;
    for (int pass = 0; pass < 2 && ie < 0; ++pass) {
      for (std::size_t i = 0; i < cand.size(); ++i) {
        if (pass == 0 && !position[i]) continue;
        const double nv = cand[i].norm();
        if (nv > best) {
          best = nv;
          ie = static_cast<int>(i);
        }
      }
    }
    if (ie < 0) throw DegeneracyError("section: cannot build symplectic basis");
    Vec e = cand[ie] / cand[ie].norm();
    cand.erase(cand.begin() + ie);
    position.erase(position.begin() + ie);
    int jf = -1;
    double wbest = 1e-10;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      const double w = std::abs(omega(e, cand[i]));
      if (w > wbest) {
        wbest = w;
        jf = static_cast<int>(i);
      }
    }
    if (jf < 0) throw DegeneracyError("section: no symplectic partner found");
    Vec f = cand[jf] / omega(e, cand[jf]);
    cand.erase(cand.begin() + jf);
    position.erase(position.begin() + jf);
    for (auto& v : cand) omega_orthogonalize(v, e, f);
    b.e.col(k) = e;
    b.f.col(k) = f;
  }
  return b;
}

SectionBasis transported_basis(const HamiltonianSystem& sys, const Vec& z,
                               const SectionBasis& ref) {
  const Mat p = section_projector(sys, z);
  const int d = ref.dim_d();
  SectionBasis b;
  b.e = p * ref.e;
  b.f = p * ref.f;
  for (int k = 0; k < d; ++k) {
    const double w = omega(Vec(b.e.col(k)), Vec(b.f.col(k)));
    if (!(std::abs(w) > 1e-12))
      throw DegeneracyError("section: transported basis lost symplecticity");
    b.f.col(k) /= w;
    const Vec e = b.e.col(k), f = b.f.col(k);
    for (int l = k + 1; l < d; ++l) {
      Vec v = b.e.col(l);
      omega_orthogonalize(v, e, f);
      b.e.col(l) = v;
      v = b.f.col(l);
      omega_orthogonalize(v, e, f);
      b.f.col(l) = v;
    }
  }
  return b;
}

Mat reduce_with_bases(const Mat& z, const SectionBasis& from,
                      const SectionBasis& to) {
  return to.dual() * z * from.matrix();
}

}  // namespace bsq
