#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace levicore {

using cplx = std::complex<double>;

/// Second-order Wirtinger jet: carries a value together with all first
/// derivatives d/dz_j, d/dzbar_j and the mixed second derivatives
/// d^2/dz_j dzbar_k of a scalar expression in (z, zbar). Holomorphic and
/// anti-holomorphic dependencies are tracked separately, so conj() is an
/// exact operation. Enough for gradients, complex Hessians and every
/// curvature quantity the library needs, to machine precision.
struct WJet {
  cplx v;
  Eigen::VectorXcd dz;   // d/dz_j
  Eigen::VectorXcd db;   // d/dzbar_j
  Eigen::MatrixXcd h;    // h(j,k) = d^2/dz_j dzbar_k

  WJet() = default;
  explicit WJet(int n)
      : v(0.0),
        dz(Eigen::VectorXcd::Zero(n)),
        db(Eigen::VectorXcd::Zero(n)),
        h(Eigen::MatrixXcd::Zero(n, n)) {}

  int n() const { return (int)dz.size(); }

  static WJet constant(cplx c, int n) {
    WJet j(n);
    j.v = c;
    return j;
  }
  // the ambient coordinate z_j as a jet
  static WJet var(cplx z, int j, int n) {
    WJet w(n);
    w.v = z;
    w.dz(j) = 1.0;
    return w;
  }
};

inline WJet operator+(const WJet& a, const WJet& b) {
  WJet r(a.n());
  r.v = a.v + b.v;
  r.dz = a.dz + b.dz;
  r.db = a.db + b.db;
  r.h = a.h + b.h;
  return r;
}
inline WJet operator-(const WJet& a, const WJet& b) {
  WJet r(a.n());
  r.v = a.v - b.v;
  r.dz = a.dz - b.dz;
  r.db = a.db - b.db;
  r.h = a.h - b.h;
  return r;
}
inline WJet operator-(const WJet& a) {
  WJet r(a.n());
  r.v = -a.v;
  r.dz = -a.dz;
  r.db = -a.db;
  r.h = -a.h;
  return r;
}
inline WJet operator*(const WJet& a, const WJet& b) {
  WJet r(a.n());
  r.v = a.v * b.v;
  r.dz = a.dz * b.v + b.dz * a.v;
  r.db = a.db * b.v + b.db * a.v;
  r.h = a.h * b.v + b.h * a.v + a.dz * b.db.transpose() + b.dz * a.db.transpose();
  return r;
}

inline WJet operator+(const WJet& a, cplx c) {
  WJet r = a;
  r.v += c;
  return r;
}
inline WJet operator+(cplx c, const WJet& a) { return a + c; }
inline WJet operator+(const WJet& a, double c) { return a + cplx(c); }
inline WJet operator+(double c, const WJet& a) { return a + cplx(c); }
inline WJet operator-(const WJet& a, cplx c) { return a + (-c); }
inline WJet operator-(const WJet& a, double c) { return a + cplx(-c); }
inline WJet operator-(cplx c, const WJet& a) { return (-a) + c; }
inline WJet operator-(double c, const WJet& a) { return (-a) + cplx(c); }
inline WJet operator*(const WJet& a, cplx c) {
  WJet r(a.n());
  r.v = a.v * c;
  r.dz = a.dz * c;
  r.db = a.db * c;
  r.h = a.h * c;
  return r;
}
inline WJet operator*(cplx c, const WJet& a) { return a * c; }
inline WJet operator*(const WJet& a, double c) { return a * cplx(c); }
inline WJet operator*(double c, const WJet& a) { return a * cplx(c); }

// chain rule for an analytic g applied to the jet: needs g(u), g'(u), g''(u)
inline WJet analytic_map(const WJet& a, cplx g0, cplx g1, cplx g2) {
  WJet r(a.n());
  r.v = g0;
  r.dz = g1 * a.dz;
  r.db = g1 * a.db;
  r.h = g1 * a.h + g2 * (a.dz * a.db.transpose());
  return r;
}

inline WJet exp(const WJet& a) {
  cplx e = std::exp(a.v);
  return analytic_map(a, e, e, e);
}
inline WJet log(const WJet& a) {
  return analytic_map(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}
inline WJet inv(const WJet& a) {
  cplx i1 = 1.0 / a.v;
  return analytic_map(a, i1, -i1 * i1, 2.0 * i1 * i1 * i1);
}
inline WJet operator/(const WJet& a, const WJet& b) { return a * inv(b); }
inline WJet operator/(const WJet& a, cplx c) { return a * (1.0 / c); }
inline WJet operator/(const WJet& a, double c) { return a * (1.0 / c); }
inline WJet operator/(cplx c, const WJet& a) { return inv(a) * c; }
inline WJet operator/(double c, const WJet& a) { return inv(a) * cplx(c); }

inline WJet conj(const WJet& a) {
  WJet r(a.n());
  r.v = std::conj(a.v);
  r.dz = a.db.conjugate();
  r.db = a.dz.conjugate();
  r.h = a.h.adjoint();  // d^2 conj(u)/dz_j dzbar_k = conj(h(k,j))
  return r;
}

inline WJet abs2(const WJet& a) { return a * conj(a); }
inline WJet real(const WJet& a) { return (a + conj(a)) * 0.5; }

inline WJet pow_int(const WJet& a, int k) {
  if (k < 0) return inv(pow_int(a, -k));
  WJet r = WJet::constant(1.0, a.n());
  WJet base = a;
  while (k > 0) {
    if (k & 1) r = r * base;
    base = base * base;
    k >>= 1;
  }
  return r;
}

// scalar fallbacks so domain expressions compile for plain complex too
inline cplx abs2(cplx a) { return a * std::conj(a); }
inline double value_re(const WJet& a) { return a.v.real(); }
inline double value_re(cplx a) { return a.real(); }
inline cplx pow_int(cplx a, int k) {
  if (k < 0) return 1.0 / pow_int(a, -k);
  cplx r = 1.0, base = a;
  while (k > 0) {
    if (k & 1) r *= base;
    base *= base;
    k >>= 1;
  }
  return r;
}

}  // namespace levicore
