#include "levicore/gauge.hpp"

#include <cmath>

namespace levicore {

WJet GaugeBasis::gauge_jet(const Eigen::VectorXcd& p, const Eigen::VectorXd& coeff) const {
  if ((int)coeff.size() != count())
    throw CalcError("gauge coefficient count does not match the basis");
  const int n = ambient();
  WJet f(n);
  Eigen::VectorXd v = values(p);
  Eigen::MatrixXcd g = grads(p);
  auto H = mixed_hessians(p);
  for (int m = 0; m < count(); ++m) {
    if (coeff(m) == 0.0) continue;
    f.v += coeff(m) * v(m);
    f.dz += coeff(m) * g.row(m).transpose();
    f.h += coeff(m) * H[m];
  }
  f.db = f.dz.conjugate();  // real-valued gauge
  return f;
}

double GaugeBasis::gauge_value(const Eigen::VectorXcd& p, const Eigen::VectorXd& coeff) const {
  if ((int)coeff.size() != count())
    throw CalcError("gauge coefficient count does not match the basis");
  return coeff.dot(values(p));
}

double GaugeBasis::gram_condition(const std::vector<Eigen::VectorXcd>& pts) const {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(count(), count());
  for (const auto& p : pts) {
    Eigen::VectorXd v = values(p);
    G += v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
}

namespace {

// ---- polynomials in the scaled real coordinates --------------------------

class PolyBasis final : public GaugeBasis {
 public:
  PolyBasis(int n, int maxDeg, double s0) : n_(n), s0_(s0) {
    // all multi-indices over 2n variables with 1 <= |a| <= maxDeg
    std::vector<int> a(2 * n, 0);
    enumerate(a, 0, maxDeg);
  }
  std::string id() const override { return "poly:" + std::to_string(deg_); }
  int count() const override { return (int)exps_.size(); }
  int ambient() const override { return n_; }

  Eigen::VectorXd values(const Eigen::VectorXcd& p) const override {
    Eigen::VectorXd t = coords(p);
    Eigen::VectorXd v(count());
    for (int m = 0; m < count(); ++m) v(m) = mono(t, exps_[m]);
    return v;
  }

  Eigen::MatrixXcd grads(const Eigen::VectorXcd& p) const override {
    Eigen::VectorXd t = coords(p);
    Eigen::MatrixXcd g(count(), n_);
    for (int m = 0; m < count(); ++m)
      for (int j = 0; j < n_; ++j) {
        const double dx = dmono(t, exps_[m], 2 * j) / s0_;
        const double dy = dmono(t, exps_[m], 2 * j + 1) / s0_;
        g(m, j) = 0.5 * cplx(dx, -dy);
      }
    return g;
  }

  std::vector<Eigen::MatrixXcd> mixed_hessians(const Eigen::VectorXcd& p) const override {
    Eigen::VectorXd t = coords(p);
    std::vector<Eigen::MatrixXcd> out(count(), Eigen::MatrixXcd(n_, n_));
    for (int m = 0; m < count(); ++m)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) {
          const double xx = d2mono(t, exps_[m], 2 * j, 2 * k);
          const double yy = d2mono(t, exps_[m], 2 * j + 1, 2 * k + 1);
          const double xy = d2mono(t, exps_[m], 2 * j, 2 * k + 1);
          const double yx = d2mono(t, exps_[m], 2 * j + 1, 2 * k);
          out[m](j, k) = 0.25 * cplx(xx + yy, xy - yx) / (s0_ * s0_);
        }
    return out;
  }

 private:
  void enumerate(std::vector<int>& a, int pos, int degLeft) {
    if (pos == (int)a.size()) {
      int tot = 0;
      for (int e : a) tot += e;
      if (tot >= 1) {
        exps_.push_back(a);
        deg_ = std::max(deg_, tot);
      }
      return;
    }
    for (int e = 0; e <= degLeft; ++e) {
      a[pos] = e;
      enumerate(a, pos + 1, degLeft - e);
    }
    a[pos] = 0;
  }
  Eigen::VectorXd coords(const Eigen::VectorXcd& p) const {
    Eigen::VectorXd t(2 * n_);
    for (int j = 0; j < n_; ++j) {
      t(2 * j) = p(j).real() / s0_;
      t(2 * j + 1) = p(j).imag() / s0_;
    }
    return t;
  }
  static double mono(const Eigen::VectorXd& t, const std::vector<int>& a) {
    double v = 1.0;
    for (int i = 0; i < t.size(); ++i)
      for (int e = 0; e < a[i]; ++e) v *= t(i);
    return v;
  }
  static double dmono(const Eigen::VectorXd& t, std::vector<int> a, int i) {
    if (a[i] == 0) return 0.0;
    const double c = a[i];
    a[i] -= 1;
    return c * mono(t, a);
  }
  static double d2mono(const Eigen::VectorXd& t, std::vector<int> a, int i, int j) {
    if (a[i] == 0) return 0.0;
    const double c = a[i];
    a[i] -= 1;
    return c * dmono(t, a, j);
  }

  int n_;
  double s0_;
  int deg_ = 0;
  std::vector<std::vector<int>> exps_;
};

// ---- radial Chebyshev family ----------------------------------------------

class RadialBasis final : public GaugeBasis {
 public:
  RadialBasis(int n, int count, double rho1, double rho2)
      : n_(n), m_(count), rho1_(rho1), rho2_(rho2) {}
  std::string id() const override { return "radial:" + std::to_string(m_); }
  int count() const override { return m_; }
  int ambient() const override { return n_; }

  // T_k(xi), xi = (2 rho - rho1 - rho2)/(rho2 - rho1), rho = log|z_1|
  Eigen::VectorXd values(const Eigen::VectorXcd& p) const override {
    auto [xi, T, dT, d2T] = cheb(p);
    (void)dT;
    (void)d2T;
    Eigen::VectorXd v(m_);
    for (int k = 0; k < m_; ++k) v(k) = T[k + 1];
    return v;
  }

  Eigen::MatrixXcd grads(const Eigen::VectorXcd& p) const override {
    auto [xi, T, dT, d2T] = cheb(p);
    (void)T;
    (void)d2T;
    const double xiR = 2.0 / (rho2_ - rho1_);  // d xi/d rho
    const cplx rz = 0.5 / p(0);                // d rho/d z_1
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m_, n_);
    for (int k = 0; k < m_; ++k) g(k, 0) = dT[k + 1] * xiR * rz;
    return g;
  }

  std::vector<Eigen::MatrixXcd> mixed_hessians(const Eigen::VectorXcd& p) const override {
    auto [xi, T, dT, d2T] = cheb(p);
    (void)T;
    const double xiR = 2.0 / (rho2_ - rho1_);
    // rho = (log z + log zbar)/2 has zero mixed Hessian, so only phi'' survives
    const double rr = 1.0 / (4.0 * std::norm(p(0)));  // rho_z * rho_zbar
    std::vector<Eigen::MatrixXcd> out(m_, Eigen::MatrixXcd::Zero(n_, n_));
    for (int k = 0; k < m_; ++k) out[k](0, 0) = d2T[k + 1] * xiR * xiR * rr;
    return out;
  }

 private:
  std::tuple<double, std::vector<double>, std::vector<double>, std::vector<double>> cheb(
      const Eigen::VectorXcd& p) const {
    const double rho = std::log(std::abs(p(0)));
    const double xi = (2.0 * rho - rho1_ - rho2_) / (rho2_ - rho1_);
    std::vector<double> T(m_ + 1), dT(m_ + 1), d2T(m_ + 1);
    T[0] = 1;
    dT[0] = 0;
    d2T[0] = 0;
    if (m_ >= 1) {
      T[1] = xi;
      dT[1] = 1;
      d2T[1] = 0;
    }
    for (int k = 2; k <= m_; ++k) {
      T[k] = 2 * xi * T[k - 1] - T[k - 2];
      dT[k] = 2 * T[k - 1] + 2 * xi * dT[k - 1] - dT[k - 2];
      d2T[k] = 4 * dT[k - 1] + 2 * xi * d2T[k - 1] - d2T[k - 2];
    }
    return {xi, T, dT, d2T};
  }

  int n_, m_;
  double rho1_, rho2_;
};

}  // namespace

std::unique_ptr<GaugeBasis> make_poly_basis(int n, int maxDeg, double s0) {
  return std::make_unique<PolyBasis>(n, maxDeg, s0);
}

std::unique_ptr<GaugeBasis> make_radial_basis(int n, int count, double rho1, double rho2) {
  return std::make_unique<RadialBasis>(n, count, rho1, rho2);
}

std::unique_ptr<GaugeBasis> make_basis(const std::string& spec, int n, double s0, double rho1,
                                       double rho2) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const int arg = colon == std::string::npos ? 0 : std::stoi(spec.substr(colon + 1));
  if (kind == "poly") return make_poly_basis(n, arg > 0 ? arg : 4, s0);
  if (kind == "radial") {
    if (rho2 <= rho1) throw CalcError("radial basis needs an annulus range");
    return make_radial_basis(n, arg > 0 ? arg : 16, rho1, rho2);
  }
  throw CalcError("unknown gauge basis spec: " + spec);
}

}  // namespace levicore
