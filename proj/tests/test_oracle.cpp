#include <doctest.h>

#include <cmath>

#include "levicore/annulus.hpp"
#include "levicore/nelder_mead.hpp"

using namespace levicore;

namespace {

// independent 1-D quadrature + golden-section oracle for the L^1 norm:
// min over constants c of the area-weighted mean of |2 beta rho - c|
double l1_const_oracle(const AnnulusProblem& p) {
  const int n = 20001;
  const double h = (p.rho2 - p.rho1) / (n - 1);
  auto mean = [&](double c) {
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
      const double rho = p.rho1 + i * h;
      const double w = std::exp(2.0 * rho) * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
      num += w * std::abs(2.0 * p.beta * rho - c);
      den += w;
    }
    return num / den;
  };
  double a = -3 * p.beta, b = 3 * p.beta;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a), f1 = mean(x1), f2 = mean(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = mean(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = mean(x2);
    }
  }
  return mean(0.5 * (a + b));
}

}  // namespace

TEST_CASE("oracle: trivial class and positivity") {
  AnnulusProblem p;
  p.beta = 0.0;
  CHECK(annulus_norm_oracle(p).value == 0.0);
  p.beta = 0.7;
  CHECK(annulus_norm_oracle(p).value > 0.0);
}

TEST_CASE("oracle: homogeneity in the class") {
  AnnulusProblem p;
  p.beta = 0.6;
  const double v1 = annulus_norm_oracle(p).value;
  p.beta = 1.2;
  const double v2 = annulus_norm_oracle(p).value;
  CHECK(v2 / v1 == doctest::Approx(2.0).epsilon(5e-3));
}

TEST_CASE("oracle: mesh convergence and the Riccati closed form") {
  AnnulusProblem p;
  p.beta = 1.0;
  p.m = 64;
  const double v64 = annulus_norm_oracle(p).value;
  p.m = 128;
  const double v128 = annulus_norm_oracle(p).value;
  CHECK(std::abs(v64 - v128) <= 5e-3 * v128);
  CHECK(v128 == doctest::Approx(annulus_norm_closed_form(p)).epsilon(1e-2));
  CHECK(annulus_norm_closed_form(p) == doctest::Approx(2.0 / M_PI));
}

TEST_CASE("oracle rejects bad problems") {
  AnnulusProblem p;
  p.m = 8;
  CHECK_THROWS_AS((void)annulus_norm_oracle(p), CalcError);
  p.m = 64;
  p.rho2 = p.rho1;
  CHECK_THROWS_AS((void)annulus_norm_oracle(p), CalcError);
}

TEST_CASE("equality-profile seed reproduces its target ratio") {
  AnnulusProblem p;
  p.beta = 1.0;
  auto radial = make_radial_basis(2, 16, p.rho1, p.rho2);
  Eigen::VectorXd c = radial_equality_seed(p, *radial, 1.10);
  const double t = 1.10 * annulus_norm_closed_form(p);
  // check the pointwise radial ratio (4 b^2 + f'^2) / (-f'') of the fit
  for (double rho : {-0.45, -0.2, 0.0, 0.2, 0.45}) {
    Eigen::VectorXcd q(2);
    q << std::exp(rho), 0.0;
    Eigen::MatrixXcd G = radial->grads(q);
    auto H = radial->mixed_hessians(q);
    cplx fz = 0;
    double fzz = 0;
    for (int m = 0; m < c.size(); ++m) {
      fz += c(m) * G(m, 0);
      fzz += c(m) * H[m](0, 0).real();
    }
    const double fp = 2.0 * std::exp(rho) * fz.real();  // f'(rho) from f_z
    const double fpp = 4.0 * std::exp(2.0 * rho) * fzz; // f''(rho), radial f
    const double ratio = (4.0 * p.beta * p.beta + fp * fp) / (-fpp);
    CHECK(ratio == doctest::Approx(t).epsilon(0.02));
  }
}

TEST_CASE("oracle on an asymmetric-width annulus") {
  AnnulusProblem p;
  p.rho1 = -0.3;
  p.rho2 = 0.3;
  p.beta = 0.7;
  p.m = 128;
  CHECK(annulus_norm_oracle(p).value ==
        doctest::Approx(annulus_norm_closed_form(p)).epsilon(1e-2));
  CHECK(annulus_norm_closed_form(p) == doctest::Approx(2.0 * 0.7 * 0.6 / M_PI));
}

TEST_CASE("simplex optimizer basics") {
  // quadratic bowl with an offset minimum
  auto bowl = [](const Eigen::VectorXd& x) {
    return (x - Eigen::VectorXd::Constant(x.size(), 1.5)).squaredNorm();
  };
  NmResult r = nelder_mead(bowl, Eigen::VectorXd::Zero(4), 0.5, 2000);
  CHECK(r.f < 1e-10);
  CHECK((r.x - Eigen::VectorXd::Constant(4, 1.5)).norm() < 1e-4);

  // +inf plateaus are ordered last, not fatal
  auto gated = [&](const Eigen::VectorXd& x) {
    return x(0) < -2.0 ? std::numeric_limits<double>::infinity() : bowl(x);
  };
  NmResult g = nelder_mead_multistart(gated, 4, 6, 800, 0.5, 11);
  CHECK(g.f < 1e-8);

  // determinism under a fixed seed
  NmResult a = nelder_mead_multistart(bowl, 3, 5, 300, 0.4, 7);
  NmResult b = nelder_mead_multistart(bowl, 3, 5, 300, 0.4, 7);
  CHECK(a.f == b.f);
  CHECK((a.x - b.x).norm() == 0.0);
}

TEST_CASE("appendix norms: ordering, closed forms, basis stability") {
  AnnulusProblem p;
  p.beta = 1.0;
  AppendixNorms a8 = appendix_norms(p, 8, 800, 5);
  CHECK(a8.l1 <= a8.linf + 1e-12);
  // best constant fits: sup |2 rho| = 1 on [-1/2, 1/2]; L1 via quadrature
  CHECK(a8.linf == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(a8.l1 == doctest::Approx(l1_const_oracle(p)).epsilon(0.02));

  AppendixNorms a12 = appendix_norms(p, 12, 800, 5);
  CHECK(std::abs(a8.ratio - a12.ratio) <= 0.1 * a8.ratio);

  p.beta = 0.0;
  AppendixNorms a0 = appendix_norms(p, 4, 200, 5);
  CHECK(a0.l1 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(a0.linf == doctest::Approx(0.0).epsilon(1e-9));
}
