#include <doctest.h>

#include <random>

#include "levicore/domains.hpp"

using namespace levicore;

namespace {

Eigen::VectorXcd pt2(cplx a, cplx b) {
  Eigen::VectorXcd p(2);
  p << a, b;
  return p;
}

// closed-form worm derivatives, the independent oracle for the AD path:
// r = |w|^2 - w e^{-ih} - wbar e^{ih}, h = beta log|z|^2 (cap-free region)
struct WormSymbolic {
  double beta;
  cplx hz(cplx z) const { return beta / z; }
  cplx phase(cplx z) const { return std::exp(cplx(0, 2.0 * beta * std::log(std::abs(z)))); }
  Eigen::VectorXcd grad(const Eigen::VectorXcd& p) const {
    const cplx z = p(0), w = p(1), eih = phase(z);
    Eigen::VectorXcd g(2);
    g(0) = cplx(0, 1) * hz(z) * (w * std::conj(eih) - std::conj(w) * eih);
    g(1) = std::conj(w) - std::conj(eih);
    return g;
  }
  Eigen::MatrixXcd hessCoeff(const Eigen::VectorXcd& p) const {
    const cplx z = p(0), w = p(1), eih = phase(z);
    Eigen::MatrixXcd C(2, 2);
    C(0, 0) = std::norm(hz(z)) * (w * std::conj(eih) + std::conj(w) * eih);
    C(0, 1) = -cplx(0, 1) * hz(z) * eih;
    C(1, 0) = cplx(0, 1) * std::conj(hz(z)) * std::conj(eih);
    C(1, 1) = 1.0;
    return C;
  }
};

}  // namespace

TEST_CASE("grad10: monomial domains") {
  auto ball = make_domain("ball");
  Eigen::VectorXcd g = grad10(ball.f, pt2(1, 0));
  CHECK((g - pt2(1, 0)).norm() < 1e-14);

  auto quartic = make_domain("quartic");
  g = grad10(quartic.f, pt2(0, 1));
  CHECK((g - pt2(0, 1)).norm() < 1e-14);
}

TEST_CASE("grad10/hess: worm against the symbolic oracle") {
  auto worm = make_domain("worm", {{"beta", 1.0}});
  WormSymbolic sym{1.0};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  for (int i = 0; i < 40; ++i) {
    const double rho = u(rng), th = 7.0 * u(rng);
    Eigen::VectorXcd p = pt2(std::polar(std::exp(rho), th), cplx(u(rng), u(rng)));
    CHECK((grad10(worm.f, p) - sym.grad(p)).norm() < 1e-8);
    CHECK((hess_coeff(worm.f, p) - sym.hessCoeff(p)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("dual and finite-difference backends agree") {
  for (const char* name : {"ball", "quartic", "worm"}) {
    auto dom = make_domain(name);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int done = 0;
    while (done < 25) {
      Eigen::VectorXd x(2 * dom.f.n);
      for (int d = 0; d < x.size(); ++d)
        x(d) = dom.f.box.lo(d) + (dom.f.box.hi(d) - dom.f.box.lo(d)) * u(rng);
      Eigen::VectorXcd p = to_complex(x);
      if (!dom.f.is_valid(p)) continue;
      ++done;
      CHECK((grad10(dom.f, p, DerivBackend::Dual) - grad10(dom.f, p, DerivBackend::FiniteDiff))
                .norm() < 1e-5);
      CHECK((hess_coeff(dom.f, p, DerivBackend::Dual) -
             hess_coeff(dom.f, p, DerivBackend::FiniteDiff))
                .cwiseAbs()
                .maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("hess_mixed examples") {
  auto ball = make_domain("ball");
  HermitianForm H = hess_mixed(ball.f, pt2(0.3, cplx(0.1, -0.4)));
  CHECK((H.mat - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

  auto quartic = make_domain("quartic");
  H = hess_mixed(quartic.f, pt2(0, std::polar(1.0, 0.7)));
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(2, 2);
  expect(1, 1) = 1.0;
  CHECK((H.mat - expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(H.asym() == 0.0);
}

TEST_CASE("eig_herm") {
  HermitianForm d(Eigen::MatrixXcd(Eigen::Vector2cd(0, 1).asDiagonal()));
  EigH e = eig_herm(d);
  CHECK(e.values(0) == doctest::Approx(0.0));
  CHECK(e.values(1) == doctest::Approx(1.0));

  // [[2, i], [-i, 2]]: characteristic polynomial (2-l)^2 - 1, roots 1 and 3
  Eigen::MatrixXcd m(2, 2);
  m << 2.0, cplx(0, 1), cplx(0, -1), 2.0;
  e = eig_herm(HermitianForm(m));
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(3.0));
  for (int i = 0; i < 2; ++i)
    CHECK((m * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm() < 1e-9 * 3.0);

  e = eig_herm(HermitianForm(Eigen::MatrixXcd::Identity(3, 3)));
  CHECK((e.values - Eigen::Vector3d::Ones()).norm() < 1e-14);
}

TEST_CASE("kernel_basis") {
  Eigen::MatrixXcd d = Eigen::Vector2cd(0, 1).asDiagonal();
  Eigen::MatrixXcd k = kernel_basis(HermitianForm(d), 1e-6);
  REQUIRE(k.cols() == 1);
  CHECK(std::abs(k(0, 0)) == doctest::Approx(1.0));

  k = kernel_basis(HermitianForm(Eigen::MatrixXcd::Identity(2, 2)), 1e-6);
  CHECK(k.cols() == 0);

  // identically-zero form: whole space
  k = kernel_basis(HermitianForm::zero(3), 1e-6);
  CHECK(k.cols() == 3);

  Eigen::MatrixXcd neg = Eigen::Vector2cd(-0.5, 1).asDiagonal();
  CHECK_THROWS_AS((void)kernel_basis(HermitianForm(neg), 1e-6), NotSemidefiniteError);
}

TEST_CASE("kernel_basis: worm Levi kernel on the annulus") {
  auto worm = make_domain("worm", {{"beta", 1.0}});
  BoundaryPoint bp = project_to_boundary(worm.f, pt2(std::polar(1.1, 0.4), 0));
  HermitianForm L = levi_form(worm.f, bp);
  Eigen::MatrixXcd k = kernel_basis(L, 1e-6);
  REQUIRE(k.cols() == 1);
  // the kernel direction maps to d/dz in ambient coordinates
  Eigen::VectorXcd amb = bp.frame * k.col(0);
  CHECK(std::abs(amb(0)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(amb(1)) < 1e-8);
}

TEST_CASE("sup_ratio basics") {
  HermitianForm Z = HermitianForm::zero(2);
  HermitianForm I(Eigen::MatrixXcd::Identity(2, 2));
  CHECK(sup_ratio(Z, I) == 0.0);

  HermitianForm A(Eigen::MatrixXcd(Eigen::Vector2cd(1, 0).asDiagonal()));
  HermitianForm B(Eigen::MatrixXcd(Eigen::Vector2cd(2, 1).asDiagonal()));
  CHECK(sup_ratio(A, B) == doctest::Approx(0.5));

  // A alive on ker B
  HermitianForm B2(Eigen::MatrixXcd(Eigen::Vector2cd(0, 1).asDiagonal()));
  CHECK(std::isinf(sup_ratio(A, B2)));
  // A vanishing on ker B: generalized eigenvalue on the complement
  HermitianForm A2(Eigen::MatrixXcd(Eigen::Vector2cd(0, 3).asDiagonal()));
  CHECK(sup_ratio(A2, B2) == doctest::Approx(3.0));

  Eigen::MatrixXcd neg = Eigen::Vector2cd(-1, 1).asDiagonal();
  CHECK_THROWS_AS((void)sup_ratio(A, HermitianForm(neg)), InvalidFormError);
  CHECK(std::isinf(ratio_or_inf(A, HermitianForm(neg))));
}

TEST_CASE("sup_ratio properties: unitary invariance and homogeneity") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0, 1);
  auto randPSD = [&](int n) {
    Eigen::MatrixXcd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = cplx(g(rng), g(rng));
    return HermitianForm(Eigen::MatrixXcd(M * M.adjoint()));
  };
  auto randU = [&](int n) {
    Eigen::MatrixXcd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(M);
    return Eigen::MatrixXcd(qr.householderQ());
  };
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    HermitianForm A = randPSD(n), B = randPSD(n);
    const double t = sup_ratio(A, B);
    Eigen::MatrixXcd U = randU(n);
    HermitianForm Au(Eigen::MatrixXcd(U.adjoint() * A.mat * U));
    HermitianForm Bu(Eigen::MatrixXcd(U.adjoint() * B.mat * U));
    CHECK(sup_ratio(Au, Bu) == doctest::Approx(t).epsilon(1e-9));
    const double s = 0.25 + trial;
    HermitianForm As(Eigen::MatrixXcd(s * A.mat));
    CHECK(sup_ratio(As, B) == doctest::Approx(s * t).epsilon(1e-9));
  }
}

TEST_CASE("evaluation failure carries the offending point") {
  DefiningFunction f;
  f.id = "bad";
  f.n = 2;
  f.box = Box::cube(2, 2.0);
  f.eval = [](const Eigen::VectorXcd&) { return std::numeric_limits<double>::quiet_NaN(); };
  f.jet = [](const Eigen::VectorXcd& p) {
    WJet j(2);
    j.v = std::numeric_limits<double>::quiet_NaN();
    (void)p;
    return j;
  };
  CHECK_THROWS_AS((void)grad10(f, pt2(1, 1), DerivBackend::FiniteDiff), EvaluationFailure);
}
