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

}  // namespace

TEST_CASE("project_to_boundary: ball and quartic land on the known points") {
  auto ball = make_domain("ball");
  BoundaryPoint bp = project_to_boundary(ball.f, pt2(2, 0));
  CHECK((bp.p - pt2(1, 0)).norm() < 1e-9);
  CHECK(std::abs((bp.N.transpose() * bp.dr)(0) - 1.0) < 1e-10);
  CHECK(std::abs(bp.frame(1, 0)) == doctest::Approx(1.0));  // frame = d/dz2

  auto quartic = make_domain("quartic");
  bp = project_to_boundary(quartic.f, pt2(0, 2));
  CHECK((bp.p - pt2(0, 1)).norm() < 1e-9);
  CHECK(std::abs(bp.frame(0, 0)) == doctest::Approx(1.0));  // frame = d/dz1
}

TEST_CASE("project_to_boundary: worm residual self-consistency") {
  auto worm = make_domain("worm", {{"beta", 1.0}});
  BoundaryPoint bp = project_to_boundary(worm.f, pt2(std::polar(1.05, 1.2), cplx(0.05, 0.02)));
  CHECK(std::abs(worm.f.eval(bp.p)) <= 1e-10);
}

TEST_CASE("project failure paths") {
  auto ball = make_domain("ball");
  CHECK_THROWS_AS((void)project_to_boundary(ball.f, pt2(0, 0)), DegenerateGradient);
  ProjectOptions strict;
  strict.maxIter = 1;
  strict.boundaryTol = 1e-14;
  CHECK_THROWS_AS((void)project_to_boundary(ball.f, pt2(1.9, 0.4), strict), ProjectionFailure);
}

TEST_CASE("boundary frames: orthonormal, tangential, normalized") {
  for (const char* name : {"ball", "ellipsoid", "quartic", "worm"}) {
    auto dom = make_domain(name);
    BoundarySample s = sample_boundary(dom.f, SampleStrategy::Random, 40, 3);
    REQUIRE(s.points.size() > 10);
    for (const auto& bp : s.points) {
      CHECK((bp.frame.adjoint() * bp.frame - Eigen::MatrixXcd::Identity(dom.f.n - 1, dom.f.n - 1))
                .cwiseAbs()
                .maxCoeff() < 1e-9);
      CHECK(std::abs((bp.N.transpose() * bp.dr)(0) - 1.0) < 1e-10);
      for (int c = 0; c < bp.frame.cols(); ++c)
        CHECK(std::abs((bp.dr.transpose() * bp.frame.col(c))(0)) < 1e-9);
    }
  }
}

TEST_CASE("levi_form examples") {
  auto ball = make_domain("ball");
  BoundaryPoint bp = project_to_boundary(ball.f, pt2(cplx(1.3, 0.4), cplx(-0.2, 0.9)));
  HermitianForm L = levi_form(ball.f, bp);
  CHECK((L.mat - Eigen::MatrixXcd::Identity(1, 1)).cwiseAbs().maxCoeff() < 1e-12);

  auto quartic = make_domain("quartic");
  bp = project_to_boundary(quartic.f, pt2(0, std::polar(1.0, 2.1)));
  L = levi_form(quartic.f, bp);
  REQUIRE(L.dim() == 1);
  CHECK(std::abs(L.mat(0, 0)) < 1e-12);

  auto worm = make_domain("worm", {{"beta", 1.0}});
  bp = project_to_boundary(worm.f, pt2(std::polar(0.8, -0.3), 0));
  L = levi_form(worm.f, bp);
  REQUIRE(L.dim() == 1);
  CHECK(std::abs(eig_herm(L).values(0)) < 1e-8);
}

TEST_CASE("levi_form eigenvalues are frame-independent") {
  auto worm = make_domain("worm", {{"beta", 0.7}});
  auto ell = make_domain("ellipsoid", {{"n", 3}, {"a1", 1.0}, {"a2", 2.0}, {"a3", 0.5}});
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g(0, 1);
  for (const DefiningFunction* f : {&worm.f, &ell.f}) {
    BoundarySample s = sample_boundary(*f, SampleStrategy::Random, 10, 9);
    for (const auto& bp : s.points) {
      Eigen::VectorXd ev = eig_herm(levi_form(*f, bp)).values;
      const int k = (int)bp.frame.cols();
      Eigen::MatrixXcd M(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) M(i, j) = cplx(g(rng), g(rng));
      Eigen::MatrixXcd U = Eigen::HouseholderQR<Eigen::MatrixXcd>(M).householderQ();
      BoundaryPoint re = bp;
      re.frame = bp.frame * U;
      Eigen::VectorXd ev2 = eig_herm(levi_form(*f, re)).values;
      CHECK((ev - ev2).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("pseudoconvexity_report") {
  auto ball = make_domain("ball");
  BoundarySample s = sample_boundary(ball.f, SampleStrategy::Grid, 200, 1);
  CHECK(pseudoconvexity_report(ball.f, s.points).minEigenvalue == doctest::Approx(1.0));

  auto quartic = make_domain("quartic");
  BoundarySample sq = sample_boundary(quartic.f, SampleStrategy::Grid, 150, 1);
  BoundarySample sp = sample_boundary(quartic.f, SampleStrategy::Param, 50, 1,
                                      &quartic.meta.weakLocus);
  for (auto& b : sp.points) sq.points.push_back(b);
  PseudoconvexityReport rep = pseudoconvexity_report(quartic.f, sq.points);
  CHECK(std::abs(rep.minEigenvalue) < 1e-8);  // attained on the circle
  CHECK(rep.violations.empty());

  // sign construction: |z1|^2 - |z2|^2 + |z2|^4 is not pseudoconvex
  DefiningFunction bad;
  bad.id = "signflip";
  bad.n = 2;
  bad.box = Box::cube(2, 2.0);
  bad.eval = [](const Eigen::VectorXcd& z) {
    return std::norm(z(0)) - std::norm(z(1)) + std::norm(z(1)) * std::norm(z(1)) - 0.5;
  };
  bad.jet = [](const Eigen::VectorXcd& z) {
    WJet z1 = WJet::var(z(0), 0, 2), z2 = WJet::var(z(1), 1, 2);
    WJet q = abs2(z2);
    return abs2(z1) - q + q * q - 0.5;
  };
  BoundarySample sb = sample_boundary(bad, SampleStrategy::Random, 80, 2);
  REQUIRE(sb.points.size() > 20);
  CHECK(!pseudoconvexity_report(bad, sb.points).violations.empty());
}

TEST_CASE("sample_boundary strategies") {
  auto ball = make_domain("ball");
  BoundarySample s = sample_boundary(ball.f, SampleStrategy::Grid, 100, 1);
  CHECK((int)s.points.size() == 100);
  CHECK(!s.partial);
  for (const auto& bp : s.points) CHECK(std::abs(ball.f.eval(bp.p)) <= 1e-10);

  auto worm = make_domain("worm", {{"beta", 1.0}});
  BoundarySample sw =
      sample_boundary(worm.f, SampleStrategy::Param, 64, 1, &worm.meta.weakLocus);
  for (const auto& bp : sw.points) {
    CHECK(std::abs(bp.p(1)) < 1e-14);  // w = 0 exactly on the annulus
    CHECK(std::abs(worm.f.eval(bp.p)) < 1e-12);
  }

  auto quartic = make_domain("quartic");
  BoundarySample sq =
      sample_boundary(quartic.f, SampleStrategy::Param, 32, 1, &quartic.meta.weakLocus);
  for (const auto& bp : sq.points) {
    CHECK(std::abs(bp.p(0)) < 1e-14);
    CHECK(std::abs(std::abs(bp.p(1)) - 1.0) < 1e-12);
  }

  // determinism under a fixed seed
  BoundarySample r1 = sample_boundary(ball.f, SampleStrategy::Random, 30, 42);
  BoundarySample r2 = sample_boundary(ball.f, SampleStrategy::Random, 30, 42);
  REQUIRE(r1.points.size() == r2.points.size());
  for (std::size_t i = 0; i < r1.points.size(); ++i)
    CHECK((r1.points[i].p - r2.points[i].p).norm() == 0.0);
}

TEST_CASE("domain registry") {
  CHECK(registry_names().size() == 4);
  CHECK_THROWS_AS((void)make_domain("nosuch"), UnknownDomainError);
  CHECK_THROWS_AS((void)make_domain("worm", {{"beta", -1.0}}), UnknownDomainError);
}
