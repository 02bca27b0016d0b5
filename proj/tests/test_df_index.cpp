#include <doctest.h>

#include "levicore/annulus.hpp"
#include "levicore/df_index.hpp"
#include "levicore/domains.hpp"

using namespace levicore;

namespace {

Eigen::VectorXcd pt2(cplx a, cplx b) {
  Eigen::VectorXcd p(2);
  p << a, b;
  return p;
}

}  // namespace

TEST_CASE("collar grid sits strictly inside") {
  auto ball = make_domain("ball");
  BoundarySample s = sample_boundary(ball.f, SampleStrategy::Grid, 60, 1);
  CollarGrid g = build_collar(ball.f, s.points, 0.1);
  REQUIRE(g.pts.size() > 100);
  for (int i = 0; i < g.rvals.size(); ++i) {
    CHECK(g.rvals(i) < 0.0);
    CHECK(g.rvals(i) > -0.11);
  }
}

TEST_CASE("psh_defect: ball closed forms and monotonicity in delta") {
  auto ball = make_domain("ball");
  BoundarySample s = sample_boundary(ball.f, SampleStrategy::Grid, 60, 1);
  CollarGrid g = build_collar(ball.f, s.points, 0.1);
  const double d1 = psh_defect(ball.f, 1.0, g);
  CHECK(d1 == doctest::Approx(1.0).epsilon(1e-9));  // M_1 = identity
  const double d05 = psh_defect(ball.f, 0.5, g);
  CHECK(d05 >= d1 - 1e-12);  // the added rank-1 term is PSD

  double prev = std::numeric_limits<double>::infinity();
  for (double delta : {0.1, 0.3, 0.5, 0.7, 0.9, 0.999}) {
    const double v = psh_defect(ball.f, delta, g);
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("df_scan: ball and quartic reach the cap") {
  auto ball = make_domain("ball");
  BoundarySample s = sample_boundary(ball.f, SampleStrategy::Grid, 60, 1);
  CollarGrid g = build_collar(ball.f, s.points, 0.1);
  DfScanOptions opt;
  DfScanResult r = df_scan(ball.f, g, opt);
  CHECK(r.deltaStar >= 0.999);

  auto quartic = make_domain("quartic");
  BoundarySample sq = sample_boundary(quartic.f, SampleStrategy::Grid, 60, 1);
  BoundarySample sp =
      sample_boundary(quartic.f, SampleStrategy::Param, 32, 1, &quartic.meta.weakLocus);
  for (auto& b : sp.points) sq.points.push_back(b);
  CollarGrid gq = build_collar(quartic.f, sq.points, 0.1);
  auto poly = make_poly_basis(2, 4, 1.0);
  DfScanResult rq = df_scan(quartic.f, gq, opt, poly.get(), 1);
  CHECK(rq.deltaStar >= 0.95);
}

TEST_CASE("worm: defect sign flips across the norm threshold") {
  auto worm = make_domain("worm", {{"beta", 1.0}});
  BoundarySample sw = sample_boundary(worm.f, SampleStrategy::Param, 48, 1, &worm.meta.weakLocus);
  BoundarySample sr = sample_boundary(worm.f, SampleStrategy::Random, 60, 2);
  for (auto& b : sr.points)
    if (worm.meta.analysisPatch(b.p)) sw.points.push_back(b);
  CollarGrid g = build_collar(worm.f, sw.points, 0.05);

  auto radial = make_radial_basis(2, 16, worm.meta.annulus->rho1, worm.meta.annulus->rho2);
  AnnulusProblem prob{worm.meta.annulus->rho1, worm.meta.annulus->rho2, 1.0, 64};
  Eigen::VectorXd seed = radial_equality_seed(prob, *radial, 1.05);
  const double dfExpect = 1.0 / (1.0 + annulus_norm_closed_form(prob));

  // infeasible far above the threshold even with the good gauge
  CHECK(psh_defect(worm.f, 0.95, g, radial.get(), seed) < -1e-8);
  // feasible below it
  CHECK(psh_defect(worm.f, 0.9 * dfExpect, g, radial.get(), seed) >= -1e-8);
  // canonical r alone cannot reach the threshold on the collar
  CHECK(psh_defect(worm.f, dfExpect, g) < -1e-8);
}

TEST_CASE("df_via_norm: exact values for trivial cores") {
  auto ball = make_domain("ball");
  SampledDistribution empty;
  empty.complexKind = true;
  empty.pointDim = 4;
  empty.fiberDim = 2;
  auto poly = make_poly_basis(2, 2, 1.0);
  OptBudget quick;
  quick.starts = 2;
  quick.evalsPerStart = 100;
  RouteB rb = df_via_norm(ball.f, empty, *poly, 1e9, quick, 1);
  CHECK(rb.df == 1.0);
  CHECK(rb.est.value == 0.0);
}

TEST_CASE("reduction_check on the quartic: all zeros") {
  auto quartic = make_domain("quartic");
  BoundarySample sq =
      sample_boundary(quartic.f, SampleStrategy::Param, 32, 1, &quartic.meta.weakLocus);
  SampledDistribution nq = levi_null(quartic.f, sq.points);
  CoreResult core = iterate_to_core(nq, 6);
  auto small = make_poly_basis(2, 1, 1.0);
  auto large = make_poly_basis(2, 2, 1.0);
  OptBudget quick;
  quick.starts = 2;
  quick.evalsPerStart = 150;
  ReductionReport rep = reduction_check(quartic.f, nq, core.core, *small, *large, 1e9, quick, 3);
  CHECK(rep.nullLarge == 0.0);
  CHECK(rep.coreLarge == 0.0);
  CHECK(rep.monotoneOk);
  CHECK(rep.gapNonIncreasing);
}

TEST_CASE("key lemma residuals") {
  auto quartic = make_domain("quartic");
  BoundaryPoint bq = project_to_boundary(quartic.f, pt2(0, std::polar(1.0, 0.8)));
  Eigen::VectorXcd Z(2);
  Z << 1, 0;
  CHECK(key_lemma_check(quartic.f, bq, Z) < 1e-5);

  for (double beta : {1.0, 2.0}) {
    auto worm = make_domain("worm", {{"beta", beta}});
    BoundaryPoint bw = project_to_boundary(worm.f, pt2(std::polar(1.1, 2.0), 0));
    CHECK(key_lemma_check(worm.f, bw, Z) < 1e-4);
  }

  // ball has no Levi kernel: ill-posed input must be rejected
  auto ball = make_domain("ball");
  BoundaryPoint bb = project_to_boundary(ball.f, pt2(cplx(0.7, 0.4), cplx(0.2, -0.5)));
  CHECK_THROWS_AS((void)key_lemma_check(ball.f, bb, bb.frame.col(0)), IllPosedFiber);
}

TEST_CASE("invalid collar is rejected") {
  auto ball = make_domain("ball");
  CollarGrid g;
  g.pts.push_back(pt2(1.5, 0));  // outside: r > 0
  g.rvals.resize(1);
  g.rvals(0) = ball.f.eval(g.pts[0]);
  CHECK(g.rvals(0) > 0);
  CHECK_THROWS_AS((void)psh_defect(ball.f, 0.5, g), InvalidGridError);
  CHECK_THROWS_AS((void)psh_defect(ball.f, 0.5, CollarGrid{}), InvalidGridError);
}
