#include <doctest.h>

#include <random>

#include "levicore/distributions.hpp"
#include "levicore/domains.hpp"

using namespace levicore;

namespace {

Eigen::VectorXcd pt2(cplx a, cplx b) {
  Eigen::VectorXcd p(2);
  p << a, b;
  return p;
}

// grid sample of the kernel distribution of x dx (x) dx + y dy (x) dy on R^2
SampledDistribution grid_example(int nodes) {
  SampledDistribution d;
  d.complexKind = false;
  d.pointDim = 2;
  d.fiberDim = 2;
  const double h = 2.0 / (nodes - 1);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      SampledDistribution::Sample s;
      s.x = Eigen::Vector2d(-1.0 + i * h, -1.0 + j * h);
      const bool x0 = std::abs(s.x(0)) < 1e-14, y0 = std::abs(s.x(1)) < 1e-14;
      if (x0 && y0)
        s.fiber = Eigen::MatrixXcd::Identity(2, 2);
      else if (x0) {
        s.fiber.resize(2, 1);
        s.fiber << 1, 0;
      } else if (y0) {
        s.fiber.resize(2, 1);
        s.fiber << 0, 1;
      } else
        s.fiber.resize(2, 0);
      d.samples.push_back(std::move(s));
    }
  return d;
}

std::vector<Eigen::VectorXd> circle_cloud(int count) {
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < count; ++i) {
    const double th = 2.0 * M_PI * i / count;
    pts.push_back(to_real(pt2(0, std::polar(1.0, th))));
  }
  return pts;
}

}  // namespace

TEST_CASE("tangent_estimate: circle, isolated point, flat annulus") {
  auto cloud = circle_cloud(200);
  const double spacing = median_nn_spacing(cloud);
  TangentEstimate te = tangent_estimate(cloud, cloud[17], 3.0 * spacing);
  REQUIRE(te.basis.cols() == 1);
  // true tangent at angle th: the i e^{i th} direction of z2
  const double th = 2.0 * M_PI * 17 / 200;
  Eigen::VectorXd tan = to_real(pt2(0, cplx(0, 1) * std::polar(1.0, th)));
  const double cosang = std::abs(te.basis.col(0).dot(tan));
  CHECK(std::acos(std::min(1.0, cosang)) < 2.0 * M_PI / 180.0);

  // single isolated point
  std::vector<Eigen::VectorXd> lone = {Eigen::Vector2d(0, 0)};
  CHECK(tangent_estimate(lone, lone[0], 1.0).basis.cols() == 0);

  // open planar patch: the worm annulus {w = 0}
  std::vector<Eigen::VectorXd> ann;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 24; ++j)
      ann.push_back(to_real(pt2(std::polar(std::exp(-0.5 + i / 11.0), 2 * M_PI * j / 24.0), 0)));
  TangentEstimate ta = tangent_estimate(ann, ann[30], 3.0 * median_nn_spacing(ann));
  CHECK(ta.basis.cols() == 2);

  CHECK_THROWS_AS((void)tangent_estimate(circle_cloud(3), circle_cloud(3)[0], 10.0),
                  InsufficientSampling);
}

TEST_CASE("worked plane example: derived twice to the zero distribution") {
  SampledDistribution d = grid_example(41);
  CoreResult res = iterate_to_core(d, 8);
  CHECK(res.stabilized);
  CHECK(res.k == 2);
  CHECK(res.core.empty_support());

  // the intermediate derived distribution: 2 at the origin, nothing else
  SampledDistribution d1 = derived(d);
  int origin2 = 0, others = 0;
  for (const auto& s : d1.samples) {
    if (s.fiber.cols() == 0) continue;
    if (s.x.norm() < 1e-14 && s.fiber.cols() == 2)
      ++origin2;
    else
      ++others;
  }
  CHECK(origin2 == 1);
  CHECK(others == 0);
}

TEST_CASE("levi_null supports: ball empty, quartic circle, worm annulus") {
  auto ball = make_domain("ball");
  BoundarySample sb = sample_boundary(ball.f, SampleStrategy::Grid, 120, 1);
  SampledDistribution nb = levi_null(ball.f, sb.points);
  CHECK(nb.empty_support());

  auto quartic = make_domain("quartic");
  BoundarySample sq = sample_boundary(quartic.f, SampleStrategy::Grid, 120, 1);
  BoundarySample sqp =
      sample_boundary(quartic.f, SampleStrategy::Param, 64, 1, &quartic.meta.weakLocus);
  for (auto& b : sqp.points) sq.points.push_back(b);
  SampledDistribution nq = levi_null(quartic.f, sq.points);
  CHECK(nq.support_size() >= 64);
  for (const auto& s : nq.samples) {
    if (s.fiber.cols() == 0) continue;
    CHECK(std::abs(to_complex(s.x)(0)) < 1e-5);         // on the circle
    CHECK(std::abs(std::abs(s.fiber(0, 0)) - 1.0) < 1e-8);  // fiber = span d/dz1
  }

  auto worm = make_domain("worm", {{"beta", 1.0}});
  BoundarySample sw = sample_boundary(worm.f, SampleStrategy::Random, 80, 1);
  BoundarySample swp = sample_boundary(worm.f, SampleStrategy::Param, 72, 1, &worm.meta.weakLocus);
  for (auto& b : swp.points) sw.points.push_back(b);
  std::vector<BoundaryPoint> patch;
  for (auto& b : sw.points)
    if (worm.meta.analysisPatch(b.p)) patch.push_back(b);
  SampledDistribution nw = levi_null(worm.f, patch);
  CHECK(nw.support_size() >= 72);
  for (const auto& s : nw.samples) {
    if (s.fiber.cols() == 0) continue;
    CHECK(std::abs(to_complex(s.x)(1)) < 1e-4);  // w = 0
    CHECK(s.fiber.cols() == 1);
  }
}

TEST_CASE("derived: quartic empties, worm is already stable") {
  auto quartic = make_domain("quartic");
  BoundarySample sq =
      sample_boundary(quartic.f, SampleStrategy::Param, 96, 1, &quartic.meta.weakLocus);
  SampledDistribution nq = levi_null(quartic.f, sq.points);
  REQUIRE(nq.support_size() == 96);
  CoreResult cq = iterate_to_core(nq, 8);
  CHECK(cq.k == 1);
  CHECK(cq.core.empty_support());

  auto worm = make_domain("worm", {{"beta", 1.0}});
  BoundarySample sw = sample_boundary(worm.f, SampleStrategy::Param, 96, 1, &worm.meta.weakLocus);
  SampledDistribution nw = levi_null(worm.f, sw.points);
  REQUIRE(nw.support_size() == 96);
  CoreResult cw = iterate_to_core(nw, 8);
  CHECK(cw.k == 1);
  CHECK(cw.stabilized);
  CHECK(cw.core.support_size() == 96);
  for (const auto& s : cw.core.samples) {
    REQUIRE(s.fiber.cols() == 1);
    // within 5 degrees of span{d/dz}
    CHECK(std::abs(s.fiber(0, 0)) > std::cos(5.0 * M_PI / 180.0));
  }
}

TEST_CASE("zero holomorphic dimension checks") {
  auto quartic = make_domain("quartic");
  auto cloud = circle_cloud(200);
  Eigen::MatrixXcd fib(2, 1);
  fib << 1, 0;
  const double scale = 3.0 * median_nn_spacing(cloud);
  CHECK(zero_holo_dim_check(cloud, cloud[3], fib, scale));

  std::vector<Eigen::VectorXd> ann;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 32; ++j)
      ann.push_back(to_real(pt2(std::polar(std::exp(-0.5 + i / 11.0), 2 * M_PI * j / 32.0), 0)));
  CHECK(!zero_holo_dim_check(ann, ann[40], fib, 3.0 * median_nn_spacing(ann)));

  std::vector<Eigen::VectorXd> lone = {ann[0]};
  CHECK(zero_holo_dim_check(lone, ann[0], fib, 0.5));
}

TEST_CASE("derived is monotone and idempotent at the fixed point") {
  SampledDistribution d = grid_example(41);
  SampledDistribution d1 = derived(d);
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    const auto& f1 = d1.samples[i].fiber;
    const auto& f0 = d.samples[i].fiber;
    if (f1.cols() == 0) continue;
    REQUIRE(f0.cols() >= f1.cols());
    Eigen::VectorXd ang = principal_angles(f1, f0);
    CHECK(ang.maxCoeff() < 1e-9);  // derived fiber sits inside the original
  }
  // fixed point of the worm core
  auto worm = make_domain("worm", {{"beta", 1.0}});
  BoundarySample sw = sample_boundary(worm.f, SampleStrategy::Param, 60, 1, &worm.meta.weakLocus);
  SampledDistribution nw = levi_null(worm.f, sw.points);
  CoreResult cw = iterate_to_core(nw, 8);
  SampledDistribution again = derived(cw.core);
  for (std::size_t i = 0; i < again.samples.size(); ++i)
    CHECK(again.samples[i].fiber.cols() == cw.core.samples[i].fiber.cols());
}

TEST_CASE("derived preserves nesting") {
  SampledDistribution big = grid_example(41);
  SampledDistribution small = big;  // thin out: keep only the d/dx part of each fiber
  for (auto& s : small.samples)
    if (s.fiber.cols() == 2) {
      Eigen::MatrixXcd f(2, 1);
      f << 1, 0;
      s.fiber = f;
    }
  SampledDistribution db = derived(big), ds = derived(small);
  for (std::size_t i = 0; i < db.samples.size(); ++i) {
    const auto& fs = ds.samples[i].fiber;
    const auto& fb = db.samples[i].fiber;
    if (fs.cols() == 0) continue;
    REQUIRE(fb.cols() >= fs.cols());
    CHECK(principal_angles(fs, fb).maxCoeff() < 1e-9);
  }
}

TEST_CASE("levi_null flags pseudoconvexity violations") {
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
  BoundarySample s = sample_boundary(bad, SampleStrategy::Random, 60, 2);
  REQUIRE(s.points.size() > 20);
  CHECK_THROWS_AS((void)levi_null(bad, s.points), NotSemidefiniteError);
}

TEST_CASE("numerical fiber dimensions match the analytic metadata") {
  // the executable surrogate for upper semicontinuity on the examples
  for (const char* name : {"quartic", "worm"}) {
    auto dom = make_domain(name);
    BoundarySample s = sample_boundary(dom.f, SampleStrategy::Param, 48, 1, &dom.meta.weakLocus);
    SampledDistribution nd = levi_null(dom.f, s.points);
    for (const auto& smp : nd.samples) {
      REQUIRE(smp.fiber.cols() == 1);
      Eigen::MatrixXcd exact = dom.meta.exactFiber(to_complex(smp.x));
      CHECK(principal_angles(smp.fiber, exact).maxCoeff() < 1e-6);
    }
  }
}
