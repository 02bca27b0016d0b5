#include "levicore/dangelo.hpp"

#include <cmath>

#include "levicore/nelder_mead.hpp"
#include "levicore/parallel.hpp"

namespace levicore {

namespace {

Eigen::VectorXcd gauge_grad10(const DAngeloForm& a, const Eigen::VectorXcd& q) {
  const int n = (int)q.size();
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(n);
  if (a.basis && a.coeff.size()) {
    if ((int)a.coeff.size() != a.basis->count())
      throw CalcError("gauge coefficient count does not match the basis");
    Eigen::MatrixXcd G = a.basis->grads(q);
    for (int m = 0; m < a.coeff.size(); ++m)
      if (a.coeff(m) != 0.0) g += a.coeff(m) * G.row(m).transpose();
  }
  return g;
}

Eigen::VectorXcd shift(const Eigen::VectorXcd& p, int reDir, double t) {
  Eigen::VectorXcd q = p;
  if (reDir % 2 == 0)
    q(reDir / 2) += t;
  else
    q(reDir / 2) += cplx(0.0, t);
  return q;
}

}  // namespace

Eigen::VectorXcd ambient_alpha_10(const DAngeloForm& a, const Eigen::VectorXcd& q) {
  Eigen::VectorXcd dr = grad10_jet(a.r->jet, q);
  const double d2 = dr.squaredNorm();
  if (std::sqrt(d2) < 1e-10) throw DegenerateGradient("ambient alpha: dr below 1e-10");
  Eigen::VectorXcd N = dr.conjugate() / d2;
  Eigen::MatrixXcd C = hess_coeff_jet(a.r->jet, q);
  return C * N.conjugate() + gauge_grad10(a, q);
}

cplx alpha_eval(const DAngeloForm& a, const BoundaryPoint& bp, const Eigen::VectorXcd& Z) {
  Eigen::MatrixXcd C = hess_coeff_jet(a.r->jet, bp.p);
  cplx v = (Z.transpose() * C * bp.N.conjugate())(0);
  Eigen::VectorXcd gf = gauge_grad10(a, bp.p);
  return v + (gf.transpose() * Z)(0);
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> ambient_dalpha_parts(const DAngeloForm& a,
                                                                   const Eigen::VectorXcd& q) {
  const int n = (int)q.size();
  const double h = std::pow(std::numeric_limits<double>::epsilon(), 0.2) * (1.0 + q.norm());
  // db(k, j) = d beta_j / d zbar_k from 4th-order stencils in the 2n real directions
  Eigen::MatrixXcd db(n, n);
  for (int k = 0; k < n; ++k) {
    auto sweep = [&](int dir) {
      Eigen::VectorXcd d = (ambient_alpha_10(a, shift(q, dir, -2 * h)) -
                            8.0 * ambient_alpha_10(a, shift(q, dir, -h)) +
                            8.0 * ambient_alpha_10(a, shift(q, dir, h)) -
                            ambient_alpha_10(a, shift(q, dir, 2 * h))) /
                           (12.0 * h);
      return d;
    };
    Eigen::VectorXcd dx = sweep(2 * k), dy = sweep(2 * k + 1);
    for (int j = 0; j < n; ++j) db(k, j) = 0.5 * (dx(j) + cplx(0, 1) * dy(j));
  }
  Eigen::MatrixXcd P(n, n), D(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      P(j, k) = 0.5 * std::conj(db(j, k));
      D(j, k) = -0.5 * db(k, j);
    }
  return {P, D};
}

namespace {

void check_fiber_in_null(const DefiningFunction& f, const BoundaryPoint& bp,
                         const Eigen::MatrixXcd& fiber, double quadTol) {
  if (fiber.cols() == 0) return;
  HermitianForm L = levi_form(f, bp);
  // fiber columns are ambient; express in the tangential frame first
  Eigen::MatrixXcd inFrame = bp.frame.adjoint() * fiber;
  for (int i = 0; i < fiber.cols(); ++i) {
    if ((fiber.col(i) - bp.frame * inFrame.col(i)).norm() > 1e-6)
      throw IllPosedFiber("fiber vector not tangential at boundary point");
    if (std::abs(L.quad(inFrame.col(i))) > quadTol)
      throw IllPosedFiber("fiber vector outside the Levi kernel, Levi value " +
                          std::to_string(L.quad(inFrame.col(i))));
  }
}

}  // namespace

FormsAtPoint forms_at_point(const DAngeloForm& a, const BoundaryPoint& bp,
                            const Eigen::MatrixXcd& fiber, double angleTolDeg) {
  (void)angleTolDeg;
  check_fiber_in_null(*a.r, bp, fiber, 1e-6 * (1.0 + a.r->scale));
  auto [P, D] = ambient_dalpha_parts(a, bp.p);
  FormsAtPoint out;
  out.dbar = HermitianForm::from_coeff(D).restricted(fiber);
  out.dAlpha = HermitianForm::from_coeff(P).restricted(fiber);
  out.alphaOnFiber.resize(fiber.cols());
  for (int i = 0; i < fiber.cols(); ++i) out.alphaOnFiber(i) = alpha_eval(a, bp, fiber.col(i));
  return out;
}

HermitianForm dbar_alpha(const DAngeloForm& a, const BoundaryPoint& bp,
                         const Eigen::MatrixXcd& fiber) {
  return forms_at_point(a, bp, fiber).dbar;
}

HermitianForm wedge_alpha(const DAngeloForm& a, const BoundaryPoint& bp,
                          const Eigen::MatrixXcd& fiber) {
  Eigen::VectorXcd v(fiber.cols());
  for (int i = 0; i < fiber.cols(); ++i) v(i) = alpha_eval(a, bp, fiber.col(i));
  return HermitianForm(0.5 * v.conjugate() * v.transpose());
}

// ---- EvalContext -----------------------------------------------------------

EvalContext EvalContext::build(const DefiningFunction& f, const SampledDistribution& dist,
                               const GaugeBasis* basis, double angleTolDeg) {
  (void)angleTolDeg;
  EvalContext ctx;
  ctx.f_ = &f;
  ctx.basis_ = basis;
  std::vector<int> supportIdx;
  for (std::size_t i = 0; i < dist.samples.size(); ++i)
    if (dist.samples[i].fiber.cols() > 0) supportIdx.push_back((int)i);
  ctx.pts_.resize(supportIdx.size());

  // sample-wide Levi scale for the containment guard
  std::vector<double> lmax(supportIdx.size(), 0.0);
  std::vector<BoundaryPoint> bps(supportIdx.size());
  par::for_index(supportIdx.size(), [&](std::size_t i) {
    bps[i] = project_to_boundary(f, to_complex(dist.samples[supportIdx[i]].x));
    lmax[i] = eig_herm(levi_form(f, bps[i])).values.maxCoeff();
  });
  double lref = 0.0;
  for (double v : lmax) lref = std::max(lref, v);
  // absolute floor keeps the guard meaningful when the sample is entirely
  // Levi-degenerate (lref ~ machine zero on the worm annulus)
  const double quadTol =
      std::max(100.0 * dist.sourceTol * lref, 1e-10 * (1.0 + f.scale));

  const int m = basis ? basis->count() : 0;
  DAngeloForm base{&f, nullptr, Eigen::VectorXd()};
  par::for_index(supportIdx.size(), [&](std::size_t i) {
    Point& pt = ctx.pts_[i];
    pt.bp = bps[i];
    pt.fiber = dist.samples[supportIdx[i]].fiber;
    check_fiber_in_null(f, pt.bp, pt.fiber, quadTol);
    const int k = (int)pt.fiber.cols();
    pt.alpha0.resize(k);
    Eigen::MatrixXcd C = hess_coeff_jet(f.jet, pt.bp.p);
    for (int c = 0; c < k; ++c)
      pt.alpha0(c) = (pt.fiber.col(c).transpose() * C * pt.bp.N.conjugate())(0);
    auto [P, D] = ambient_dalpha_parts(base, pt.bp.p);
    (void)P;
    pt.dbar0 = HermitianForm::from_coeff(D).restricted(pt.fiber).mat;
    if (m > 0) {
      Eigen::MatrixXcd G = basis->grads(pt.bp.p);
      pt.dAlphaGauge = (G * pt.fiber).transpose();  // k x m
      auto Hs = basis->mixed_hessians(pt.bp.p);
      pt.dbarG.resize(m);
      for (int mm = 0; mm < m; ++mm)
        pt.dbarG[mm] = HermitianForm::from_coeff(-0.5 * Hs[mm]).restricted(pt.fiber).mat;
    }
  });
  return ctx;
}

namespace {

void assemble(const EvalContext::Point& pt, const Eigen::VectorXd& c, Eigen::VectorXcd& v,
              Eigen::MatrixXcd& D) {
  v = pt.alpha0;
  if (c.size() && pt.dAlphaGauge.size()) v += pt.dAlphaGauge * c.cast<cplx>();
  D = pt.dbar0;
  for (int m = 0; m < c.size(); ++m)
    if (c(m) != 0.0) D += c(m) * pt.dbarG[m];
}

}  // namespace

double EvalContext::n_at(const Eigen::VectorXd& coeff, int* worstPoint) const {
  if (coeff.size() && (int)coeff.size() != gaugeDim())
    throw CalcError("gauge coefficient count does not match the basis");
  double best = 0.0;
  int worst = -1;
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    Eigen::VectorXcd v;
    Eigen::MatrixXcd D;
    assemble(pts_[i], coeff, v, D);
    HermitianForm W(0.5 * v.conjugate() * v.transpose());
    const double r = ratio_or_inf(W, HermitianForm(std::move(D)));
    if (r > best || worst < 0) {
      best = r;
      worst = (int)i;
    }
    if (std::isinf(best)) break;
  }
  if (worstPoint) *worstPoint = worst;
  return best;
}

double EvalContext::size_at(const Eigen::VectorXd& coeff) const {
  if (coeff.size() && (int)coeff.size() != gaugeDim())
    throw CalcError("gauge coefficient count does not match the basis");
  double s = 0.0;
  for (const auto& pt : pts_) {
    Eigen::VectorXcd v;
    Eigen::MatrixXcd D;
    assemble(pt, coeff, v, D);
    s = std::max(s, v.norm());
  }
  return s;
}

double EvalContext::violation_at(const Eigen::VectorXd& coeff, double t) const {
  if (coeff.size() && (int)coeff.size() != gaugeDim())
    throw CalcError("gauge coefficient count does not match the basis");
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& pt : pts_) {
    Eigen::VectorXcd v;
    Eigen::MatrixXcd D;
    assemble(pt, coeff, v, D);
    Eigen::MatrixXcd M = 0.5 * v.conjugate() * v.transpose() - t * D;
    M = 0.5 * (M + M.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    const double scale = 0.5 * v.squaredNorm() + t * D.norm() + 1e-300;
    worst = std::max(worst, es.eigenvalues().maxCoeff() / scale);
  }
  return worst;
}

namespace {

Eigen::VectorXd checked_coeff(const DAngeloForm& a, int dim) {
  if (!a.coeff.size()) return Eigen::VectorXd::Zero(dim);
  if ((int)a.coeff.size() != dim)
    throw CalcError("gauge coefficient count does not match the basis");
  return a.coeff;
}

}  // namespace

double n_of_form(const DAngeloForm& a, const SampledDistribution& dist) {
  if (dist.support_size() == 0) return 0.0;  // empty-support convention
  EvalContext ctx = EvalContext::build(*a.r, dist, a.basis);
  return ctx.n_at(checked_coeff(a, ctx.gaugeDim()));
}

double size_norm(const DAngeloForm& a, const SampledDistribution& dist) {
  if (dist.support_size() == 0) return 0.0;
  EvalContext ctx = EvalContext::build(*a.r, dist, a.basis);
  return ctx.size_at(checked_coeff(a, ctx.gaugeDim()));
}

NormEstimate optimize_n(const DefiningFunction& f, const SampledDistribution& dist,
                        const GaugeBasis& basis, double K, const OptBudget& budget,
                        std::uint64_t seed, const std::vector<Eigen::VectorXd>& extraStarts) {
  NormEstimate est;
  est.basisId = basis.id();
  est.K = K;
  est.seed = seed;
  if (dist.support_size() == 0) {  // vacuous inequality on empty support
    est.value = 0.0;
    est.coeff = Eigen::VectorXd::Zero(basis.count());
    return est;
  }
  EvalContext ctx = EvalContext::build(f, dist, &basis);
  const int dim = ctx.gaugeDim();
  const double BIG = 1e100;

  auto objective = [&](const Eigen::VectorXd& c) {
    const double sz = ctx.size_at(c);
    if (sz >= K) return BIG * (1.0 + (sz - K));
    const double v = ctx.n_at(c);
    return std::isinf(v) ? BIG : v;
  };

  // warm starts for other basis sizes are silently dropped, so callers can
  // hand one mixed pool to runs over several bases
  std::vector<Eigen::VectorXd> starts;
  for (const auto& s : extraStarts)
    if ((int)s.size() == dim) starts.push_back(s);

  NmResult nm = nelder_mead_multistart(objective, dim, budget.starts, budget.evalsPerStart,
                                       budget.startStep, seed, starts);
  est.evals = nm.evals;
  Eigen::VectorXd cBest = nm.x;
  double vBest = ctx.n_at(cBest);
  if (dim > 0 && (ctx.size_at(cBest) >= K || std::isinf(vBest))) {
    // phase 1: no start was feasible (typical without a warm start, since a
    // random gauge rarely has the right curvature sign everywhere). Chase
    // the relaxed inequality wedge <= T dbar for growing T; any interior
    // point of it makes the real objective finite.
    for (double T : {1.0, 8.0, 64.0, 512.0}) {
      NmResult p1 = nelder_mead(
          [&](const Eigen::VectorXd& c) { return ctx.violation_at(c, T); },
          Eigen::VectorXd::Zero(dim), budget.startStep, budget.evalsPerStart);
      est.evals += p1.evals;
      if (p1.f <= 0.0) {
        NmResult retry = nelder_mead(objective, p1.x, 0.3 * budget.startStep,
                                     budget.evalsPerStart);
        est.evals += retry.evals;
        if (retry.f < BIG) {
          cBest = retry.x;
          vBest = ctx.n_at(cBest);
        }
        break;
      }
    }
  }
  if (ctx.size_at(cBest) >= K || std::isinf(vBest)) {
    est.allInfeasible = true;
    est.value = std::numeric_limits<double>::infinity();
    est.coeff = cBest;
    return est;
  }

  // bisection refinement on t with a feasibility probe over the coefficients
  double tHi = vBest, tLo = 0.0;
  const double feasTol = 1e-9;
  while (tHi > 0 && (tHi - tLo) > budget.bisectRelTol * tHi) {
    const double t = 0.5 * (tHi + tLo);
    auto feas = [&](const Eigen::VectorXd& c) {
      const double sz = ctx.size_at(c);
      if (sz >= K) return BIG * (1.0 + (sz - K));
      return ctx.violation_at(c, t);
    };
    NmResult probe = nelder_mead(feas, cBest, 0.1 * budget.startStep, budget.feasEvals);
    est.evals += probe.evals;
    if (probe.f <= feasTol) {
      tHi = t;
      cBest = probe.x;
    } else {
      tLo = t;
    }
  }
  est.value = tHi;
  est.coeff = cBest;
  est.sizeAtOpt = ctx.size_at(cBest);
  int worst = -1;
  ctx.n_at(cBest, &worst);
  est.worstPoint = worst;
  est.perPointRatio.resize(ctx.points());
  for (int i = 0; i < ctx.points(); ++i) {
    Eigen::VectorXcd v;
    Eigen::MatrixXcd D;
    assemble(ctx.data()[i], cBest, v, D);
    est.perPointRatio[i] =
        ratio_or_inf(HermitianForm(0.5 * v.conjugate() * v.transpose()), HermitianForm(std::move(D)));
  }
  return est;
}

ConsistencyReport consistency_suite(const DefiningFunction& f, const GaugeBasis& basis,
                                    const Eigen::VectorXd& fCoeff,
                                    const SampledDistribution& dist) {
  ConsistencyReport rep;
  if (dist.support_size() == 0) {
    rep.skipped = true;
    return rep;
  }
  // r' = e^f r as its own defining function
  DefiningFunction fp = f;
  fp.id = f.id + "+gauge";
  const GaugeBasis* bp = &basis;
  Eigen::VectorXd c = fCoeff;
  const DefiningFunction* f0 = &f;
  fp.eval = [f0, bp, c](const Eigen::VectorXcd& q) {
    return std::exp(bp->gauge_value(q, c)) * f0->eval(q);
  };
  fp.jet = [f0, bp, c](const Eigen::VectorXcd& q) {
    return exp(bp->gauge_jet(q, c)) * f0->jet(q);
  };

  DAngeloForm aBase{&f, nullptr, Eigen::VectorXd()};
  DAngeloForm aGauged{&f, &basis, fCoeff};
  DAngeloForm aPrime{&fp, nullptr, Eigen::VectorXd()};

  for (const auto& smp : dist.samples) {
    if (smp.fiber.cols() == 0) continue;
    BoundaryPoint b0 = project_to_boundary(f, to_complex(smp.x));
    BoundaryPoint b1 = project_to_boundary(fp, to_complex(smp.x));
    Eigen::MatrixXcd G = basis.grads(b0.p);
    for (int i = 0; i < smp.fiber.cols(); ++i) {
      const Eigen::VectorXcd Z = smp.fiber.col(i);
      const cplx lhs = alpha_eval(aPrime, b1, Z);
      cplx df = 0.0;
      for (int m = 0; m < fCoeff.size(); ++m) df += fCoeff(m) * (G.row(m) * Z)(0);
      const cplx rhs = alpha_eval(aBase, b0, Z) + df;
      rep.resGaugeShift = std::max(rep.resGaugeShift, std::abs(lhs - rhs));
    }
    auto [P, D] = ambient_dalpha_parts(aGauged, b0.p);
    Eigen::MatrixXcd closed = smp.fiber.adjoint() * (P + D).transpose() * smp.fiber;
    rep.resClosedness = std::max(rep.resClosedness, closed.cwiseAbs().maxCoeff());
    Eigen::MatrixXcd rawDbar = smp.fiber.adjoint() * D.transpose() * smp.fiber;
    rep.resHermitian =
        std::max(rep.resHermitian, (rawDbar - rawDbar.adjoint()).cwiseAbs().maxCoeff());
    ++rep.checked;
  }
  return rep;
}

double sigma_distance(const DefiningFunction& r1, const DefiningFunction& r2,
                      const SampledDistribution& nullDist) {
  // orientation check on a short inward collar below a few support points
  int checked = 0;
  for (const auto& smp : nullDist.samples) {
    if (smp.fiber.cols() == 0 || checked >= 5) break;
    BoundaryPoint bp = project_to_boundary(r1, to_complex(smp.x));
    for (double s : {1e-3, 1e-2}) {
      Eigen::VectorXcd q = bp.p;
      for (int j = 0; j < q.size(); ++j)
        q(j) -= s * std::conj(bp.dr(j)) / bp.dr.norm();
      const double v1 = r1.eval(q), v2 = r2.eval(q);
      if (v1 * v2 <= 0.0)
        throw InvalidPairError("sigma: r2/r1 not positive on the collar");
    }
    ++checked;
  }
  DAngeloForm a1{&r1, nullptr, Eigen::VectorXd()};
  DAngeloForm a2{&r2, nullptr, Eigen::VectorXd()};
  double best = 0.0;
  for (const auto& smp : nullDist.samples) {
    if (smp.fiber.cols() == 0) continue;
    BoundaryPoint b1 = project_to_boundary(r1, to_complex(smp.x));
    BoundaryPoint b2 = project_to_boundary(r2, to_complex(smp.x));
    Eigen::VectorXcd d(smp.fiber.cols());
    for (int i = 0; i < smp.fiber.cols(); ++i)
      d(i) = alpha_eval(a2, b2, smp.fiber.col(i)) - alpha_eval(a1, b1, smp.fiber.col(i));
    best = std::max(best, d.norm());
  }
  return best;
}

}  // namespace levicore
