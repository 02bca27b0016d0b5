#include "levicore/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "levicore/parallel.hpp"

namespace levicore {

Eigen::VectorXd principal_angles(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& V) {
  if (U.cols() == 0 || V.cols() == 0) return Eigen::VectorXd();
  Eigen::MatrixXcd M = U.adjoint() * V;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  Eigen::VectorXd s = svd.singularValues();
  const int k = (int)std::min(U.cols(), V.cols());
  Eigen::VectorXd ang(k);
  for (int i = 0; i < k; ++i) ang(i) = std::acos(std::clamp(s(i), 0.0, 1.0));
  return ang;
}

Eigen::MatrixXcd embed_t10(const Eigen::MatrixXcd& fiber) {
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(2 * fiber.rows(), fiber.cols());
  E.topRows(fiber.rows()) = fiber;
  return E;
}

Eigen::MatrixXcd embed_complexified_real(const Eigen::MatrixXd& T) {
  // real vector u in R^{2n} ~ a in C^n; complexified span contains (a; conj a)
  const int n = (int)T.rows() / 2;
  Eigen::MatrixXcd E(2 * n, T.cols());
  for (int c = 0; c < T.cols(); ++c) {
    for (int j = 0; j < n; ++j) {
      const cplx a(T(2 * j, c), T(2 * j + 1, c));
      E(j, c) = a;
      E(n + j, c) = std::conj(a);
    }
  }
  // orthonormalize with column pivoting; drop nearly dependent columns
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(E);
  qr.setThreshold(1e-10);
  const int rank = (int)qr.rank();
  Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(2 * n, rank);
  return Q;
}

double median_nn_spacing(const std::vector<Eigen::VectorXd>& pts) {
  if (pts.size() < 2) return 0.0;
  std::vector<double> nn(pts.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      nn[i] = std::min(nn[i], (pts[i] - pts[j]).norm());
    }
  std::sort(nn.begin(), nn.end());
  return nn[nn.size() / 2];
}

namespace {

struct Fit {
  Eigen::MatrixXd basis;     // m x d
  double retention = 0.0;
  double gap = 0.0;          // sigma_{d+1}/sigma_1 over inliers
  bool gapConsistent = true;
  bool boundaryLike = false; // trimmed-out mass sits on one side of the fit
  Eigen::VectorXd sigma;
};

Eigen::MatrixXd top_eigvecs(const Eigen::MatrixXd& M, int d) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const int m = (int)M.rows();
  Eigen::MatrixXd B(m, d);
  for (int i = 0; i < d; ++i) B.col(i) = es.eigenvectors().col(m - 1 - i);
  return B;
}

double residual_to(const Eigen::MatrixXd& basis, const Eigen::VectorXd& v) {
  if (basis.cols() == 0) return v.norm();
  return (v - basis * (basis.transpose() * v)).norm();
}

}  // namespace

TangentEstimate tangent_estimate(const std::vector<Eigen::VectorXd>& cloud,
                                 const Eigen::VectorXd& p, double scale,
                                 const TangentOptions& opt) {
  const int m = (int)p.size();
  std::vector<Eigen::VectorXd> rel;
  std::vector<double> w0;
  const double sigmaW = scale / 3.0;
  for (const auto& q : cloud) {
    const double d = (q - p).norm();
    if (d > scale || d < 1e-14) continue;
    rel.push_back(q - p);
    w0.push_back(std::exp(-0.5 * (d / sigmaW) * (d / sigmaW)));
  }
  TangentEstimate te;
  te.scale = scale;
  if (rel.empty()) {  // isolated point: zero subspace
    te.basis = Eigen::MatrixXd(m, 0);
    return te;
  }
  if ((int)rel.size() < opt.minNeighbors)
    throw InsufficientSampling("tangent estimate: only " + std::to_string(rel.size()) +
                               " neighbors within radius " + std::to_string(scale));
  const double wtot = std::accumulate(w0.begin(), w0.end(), 0.0);
  const double cut = 2.0 * opt.eta * scale;

  auto fit_dim = [&](int d) {
    Fit f;
    std::vector<double> w = w0;
    Eigen::MatrixXd basis(m, 0);
    for (int round = 0; round <= opt.reweighRounds; ++round) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
      for (std::size_t i = 0; i < rel.size(); ++i) M += w[i] * rel[i] * rel[i].transpose();
      basis = d > 0 ? top_eigvecs(M, d) : Eigen::MatrixXd(m, 0);
      if (round == opt.reweighRounds) break;
      for (std::size_t i = 0; i < rel.size(); ++i) {
        const double r = residual_to(basis, rel[i]);
        const double t = r / (opt.eta * scale);
        w[i] = w0[i] * std::exp(-0.5 * t * t);
      }
    }
    double kept = 0.0, wout = 0.0, rms2 = 0.0;
    Eigen::MatrixXd Min = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd outMean = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i < rel.size(); ++i) {
      Eigen::VectorXd resVec =
          basis.cols() ? (rel[i] - basis * (basis.transpose() * rel[i])).eval() : rel[i];
      if (resVec.norm() <= cut) {
        kept += w0[i];
        Min += w0[i] * rel[i] * rel[i].transpose();
      } else {
        wout += w0[i];
        outMean += w0[i] * resVec;
        rms2 += w0[i] * resVec.squaredNorm();
      }
    }
    f.retention = kept / wtot;
    f.basis = basis;
    // A genuine d-dim set with transverse contamination sheds outliers
    // symmetrically; a point at the edge of a (d+1)-dim patch sheds them
    // all to one side. The latter must not be mistaken for dimension d.
    if (wout / wtot >= 0.25 && d < m && rms2 > 0) {
      const double oneSided = (outMean / wout).norm() / std::sqrt(rms2 / wout);
      f.boundaryLike = oneSided >= 0.6;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Min);
    Eigen::VectorXd sig = es.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
    f.sigma = sig;
    const double s1 = sig.size() ? sig(0) : 0.0;
    if (s1 <= 0) {
      f.gapConsistent = (d == 0);
      return f;
    }
    // retained directions above the gap, discarded ones below it
    f.gapConsistent = true;
    if (d < m && sig(d) > opt.gapRatio * s1) f.gapConsistent = false;
    if (d > 0 && sig(d - 1) < opt.gapRatio * s1) f.gapConsistent = false;
    f.gap = (d < m && d > 0) ? sig(d) / s1 : 0.0;
    return f;
  };

  Fit best;
  int bestDim = -1;
  bool accepted = false;
  for (int d = 0; d <= m; ++d) {
    if (d > (int)rel.size()) break;  // cannot fit more directions than neighbors
    Fit f = fit_dim(d);
    if (f.retention >= opt.retainMin && f.gapConsistent && !f.boundaryLike) {
      best = f;
      bestDim = d;
      accepted = true;
      break;
    }
    if (bestDim < 0 || f.retention > best.retention) {
      best = f;
      bestDim = d;
    }
  }
  te.basis = best.basis;
  te.spectrumGap = best.gap;
  te.retention = best.retention;
  te.lowConfidence = !accepted;
  return te;
}

namespace {

std::vector<Eigen::VectorXd> support_points(const SampledDistribution& dist) {
  std::vector<Eigen::VectorXd> pts;
  for (const auto& s : dist.samples)
    if (s.fiber.cols() > 0) pts.push_back(s.x);
  return pts;
}

Eigen::MatrixXcd intersect_fiber_with_tangent(const SampledDistribution& dist,
                                              const Eigen::MatrixXcd& fiber,
                                              const Eigen::MatrixXd& tangent, double angleTol) {
  if (fiber.cols() == 0) return fiber;
  if (tangent.cols() == 0) return Eigen::MatrixXcd(fiber.rows(), 0);
  Eigen::MatrixXcd U, V;
  if (dist.complexKind) {
    U = embed_t10(fiber);
    V = embed_complexified_real(tangent);
  } else {
    U = fiber;
    V = tangent.cast<cplx>();
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(U.adjoint() * V, Eigen::ComputeFullU);
  Eigen::VectorXd s = svd.singularValues();
  const double cmin = std::cos(angleTol);
  int k = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) >= cmin) ++k;
  Eigen::MatrixXcd keep = svd.matrixU().leftCols(k);
  return fiber * keep;  // back to ambient fiber coordinates, still orthonormal
}

}  // namespace

SampledDistribution derived(const SampledDistribution& dist, const DerivedOptions& opt) {
  SampledDistribution out = dist;
  out.iteration = dist.iteration + 1;
  auto sup = support_points(dist);
  if (sup.empty()) return out;
  double scale = opt.scale;
  if (scale <= 0) scale = 3.0 * median_nn_spacing(sup);
  if (scale <= 0) scale = 1.0;  // single support point: isolated either way
  const double angleTol = opt.angleTolDeg * M_PI / 180.0;

  par::for_index(out.samples.size(), [&](std::size_t i) {
    auto& smp = out.samples[i];
    if (smp.fiber.cols() == 0) return;
    TangentEstimate te = tangent_estimate(sup, smp.x, scale, opt.tangent);
    smp.fiber = intersect_fiber_with_tangent(dist, smp.fiber, te.basis, angleTol);
  });
  return out;
}

namespace {

bool same_distribution(const SampledDistribution& a, const SampledDistribution& b,
                       double angleTol) {
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const auto& fa = a.samples[i].fiber;
    const auto& fb = b.samples[i].fiber;
    if (fa.cols() != fb.cols()) return false;
    if (fa.cols() == 0) continue;
    Eigen::VectorXd ang = principal_angles(fa, fb);
    if (ang.size() && ang.maxCoeff() > angleTol) return false;
  }
  return true;
}

}  // namespace

CoreResult iterate_to_core(const SampledDistribution& dist, int maxIter,
                           const DerivedOptions& opt) {
  CoreResult res;
  const double angleTol = opt.angleTolDeg * M_PI / 180.0;
  SampledDistribution cur = dist;
  res.supportSizes.push_back(cur.support_size());
  for (int k = 1; k <= maxIter; ++k) {
    SampledDistribution next = derived(cur, opt);
    res.supportSizes.push_back(next.support_size());
    if (next.empty_support() || same_distribution(next, cur, angleTol)) {
      res.core = std::move(next);
      res.k = k;
      res.stabilized = true;
      return res;
    }
    cur = std::move(next);
  }
  res.core = std::move(cur);
  res.k = maxIter;
  res.stabilized = false;  // never silently truncated: caller must check
  return res;
}

bool zero_holo_dim_check(const std::vector<Eigen::VectorXd>& A, const Eigen::VectorXd& p,
                         const Eigen::MatrixXcd& nullAtP, double scale,
                         const DerivedOptions& opt) {
  if (nullAtP.cols() == 0) return true;
  TangentEstimate te = tangent_estimate(A, p, scale, opt.tangent);
  if (te.basis.cols() == 0) return true;  // isolated point: zero tangent
  Eigen::MatrixXcd U = embed_t10(nullAtP);
  Eigen::MatrixXcd V = embed_complexified_real(te.basis);
  Eigen::VectorXd ang = principal_angles(U, V);
  const double angleTol = opt.angleTolDeg * M_PI / 180.0;
  return ang.size() == 0 || ang.minCoeff() > angleTol;
}

SampledDistribution levi_null(const DefiningFunction& f, const std::vector<BoundaryPoint>& sample,
                              double relTol) {
  SampledDistribution dist;
  dist.complexKind = true;
  dist.pointDim = 2 * f.n;
  dist.fiberDim = f.n;
  dist.sourceTol = relTol;
  dist.samples.resize(sample.size());

  std::vector<HermitianForm> levi(sample.size());
  par::for_index(sample.size(), [&](std::size_t i) { levi[i] = levi_form(f, sample[i]); });

  double lref = 0.0;
  for (const auto& L : levi) lref = std::max(lref, eig_herm(L).values.maxCoeff());
  const double thr = std::max(relTol * lref, kKernelAbsFloor);

  par::for_index(sample.size(), [&](std::size_t i) {
    auto& smp = dist.samples[i];
    smp.x = to_real(sample[i].p);
    EigH e = eig_herm(levi[i]);
    if (e.values.minCoeff() < -thr)
      throw NotSemidefiniteError("pseudoconvexity violation in levi_null at sample " +
                                 std::to_string(i));
    int nk = 0;
    for (int j = 0; j < e.values.size(); ++j)
      if (e.values(j) <= thr) ++nk;
    Eigen::MatrixXcd kerFrame(e.vectors.rows(), nk);
    int c = 0;
    for (int j = 0; j < e.values.size(); ++j)
      if (e.values(j) <= thr) kerFrame.col(c++) = e.vectors.col(j);
    // frame coordinates -> ambient T^{1,0} coordinates
    smp.fiber = sample[i].frame * kerFrame;
  });
  return dist;
}

}  // namespace levicore
