#include "levicore/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "levicore/parallel.hpp"

namespace levicore {

Eigen::VectorXd to_real(const Eigen::VectorXcd& z) {
  Eigen::VectorXd x(2 * z.size());
  for (int j = 0; j < z.size(); ++j) {
    x(2 * j) = z(j).real();
    x(2 * j + 1) = z(j).imag();
  }
  return x;
}

Eigen::VectorXcd to_complex(const Eigen::VectorXd& x) {
  Eigen::VectorXcd z(x.size() / 2);
  for (int j = 0; j < z.size(); ++j) z(j) = cplx(x(2 * j), x(2 * j + 1));
  return z;
}

Eigen::VectorXcd grad10(const DefiningFunction& f, const Eigen::VectorXcd& p, DerivBackend b) {
  return b == DerivBackend::Dual ? grad10_jet(f.jet, p) : grad10_fd(f.eval, p);
}

Eigen::MatrixXcd hess_coeff(const DefiningFunction& f, const Eigen::VectorXcd& p, DerivBackend b) {
  return b == DerivBackend::Dual ? hess_coeff_jet(f.jet, p) : hess_coeff_fd(f.eval, p);
}

HermitianForm hess_mixed(const DefiningFunction& f, const Eigen::VectorXcd& p, DerivBackend b) {
  return HermitianForm::from_coeff(hess_coeff(f, p, b));
}

BoundaryPoint project_to_boundary(const DefiningFunction& f, const Eigen::VectorXcd& z0,
                                  const ProjectOptions& opt) {
  if (!f.box.contains(z0) || !f.is_valid(z0))
    throw ProjectionFailure("projection start outside the domain box");
  Eigen::VectorXcd z = z0;
  double rv = f.eval(z);
  if (!std::isfinite(rv)) throw EvaluationFailure("projection start evaluates non-finite");
  Eigen::VectorXcd g;
  bool done = false;
  for (int it = 0; it < opt.maxIter; ++it) {
    if (std::abs(rv) <= opt.boundaryTol) {
      done = true;
      break;
    }
    g = grad10_jet(f.jet, z);
    const double g2 = g.squaredNorm();
    if (std::sqrt(g2) < 1e-10) throw DegenerateGradient("gradient below 1e-10 on Newton path");
    // Newton step for the scalar constraint along the real gradient
    for (int j = 0; j < z.size(); ++j) z(j) -= rv * std::conj(g(j)) / (2.0 * g2);
    if (!f.is_valid(z)) throw ProjectionFailure("Newton path left the validity region");
    rv = f.eval(z);
    if (!std::isfinite(rv)) throw EvaluationFailure("non-finite along Newton path");
  }
  if (!done && std::abs(rv) > opt.boundaryTol)
    throw ProjectionFailure("no convergence to |r| <= tol in " + std::to_string(opt.maxIter) +
                            " steps");

  BoundaryPoint bp;
  bp.p = z;
  bp.residual = std::abs(rv);
  bp.dr = grad10_jet(f.jet, z);
  const double d2 = bp.dr.squaredNorm();
  if (std::sqrt(d2) < 1e-10) throw DegenerateGradient("degenerate gradient at boundary point");
  bp.N = bp.dr.conjugate() / d2;  // dr(N) = 1 by construction

  // deterministic Gram-Schmidt on the canonical basis, skipping the
  // direction most parallel to dr
  const int n = (int)z.size();
  int skip = 0;
  for (int j = 1; j < n; ++j)
    if (std::abs(bp.dr(j)) > std::abs(bp.dr(skip))) skip = j;
  bp.frame.resize(n, n - 1);
  int c = 0;
  for (int j = 0; j < n; ++j) {
    if (j == skip) continue;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    v(j) = 1.0;
    v -= bp.dr(j) * bp.N;  // project onto ker dr
    for (int i = 0; i < c; ++i) v -= (bp.frame.col(i).adjoint() * v)(0) * bp.frame.col(i);
    const double nv = v.norm();
    if (nv < 1e-12) throw ProjectionFailure("frame construction degenerated");
    bp.frame.col(c++) = v / nv;
  }
  for (int i = 0; i < n - 1; ++i)
    if (std::abs((bp.dr.transpose() * bp.frame.col(i))(0)) > opt.frameTol)
      throw ProjectionFailure("frame vector not tangential within tolerance");
  return bp;
}

HermitianForm levi_form(const DefiningFunction& f, const BoundaryPoint& bp) {
  return HermitianForm::from_coeff(hess_coeff(f, bp.p)).restricted(bp.frame);
}

PseudoconvexityReport pseudoconvexity_report(const DefiningFunction& f,
                                             const std::vector<BoundaryPoint>& sample,
                                             double violTol) {
  PseudoconvexityReport rep;
  rep.tolerance = violTol;
  if (sample.empty()) return rep;
  std::vector<double> mins(sample.size());
  par::for_index(sample.size(), [&](std::size_t i) {
    mins[i] = eig_herm(levi_form(f, sample[i])).values.minCoeff();
  });
  rep.minEigenvalue = mins[0];
  for (std::size_t i = 0; i < mins.size(); ++i) {
    rep.minEigenvalue = std::min(rep.minEigenvalue, mins[i]);
    if (mins[i] < -violTol) rep.violations.push_back((int)i);
  }
  return rep;
}

namespace {

// lattice seeds covering the box, deterministic order
std::vector<Eigen::VectorXcd> lattice_seeds(const Box& box, int dim, int want) {
  const int per = std::max(2, (int)std::ceil(std::pow((double)want * 3.0, 1.0 / dim)));
  std::vector<Eigen::VectorXcd> out;
  std::vector<int> idx(dim, 0);
  const long total = (long)std::pow((double)per, dim);
  for (long t = 0; t < total; ++t) {
    Eigen::VectorXd x(dim);
    long rem = t;
    for (int d = 0; d < dim; ++d) {
      const int i = rem % per;
      rem /= per;
      x(d) = box.lo(d) + (box.hi(d) - box.lo(d)) * (i + 0.5) / per;
    }
    out.push_back(to_complex(x));
  }
  return out;
}

}  // namespace

BoundarySample sample_boundary(const DefiningFunction& f, SampleStrategy strategy, int count,
                               std::uint64_t seed, const ParamSampler* param,
                               const ProjectOptions& opt) {
  BoundarySample out;
  std::vector<Eigen::VectorXcd> seeds;
  switch (strategy) {
    case SampleStrategy::Grid:
      seeds = lattice_seeds(f.box, 2 * f.n, count);
      break;
    case SampleStrategy::Random: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i < count * 8; ++i) {
        Eigen::VectorXd x(2 * f.n);
        for (int d = 0; d < 2 * f.n; ++d) x(d) = f.box.lo(d) + (f.box.hi(d) - f.box.lo(d)) * u(rng);
        seeds.push_back(to_complex(x));
      }
      break;
    }
    case SampleStrategy::Param: {
      if (!param) throw CalcError("param sampling requested but domain has no parametrization");
      seeds = (*param)(count);
      break;
    }
  }

  std::vector<std::optional<BoundaryPoint>> hits(seeds.size());
  par::for_index(seeds.size(), [&](std::size_t i) {
    const auto& s = seeds[i];
    if (!f.is_valid(s)) return;
    try {
      BoundaryPoint bp = project_to_boundary(f, s, opt);
      if (f.box.contains(bp.p) && f.is_valid(bp.p)) hits[i] = std::move(bp);
    } catch (const CalcError&) {
    }
  });
  const double dedup = 1e-8 * (1.0 + f.scale);
  for (auto& h : hits) {
    if (!h) continue;
    bool dup = false;
    for (const auto& q : out.points)
      if ((q.p - h->p).norm() < dedup) {
        dup = true;
        break;
      }
    if (!dup) out.points.push_back(std::move(*h));
    if ((int)out.points.size() >= count) break;
  }
  out.partial = (int)out.points.size() < count;
  return out;
}

}  // namespace levicore
