#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "levicore/calc.hpp"

namespace levicore {

struct ProjectionFailure : CalcError {
  using CalcError::CalcError;
};
struct DegenerateGradient : CalcError {
  using CalcError::CalcError;
};

/// Axis-aligned box in the 2n real coordinates (Re z_1, Im z_1, ...).
struct Box {
  Eigen::VectorXd lo, hi;
  bool contains(const Eigen::VectorXcd& z) const {
    for (int j = 0; j < z.size(); ++j) {
      if (z(j).real() < lo(2 * j) || z(j).real() > hi(2 * j)) return false;
      if (z(j).imag() < lo(2 * j + 1) || z(j).imag() > hi(2 * j + 1)) return false;
    }
    return true;
  }
  static Box cube(int n, double a) {
    Box b;
    b.lo = Eigen::VectorXd::Constant(2 * n, -a);
    b.hi = Eigen::VectorXd::Constant(2 * n, a);
    return b;
  }
};

/// A smooth real-valued r with Omega = {r < 0}; the single source of all
/// geometry. `eval` is the fast scalar path, `jet` the exact-derivative path.
struct DefiningFunction {
  std::string id;
  int n = 2;
  std::map<std::string, double> params;
  Box box;
  EvalFn eval;
  JetFn jet;
  std::function<bool(const Eigen::VectorXcd&)> valid;  // extra validity (may be null)
  double scale = 1.0;

  bool is_valid(const Eigen::VectorXcd& z) const { return !valid || valid(z); }
};

Eigen::VectorXcd grad10(const DefiningFunction& f, const Eigen::VectorXcd& p,
                        DerivBackend b = DerivBackend::Dual);
HermitianForm hess_mixed(const DefiningFunction& f, const Eigen::VectorXcd& p,
                         DerivBackend b = DerivBackend::Dual);
/// raw coefficient matrix c(j,k) = d^2 r/dz_j dzbar_k (no transpose)
Eigen::MatrixXcd hess_coeff(const DefiningFunction& f, const Eigen::VectorXcd& p,
                            DerivBackend b = DerivBackend::Dual);

struct BoundaryPoint {
  Eigen::VectorXcd p;      // on {r = 0} within residual
  Eigen::VectorXcd dr;     // (d r/dz_j)
  Eigen::VectorXcd N;      // (1,0) normal with dr(N) = 1
  Eigen::MatrixXcd frame;  // n x (n-1), orthonormal basis of ker dr
  double residual = 0.0;
};

struct ProjectOptions {
  double boundaryTol = 1e-10;
  double frameTol = 1e-9;
  int maxIter = 50;
};

BoundaryPoint project_to_boundary(const DefiningFunction& f, const Eigen::VectorXcd& z0,
                                  const ProjectOptions& opt = {});

/// Levi form on the tangential frame: restriction of the complex Hessian.
HermitianForm levi_form(const DefiningFunction& f, const BoundaryPoint& bp);

struct PseudoconvexityReport {
  double minEigenvalue = 0.0;
  std::vector<int> violations;  // indices into the sample
  double tolerance = 0.0;
};

PseudoconvexityReport pseudoconvexity_report(const DefiningFunction& f,
                                             const std::vector<BoundaryPoint>& sample,
                                             double violTol = 1e-8);

enum class SampleStrategy { Grid, Random, Param };

struct BoundarySample {
  std::vector<BoundaryPoint> points;
  bool partial = false;  // fewer than requested projections succeeded
};

using ParamSampler = std::function<std::vector<Eigen::VectorXcd>(int)>;

BoundarySample sample_boundary(const DefiningFunction& f, SampleStrategy strategy, int count,
                               std::uint64_t seed, const ParamSampler* param = nullptr,
                               const ProjectOptions& opt = {});

// real 2n-vector <-> complex n-vector
Eigen::VectorXd to_real(const Eigen::VectorXcd& z);
Eigen::VectorXcd to_complex(const Eigen::VectorXd& x);

}  // namespace levicore
