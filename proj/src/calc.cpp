#include "levicore/calc.hpp"

#include <cmath>

namespace levicore {

EigH eig_herm(const HermitianForm& H) {
  if (H.dim() > 16) throw CalcError("eig_herm is for small fibers (dim <= 16)");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.mat);
  if (es.info() != Eigen::Success) throw CalcError("hermitian eigensolver failed");
  return EigH{es.eigenvalues(), es.eigenvectors()};
}

Eigen::MatrixXcd kernel_basis(const HermitianForm& H, double relTol, double absFloor) {
  const int k = H.dim();
  EigH e = eig_herm(H);
  const double lmax = e.values.size() ? e.values.maxCoeff() : 0.0;
  if (lmax <= absFloor) return Eigen::MatrixXcd::Identity(k, k);
  const double thr = std::max(relTol * lmax, absFloor);
  if (e.values.minCoeff() < -thr)
    throw NotSemidefiniteError("form has eigenvalue " + std::to_string(e.values.minCoeff()) +
                               " below -" + std::to_string(thr));
  int nk = 0;
  for (int i = 0; i < k; ++i)
    if (std::abs(e.values(i)) <= thr) ++nk;
  Eigen::MatrixXcd basis(k, nk);
  int c = 0;
  for (int i = 0; i < k; ++i)
    if (std::abs(e.values(i)) <= thr) basis.col(c++) = e.vectors.col(i);
  return basis;
}

namespace {

double ratio_impl(const HermitianForm& A, const HermitianForm& B, double tol, bool throwOnIndef) {
  if (A.dim() != B.dim()) throw InvalidFormError("sup_ratio: frame mismatch");
  const int k = A.dim();
  if (k == 0) return 0.0;
  EigH ea = eig_herm(A);
  EigH eb = eig_herm(B);
  const double sa = ea.values.cwiseAbs().maxCoeff();
  const double sb = eb.values.cwiseAbs().maxCoeff();
  const double tolA = std::max(tol * sa, kKernelAbsFloor);
  const double tolB = std::max(tol * sb, kKernelAbsFloor);
  if (ea.values.minCoeff() < -tolA) throw InvalidFormError("sup_ratio: A not PSD");
  if (eb.values.minCoeff() < -tolB) {
    if (throwOnIndef) throw InvalidFormError("sup_ratio: B has negative eigenvalue");
    return std::numeric_limits<double>::infinity();
  }
  // split B into numerical kernel and positive part
  std::vector<int> kerIdx, posIdx;
  for (int i = 0; i < k; ++i)
    (std::abs(eb.values(i)) <= tolB ? kerIdx : posIdx).push_back(i);
  for (int i : kerIdx) {
    const double q = A.quad(eb.vectors.col(i));
    if (q > tolA) return std::numeric_limits<double>::infinity();
  }
  if (posIdx.empty()) return 0.0;
  Eigen::MatrixXcd U(k, (int)posIdx.size());
  Eigen::VectorXd d((int)posIdx.size());
  for (int c = 0; c < (int)posIdx.size(); ++c) {
    U.col(c) = eb.vectors.col(posIdx[c]);
    d(c) = eb.values(posIdx[c]);
  }
  Eigen::VectorXd dinv = d.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXcd W = dinv.asDiagonal() * (U.adjoint() * A.mat * U) * dinv.asDiagonal();
  W = 0.5 * (W + W.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(W);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

}  // namespace

double sup_ratio(const HermitianForm& A, const HermitianForm& B, double tol) {
  return ratio_impl(A, B, tol, /*throwOnIndef=*/true);
}

double ratio_or_inf(const HermitianForm& A, const HermitianForm& B, double tol) {
  return ratio_impl(A, B, tol, /*throwOnIndef=*/false);
}

// ---- derivatives ---------------------------------------------------------

namespace {

void check_finite(double v, const Eigen::VectorXcd& p) {
  if (!std::isfinite(v)) {
    std::string s = "non-finite evaluation at (";
    for (int j = 0; j < p.size(); ++j)
      s += std::to_string(p(j).real()) + (p(j).imag() < 0 ? "" : "+") +
           std::to_string(p(j).imag()) + "i" + (j + 1 < p.size() ? ", " : ")");
    throw EvaluationFailure(s);
  }
}

WJet eval_jet(const JetFn& jet, const Eigen::VectorXcd& p) {
  WJet r = jet(p);
  check_finite(r.v.real(), p);
  return r;
}

// 4th-order central first derivative of a scalar callable along real axis d
template <class F>
auto d1(const F& f, double h) {
  return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
}

Eigen::VectorXcd shift(const Eigen::VectorXcd& p, int reDir, double t) {
  Eigen::VectorXcd q = p;
  const int j = reDir / 2;
  if (reDir % 2 == 0)
    q(j) += t;
  else
    q(j) += cplx(0.0, t);
  return q;
}

}  // namespace

Eigen::VectorXcd grad10_jet(const JetFn& jet, const Eigen::VectorXcd& p) {
  return eval_jet(jet, p).dz;
}

Eigen::MatrixXcd hess_coeff_jet(const JetFn& jet, const Eigen::VectorXcd& p) {
  return eval_jet(jet, p).h;
}

Eigen::VectorXcd grad10_fd(const EvalFn& eval, const Eigen::VectorXcd& p) {
  const int n = (int)p.size();
  const double eps = std::numeric_limits<double>::epsilon();
  const double h = std::cbrt(eps) * (1.0 + p.norm());
  Eigen::VectorXcd g(n);
  for (int j = 0; j < n; ++j) {
    auto fx = [&](double t) {
      double v = eval(shift(p, 2 * j, t));
      check_finite(v, p);
      return v;
    };
    auto fy = [&](double t) {
      double v = eval(shift(p, 2 * j + 1, t));
      check_finite(v, p);
      return v;
    };
    const double dx = d1(fx, h), dy = d1(fy, h);
    g(j) = 0.5 * cplx(dx, -dy);
  }
  return g;
}

Eigen::MatrixXcd hess_coeff_fd(const EvalFn& eval, const Eigen::VectorXcd& p) {
  // Step eps^{1/4}: the eps^{1/3} first-derivative step amplifies roundoff
  // past 1e-5 on second derivatives with 4th-order stencils.
  const int n = (int)p.size();
  const double eps = std::numeric_limits<double>::epsilon();
  const double h = std::pow(eps, 0.25) * (1.0 + p.norm());
  const int m = 2 * n;
  // second derivatives over the real coordinates via nested 4th-order stencils
  auto d2 = [&](int a, int b) {
    if (a == b) {
      auto f = [&](double t) { return eval(shift(p, a, t)); };
      return (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);
    }
    auto g = [&](double s) {
      auto f = [&](double t) { return eval(shift(shift(p, a, s), b, t)); };
      return d1(f, h);
    };
    return d1(g, h);
  };
  Eigen::MatrixXd D(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) D(a, b) = D(b, a) = d2(a, b);
  Eigen::MatrixXcd C(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const int xj = 2 * j, yj = 2 * j + 1, xk = 2 * k, yk = 2 * k + 1;
      C(j, k) = 0.25 * cplx(D(xj, xk) + D(yj, yk), D(xj, yk) - D(yj, xk));
    }
  return C;
}

}  // namespace levicore
