#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "levicore/wirtinger.hpp"

namespace levicore {

struct CalcError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EvaluationFailure : CalcError {
  using CalcError::CalcError;
};
struct NotSemidefiniteError : CalcError {
  using CalcError::CalcError;
};
struct InvalidFormError : CalcError {
  using CalcError::CalcError;
};

constexpr double kKernelAbsFloor = 1e-12;

/// Hermitian form on a k-dimensional complex fiber. Stored so that
/// value(Z, W) = W^* mat Z; null vectors of mat are null vectors of the
/// form. Built from derivative coefficients c(j,k) (the coefficient of
/// Z_j * conj(W_k)) via from_coeff, which transposes once and
/// symmetrizes, so every consumer shares one convention.
struct HermitianForm {
  Eigen::MatrixXcd mat;

  HermitianForm() = default;
  explicit HermitianForm(Eigen::MatrixXcd m) : mat(std::move(m)) {}

  int dim() const { return (int)mat.rows(); }

  static HermitianForm from_coeff(const Eigen::MatrixXcd& c) {
    Eigen::MatrixXcd m = c.transpose();
    m = 0.5 * (m + m.adjoint()).eval();
    return HermitianForm(std::move(m));
  }
  static HermitianForm zero(int k) { return HermitianForm(Eigen::MatrixXcd::Zero(k, k)); }

  cplx value(const Eigen::VectorXcd& Z, const Eigen::VectorXcd& W) const {
    return (W.adjoint() * mat * Z)(0);
  }
  double quad(const Eigen::VectorXcd& Z) const { return value(Z, Z).real(); }

  /// pullback to a sub-frame (columns of F): value is preserved on F c.
  HermitianForm restricted(const Eigen::MatrixXcd& F) const {
    Eigen::MatrixXcd m = F.adjoint() * mat * F;
    m = 0.5 * (m + m.adjoint()).eval();
    return HermitianForm(std::move(m));
  }
  double asym() const { return (mat - mat.adjoint()).cwiseAbs().maxCoeff(); }
};

struct EigH {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors; // orthonormal columns
};

EigH eig_herm(const HermitianForm& H);

/// Orthonormal basis of the numerical kernel span{v : |lambda| <= relTol*lambda_max},
/// with absolute floor for identically-zero forms. Throws NotSemidefiniteError
/// when an eigenvalue sits below -relTol*lambda_max (pseudoconvexity violation).
Eigen::MatrixXcd kernel_basis(const HermitianForm& H, double relTol,
                              double absFloor = kKernelAbsFloor);

/// t* = inf{ t > 0 : A <= t B } on a common frame. A must be PSD within tol.
/// B must be PSD within tol (otherwise InvalidFormError). Returns +inf when A
/// does not vanish on the numerical kernel of B.
double sup_ratio(const HermitianForm& A, const HermitianForm& B, double tol = 1e-9);

/// As sup_ratio but an indefinite B means "no t works": returns +inf instead
/// of throwing. Used by the norm optimizer where such candidates are merely
/// infeasible.
double ratio_or_inf(const HermitianForm& A, const HermitianForm& B, double tol = 1e-9);

// ---- derivative backends ------------------------------------------------

enum class DerivBackend { Dual, FiniteDiff };

using EvalFn = std::function<double(const Eigen::VectorXcd&)>;
using JetFn = std::function<WJet(const Eigen::VectorXcd&)>;

/// (d f/dz_1, ..., d f/dz_n) of a real-valued f at p.
Eigen::VectorXcd grad10_jet(const JetFn& jet, const Eigen::VectorXcd& p);
Eigen::VectorXcd grad10_fd(const EvalFn& eval, const Eigen::VectorXcd& p);

/// Raw coefficient matrix c(j,k) = d^2 f / dz_j dzbar_k.
Eigen::MatrixXcd hess_coeff_jet(const JetFn& jet, const Eigen::VectorXcd& p);
Eigen::MatrixXcd hess_coeff_fd(const EvalFn& eval, const Eigen::VectorXcd& p);

}  // namespace levicore
