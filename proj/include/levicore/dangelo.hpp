#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "levicore/distributions.hpp"
#include "levicore/gauge.hpp"
#include "levicore/hypersurface.hpp"

namespace levicore {

struct IllPosedFiber : CalcError {
  using CalcError::CalcError;
};
struct InvalidPairError : CalcError {
  using CalcError::CalcError;
};

/// The size-and-gauge data of a one-form alpha = alpha_r + df: the base
/// defining function plus gauge coefficients over a registered basis.
/// With f = 0 this is the canonical one-form alpha(Z) = H_r(Z, conj N),
/// N the (1,0) normal normalized by dr(N) = 1.
struct DAngeloForm {
  const DefiningFunction* r = nullptr;
  const GaugeBasis* basis = nullptr;            // may be null when coeff is empty
  Eigen::VectorXd coeff;                        // gauge coefficients (may be size 0)
};

/// alpha(Z) for a tangential (1,0) vector Z at bp.
cplx alpha_eval(const DAngeloForm& a, const BoundaryPoint& bp, const Eigen::VectorXcd& Z);

/// The (1,0) part beta of the ambient extension alphaTilde = beta + conj(beta),
/// beta_j = (C_r conj N)_j + df_{1,0}. Defined wherever dr != 0.
Eigen::VectorXcd ambient_alpha_10(const DAngeloForm& a, const Eigen::VectorXcd& q);

/// Hermitian forms on a fiber inside the Levi kernel at bp. dbar is the
/// (0,1)-derivative part of d alphaTilde; dAlpha the (1,0) part; the (1,1)
/// component of d alphaTilde is their sum. All use the wedge normalization
/// (b ^ c)(Z, conj W) = (b(Z) c(conj W) - b(conj W) c(Z)) / 2.
struct FormsAtPoint {
  HermitianForm dbar;    // dbar alpha_{1,0} restricted to the fiber
  HermitianForm dAlpha;  // partial alpha restricted to the fiber
  Eigen::VectorXcd alphaOnFiber;
};
FormsAtPoint forms_at_point(const DAngeloForm& a, const BoundaryPoint& bp,
                            const Eigen::MatrixXcd& fiber, double angleTolDeg = 5.0);

HermitianForm dbar_alpha(const DAngeloForm& a, const BoundaryPoint& bp,
                         const Eigen::MatrixXcd& fiber);
HermitianForm wedge_alpha(const DAngeloForm& a, const BoundaryPoint& bp,
                          const Eigen::MatrixXcd& fiber);

/// Raw ambient coefficient matrices of the (1,1) component of d alphaTilde,
/// split into the partial part P and the dbar part D (P + D restricted to
/// the null fibers vanishes for a D'Angelo form). Central differences of
/// the ambient field.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> ambient_dalpha_parts(const DAngeloForm& a,
                                                                   const Eigen::VectorXcd& q);

// ---- cached evaluation over a sampled distribution ------------------------

/// Per-point caches that make the norm objective linear algebra only:
/// alpha and dbar are affine in the gauge coefficients.
class EvalContext {
 public:
  static EvalContext build(const DefiningFunction& f, const SampledDistribution& dist,
                           const GaugeBasis* basis, double angleTolDeg = 5.0);

  int points() const { return (int)pts_.size(); }
  int gaugeDim() const { return basis_ ? basis_->count() : 0; }
  const GaugeBasis* basis() const { return basis_; }
  const DefiningFunction& fn() const { return *f_; }

  /// sup over support points of sup_ratio(wedge, dbar); +inf when any point
  /// is infeasible (dbar indefinite or alpha nonzero on its kernel).
  double n_at(const Eigen::VectorXd& coeff, int* worstPoint = nullptr) const;
  /// sup over support points and unit fiber vectors of |alpha(Z)|
  double size_at(const Eigen::VectorXd& coeff) const;
  /// max over points of lambda_max(wedge - t dbar), for the feasibility probe
  double violation_at(const Eigen::VectorXd& coeff, double t) const;

  struct Point {
    BoundaryPoint bp;
    Eigen::MatrixXcd fiber;                // n x k
    Eigen::VectorXcd alpha0;               // k
    Eigen::MatrixXcd dbar0;                // k x k (value convention of HermitianForm)
    Eigen::MatrixXcd dAlphaGauge;          // k x m, entries dphi_m(Z_i)
    std::vector<Eigen::MatrixXcd> dbarG;   // m matrices, k x k
  };
  const std::vector<Point>& data() const { return pts_; }

 private:
  const DefiningFunction* f_ = nullptr;
  const GaugeBasis* basis_ = nullptr;
  std::vector<Point> pts_;
};

double n_of_form(const DAngeloForm& a, const SampledDistribution& dist);
double size_norm(const DAngeloForm& a, const SampledDistribution& dist);

struct OptBudget {
  int starts = 8;
  int evalsPerStart = 2000;
  double startStep = 0.5;
  double bisectRelTol = 0.005;
  int feasEvals = 600;
};

struct NormEstimate {
  double value = 0.0;  // upper bound on the true infimum by construction
  Eigen::VectorXd coeff;
  std::string basisId;
  double K = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  int evals = 0;
  int worstPoint = -1;
  double sizeAtOpt = 0.0;
  bool allInfeasible = false;
  std::vector<double> perPointRatio;  // diagnostics at the optimum
};

/// min over gauge coefficients of n_of_form subject to size_norm < K:
/// multi-start simplex search followed by bisection on t with a feasibility
/// probe. extraStarts are evaluated as additional starting simplices (used
/// for warm starts and for the structural monotonicity guarantees).
NormEstimate optimize_n(const DefiningFunction& f, const SampledDistribution& dist,
                        const GaugeBasis& basis, double K, const OptBudget& budget,
                        std::uint64_t seed, const std::vector<Eigen::VectorXd>& extraStarts = {});

struct ConsistencyReport {
  double resGaugeShift = 0.0;   // alpha under e^f r vs alpha + df, on null fibers
  double resClosedness = 0.0;   // (1,1) part of d alphaTilde on the null fibers
  double resHermitian = 0.0;    // asymmetry of dbar before symmetrization
  int checked = 0;
  bool skipped = false;  // empty null distribution
};

ConsistencyReport consistency_suite(const DefiningFunction& f, const GaugeBasis& basis,
                                    const Eigen::VectorXd& fCoeff,
                                    const SampledDistribution& dist);

/// sigma(r1, r2) = size of (alpha_2 - alpha_1) on the null distribution;
/// requires r2/r1 > 0 on a collar (same orientation).
double sigma_distance(const DefiningFunction& r1, const DefiningFunction& r2,
                      const SampledDistribution& nullDist);

}  // namespace levicore
