#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "levicore/dangelo.hpp"

namespace levicore {

struct InvalidGridError : CalcError {
  using CalcError::CalcError;
};

/// Interior collar points -eps0 < r < 0 stratified by depth.
struct CollarGrid {
  std::vector<Eigen::VectorXcd> pts;
  Eigen::VectorXd rvals;  // r at each point, strictly negative
  double eps0 = 0.1;
  int strata = 4;
};

/// Push boundary points inward along the real gradient to hit the target
/// depths eps0 * {1/8, 1/4, 1/2, 1} (geometric, witnesses the blow-up term
/// without hitting r = 0).
CollarGrid build_collar(const DefiningFunction& f, const std::vector<BoundaryPoint>& sample,
                        double eps0, int strata = 4);

/// min over the grid of the smallest eigenvalue of
///   M_delta = Hess(r_c) + (1 - delta) (dr_c)(dr_c)^* / (-r_c),
/// with r_c = e^{f_c} r and the common e^{f_c} factor normalized away.
/// Positive value: -(-r_c)^delta is strictly psh on the sampled collar.
double psh_defect(const DefiningFunction& f, double delta, const CollarGrid& grid,
                  const GaugeBasis* basis = nullptr, const Eigen::VectorXd& coeff = {});

struct DfScanOptions {
  double deltaMin = 0.02;
  double deltaMax = 0.999;
  double deltaRes = 1e-3;
  double defectTol = 1e-8;
  int starts = 4;
  int evalsPerStart = 400;
  double startStep = 0.5;
};

struct DfScanResult {
  double deltaStar = 0.0;  // largest delta with defect >= -defectTol (0: none feasible)
  Eigen::VectorXd coeff;   // best gauge found (empty when scanning the canonical r)
  std::vector<std::pair<double, double>> defectCurve;  // (delta, defect) at the best gauge
  int evals = 0;
};

/// Route A: direct plurisubharmonicity scan, optionally maximized over a
/// gauge family. Lower bound on DF by construction.
DfScanResult df_scan(const DefiningFunction& f, const CollarGrid& grid,
                     const DfScanOptions& opt, const GaugeBasis* basis = nullptr,
                     std::uint64_t seed = 1,
                     const std::vector<Eigen::VectorXd>& extraStarts = {});

struct RouteB {
  NormEstimate est;
  double df = 1.0;  // 1/(1 + n); a lower bound on DF up to sampling error
};

RouteB df_via_norm(const DefiningFunction& f, const SampledDistribution& dist,
                   const GaugeBasis& basis, double K, const OptBudget& budget,
                   std::uint64_t seed, const std::vector<Eigen::VectorXd>& extraStarts = {});

struct ReductionReport {
  double nullSmall = 0, coreSmall = 0, nullLarge = 0, coreLarge = 0;
  double gapSmall = 0, gapLarge = 0;
  bool monotoneOk = false;       // value(core) <= value(null) + 1e-9 at both sizes
  bool gapNonIncreasing = false; // gapLarge <= gapSmall + 1e-9
};

/// Runs optimize_n on the null distribution and on its core at two basis
/// sizes with identical budgets; the core run is seeded with the null run's
/// argmin so the monotonicity holds structurally. warmStarts apply to both
/// null runs (and are forwarded to the core runs).
ReductionReport reduction_check(const DefiningFunction& f, const SampledDistribution& nullDist,
                                const SampledDistribution& core, const GaugeBasis& basisSmall,
                                const GaugeBasis& basisLarge, double K, const OptBudget& budget,
                                std::uint64_t seed,
                                const std::vector<Eigen::VectorXd>& warmStarts = {});

/// | N(dd r(Z, conj Z)) - (dAlpha(Z, conj Z) - |alpha(Z)|^2 / 2) | at bp,
/// for Z in the numerical Levi kernel; the derivative is taken of the
/// projected tangential extension of Z (so Z r = 0 along the way).
double key_lemma_check(const DefiningFunction& f, const BoundaryPoint& bp,
                       const Eigen::VectorXcd& Z, double angleTolDeg = 5.0);

}  // namespace levicore
