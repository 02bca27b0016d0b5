#pragma once

#include <Eigen/Dense>
#include <vector>

#include "levicore/gauge.hpp"

namespace levicore {

/// The circle-invariant norm problem on the annulus {rho1 < log|z| < rho2}
/// for the class of h(z) = beta log|z|^2. Radial reduction: a gauge f(rho)
/// is admissible at level lambda iff
///     f'(rho)^2 + 4 beta^2 <= lambda f''(rho)   on [rho1, rho2],
/// obtained from |d(f - i h)(Z)|^2 <= lambda (dd f)(Z, conj Z) on the unit
/// fiber after clearing the common 1/(4|z|^2) factor.
struct AnnulusProblem {
  double rho1 = -0.5, rho2 = 0.5;
  double beta = 1.0;
  int m = 64;  // radial mesh nodes, >= 16
};

struct OracleResult {
  double value = 0.0;  // upper end of the bisection bracket (feasible)
  bool feasible = true;
  int bisections = 0;
  Eigen::VectorXd slopes;  // recovered feasible inter-node slopes at the value
};

/// Bisection on lambda with an exact interval-DP feasibility sweep over the
/// inter-node slopes of the discretized gauge. Relative resolution 5e-4.
OracleResult annulus_norm_oracle(const AnnulusProblem& prob);

/// The closed-form continuum threshold 2 beta (rho2 - rho1) / pi of the
/// Riccati comparison; used by tests as an independent cross-check of the
/// sweep, never by the oracle itself.
double annulus_norm_closed_form(const AnnulusProblem& prob);

/// The oracle's graded radial mesh (clustered toward the annulus edges).
/// Ring samplers reuse it so the 3-D pipeline and the 1-D sweep resolve the
/// same boundary layers.
std::vector<double> annulus_oracle_nodes(const AnnulusProblem& prob);

/// Equality-profile radial gauge achieving ratio exactly t on the open
/// annulus (requires t > closed form): f(rho) = t log cos(2 beta (rho - c)/t),
/// concave in rho. Fitted to the Chebyshev radial basis by least squares;
/// used to warm-start the 3-D optimizer.
Eigen::VectorXd radial_equality_seed(const AnnulusProblem& prob, const GaugeBasis& radialBasis,
                                     double margin = 1.05);

struct AppendixNorms {
  double l1 = 0.0;    // inf over the class of the mean of |h|
  double linf = 0.0;  // inf over the class of sup |h|
  double ratio = 0.0; // l1^2 / (oracle * linf); reported, never asserted
  int evals = 0;
};

/// L^1- and L^infty-type norms of the class of h = beta log|z|^2 over the
/// annulus, minimizing |h - Re F| over F in the span of Laurent monomials
/// z^k, |k| <= d, by the same derivative-free optimizer.
AppendixNorms appendix_norms(const AnnulusProblem& prob, int laurentDeg, int budgetEvals,
                             std::uint64_t seed);

}  // namespace levicore
