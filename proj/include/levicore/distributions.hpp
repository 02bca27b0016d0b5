#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "levicore/hypersurface.hpp"

namespace levicore {

struct InsufficientSampling : CalcError {
  using CalcError::CalcError;
};

/// Finite sample of a distribution of subspaces. Points are real vectors
/// (for a hypersurface in C^n: the 2n real coordinates). Complex-kind
/// fibers are subspaces of T^{1,0}, stored as n x k column bases in the
/// ambient z-coordinates; real-kind fibers are m x k real bases (kept in
/// complex storage with zero imaginary part).
struct SampledDistribution {
  bool complexKind = true;
  int pointDim = 0;   // real dimension of the sample points
  int fiberDim = 0;   // ambient dimension of fiber vectors (n complex or m real)
  double sourceTol = 0.0;
  int iteration = 0;

  struct Sample {
    Eigen::VectorXd x;
    Eigen::MatrixXcd fiber;  // orthonormal columns; 0 columns = trivial fiber
  };
  std::vector<Sample> samples;

  int support_size() const {
    int c = 0;
    for (const auto& s : samples)
      if (s.fiber.cols() > 0) ++c;
    return c;
  }
  bool empty_support() const { return support_size() == 0; }
};

struct TangentEstimate {
  Eigen::MatrixXd basis;   // pointDim x d orthonormal real basis, d may be 0
  double spectrumGap = 0;  // sigma_{d+1}/sigma_1 over the inlier weights (0 when d = full/0)
  double scale = 0;
  double retention = 1.0;  // base-weight fraction of inliers of the accepted fit
  bool lowConfidence = false;
};

struct TangentOptions {
  double gapRatio = 0.2;    // spectral-gap consistency ratio
  double eta = 0.15;        // inlier residual cut = 2*eta*scale
  double retainMin = 0.55;  // minimum base-weight retention to accept a dimension
  int reweighRounds = 4;
  // standalone estimates demand a usable neighborhood; the derived-
  // distribution engine relaxes this to 1 so that thin tips of a sampled
  // support (two collinear neighbors) still get their minimal container
  int minNeighbors = 3;
};

/// Local linear container of the cloud near p ("tangent" in the sampled
/// sense): robust weighted PCA with trimmed-retention model selection over
/// the dimension. Isolated points get the zero subspace.
TangentEstimate tangent_estimate(const std::vector<Eigen::VectorXd>& cloud,
                                 const Eigen::VectorXd& p, double scale,
                                 const TangentOptions& opt = {});

struct DerivedOptions {
  double angleTolDeg = 5.0;  // principal-angle cutoff for intersections
  double scale = 0.0;        // 0: use 3x median NN spacing of the support
  TangentOptions tangent{.minNeighbors = 1};
};

/// Fiber at p intersected with the (complexified) tangent to the support.
SampledDistribution derived(const SampledDistribution& dist, const DerivedOptions& opt = {});

struct CoreResult {
  SampledDistribution core;
  int k = 0;          // first index with D^k = D^{k+1} (or D^k empty)
  bool stabilized = false;
  std::vector<int> supportSizes;  // per iterate, starting at D^0
};

CoreResult iterate_to_core(const SampledDistribution& dist, int maxIter,
                           const DerivedOptions& opt = {});

/// True iff every principal angle between the complexified sampled tangent
/// of A at p and the fiber nullAtP exceeds the cutoff.
bool zero_holo_dim_check(const std::vector<Eigen::VectorXd>& A, const Eigen::VectorXd& p,
                         const Eigen::MatrixXcd& nullAtP, double scale,
                         const DerivedOptions& opt = {});

/// Levi-null distribution over a boundary sample. The kernel threshold is
/// relative to the largest Levi eigenvalue across the whole sample (the
/// per-point maximum degenerates for the 1x1 forms of C^2).
SampledDistribution levi_null(const DefiningFunction& f, const std::vector<BoundaryPoint>& sample,
                              double relTol = 1e-6);

/// principal angles (radians, ascending) between column spans of orthonormal U, V
Eigen::VectorXd principal_angles(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& V);

/// complexified embedding used to intersect T^{1,0} fibers with real tangents
Eigen::MatrixXcd embed_t10(const Eigen::MatrixXcd& fiber);            // (a) -> (a; 0)
Eigen::MatrixXcd embed_complexified_real(const Eigen::MatrixXd& T);   // u -> (a(u); conj a(u))

double median_nn_spacing(const std::vector<Eigen::VectorXd>& pts);

}  // namespace levicore
