#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "levicore/hypersurface.hpp"

namespace levicore {

struct UnknownDomainError : CalcError {
  using CalcError::CalcError;
};

/// Analytic ground truth attached to an example domain; consumed by tests
/// and by the Hausdorff / fiber-angle checks in reports.
struct DomainMetadata {
  // samples the exact weakly-pseudoconvex locus (empty sampler when the
  // domain is strongly pseudoconvex)
  ParamSampler weakLocus;
  // exact Levi-null fiber at a locus point (n x k), k may be 0
  std::function<Eigen::MatrixXcd(const Eigen::VectorXcd&)> exactFiber;
  // whether the core support is expected nonempty, and the expected fiber
  // direction on it
  bool coreNonempty = false;
  std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)> coreDirection;
  double dfExpected = 1.0;      // 1.0 for strongly pc / finite type examples
  bool dfExact = false;         // true when dfExpected is exact (ball etc.)
  // worm-only: annulus data for the radial reduction
  struct Annulus {
    double rho1, rho2, beta;
  };
  std::optional<Annulus> annulus;
  // patch predicate: restrict core/norm analysis to the cap-free region
  std::function<bool(const Eigen::VectorXcd&)> analysisPatch;
};

struct ExampleDomain {
  DefiningFunction f;
  DomainMetadata meta;
};

/// Registry addressable by name + parameters:
///   ball{n}, ellipsoid{a1..an}, quartic, worm{beta,width,cap_s}
ExampleDomain make_domain(const std::string& name,
                          const std::map<std::string, double>& params = {});

std::vector<std::string> registry_names();
std::string registry_schema(const std::string& name);

}  // namespace levicore
