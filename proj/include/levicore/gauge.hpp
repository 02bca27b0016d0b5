#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "levicore/calc.hpp"
#include "levicore/wirtinger.hpp"

namespace levicore {

/// Family {phi_m} of smooth real gauge functions on the ambient space,
/// with analytic Wirtinger first derivatives and mixed Hessians. Gauges
/// enter as r -> e^f r with f = sum c_m phi_m.
class GaugeBasis {
 public:
  virtual ~GaugeBasis() = default;
  virtual std::string id() const = 0;
  virtual int count() const = 0;
  virtual int ambient() const = 0;

  virtual Eigen::VectorXd values(const Eigen::VectorXcd& p) const = 0;
  /// grad(m, j) = d phi_m / dz_j
  virtual Eigen::MatrixXcd grads(const Eigen::VectorXcd& p) const = 0;
  /// mixed(m)(j, k) = d^2 phi_m / dz_j dzbar_k
  virtual std::vector<Eigen::MatrixXcd> mixed_hessians(const Eigen::VectorXcd& p) const = 0;

  /// jet of f = sum coeff_m phi_m (real-valued)
  WJet gauge_jet(const Eigen::VectorXcd& p, const Eigen::VectorXd& coeff) const;
  double gauge_value(const Eigen::VectorXcd& p, const Eigen::VectorXd& coeff) const;

  /// condition number of the Gram matrix of {phi_m} on a point sample
  double gram_condition(const std::vector<Eigen::VectorXcd>& pts) const;
};

/// Real polynomials in (Re z_j, Im z_j)/s0 of total degree 1..maxDeg.
std::unique_ptr<GaugeBasis> make_poly_basis(int n, int maxDeg, double s0 = 1.0);

/// Chebyshev polynomials T_1..T_count in xi(rho), rho = log|z_1|, mapped
/// from [rho1, rho2]; constant in the remaining coordinates. Adapted to the
/// rotational symmetry of worm-type examples.
std::unique_ptr<GaugeBasis> make_radial_basis(int n, int count, double rho1, double rho2);

/// "poly:4" or "radial:16"; radial needs the annulus [rho1, rho2].
std::unique_ptr<GaugeBasis> make_basis(const std::string& spec, int n, double s0, double rho1,
                                       double rho2);

}  // namespace levicore
