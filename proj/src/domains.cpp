#include "levicore/domains.hpp"

#include <cmath>

namespace levicore {

namespace {

double param_or(const std::map<std::string, double>& p, const std::string& k, double dflt) {
  auto it = p.find(k);
  return it == p.end() ? dflt : it->second;
}

// r = sum a_j |z_j|^2 - 1
template <class S>
S ellipsoid_expr(const std::vector<S>& z, const std::vector<double>& a) {
  S r = abs2(z[0]) * a[0];
  for (std::size_t j = 1; j < z.size(); ++j) r = r + abs2(z[j]) * a[j];
  return r - 1.0;
}

// r = |z1|^4 + |z2|^2 - 1
template <class S>
S quartic_expr(const std::vector<S>& z) {
  S q = abs2(z[0]);
  return q * q + abs2(z[1]) - 1.0;
}

// Worm over the annulus: r = |w - e^{i h(z)}|^2 - 1 + eta(z),
// h = beta log|z|^2, with a symmetric convex cap
// eta = s [ (t - t0)_+^8 + (-t - t0)_+^8 ],  t = log|z|^2.
// The 8th power keeps r C^7 across the seam, so the third-derivative
// stencils behind the dbar machinery stay at full order there.
template <class S>
S worm_expr(const std::vector<S>& z, double beta, double t0, double s) {
  const S& zz = z[0];
  const S& w = z[1];
  S t = log(abs2(zz));
  S h = beta * t;
  S phase = exp(cplx(0.0, 1.0) * h);
  S core = abs2(w - phase) - 1.0;
  const double tv = value_re(t);
  if (tv > t0) {
    S u = t - t0;
    S u4 = (u * u) * (u * u);
    return core + s * u4 * u4;
  }
  if (tv < -t0) {
    S u = (-1.0) * t - t0;
    S u4 = (u * u) * (u * u);
    return core + s * u4 * u4;
  }
  return core;
}

template <class MakeExpr>
void bind_eval(DefiningFunction& f, MakeExpr expr) {
  const int n = f.n;
  f.eval = [expr, n](const Eigen::VectorXcd& p) {
    std::vector<cplx> z(n);
    for (int j = 0; j < n; ++j) z[j] = p(j);
    return expr(z).real();
  };
  f.jet = [expr, n](const Eigen::VectorXcd& p) {
    std::vector<WJet> z;
    z.reserve(n);
    for (int j = 0; j < n; ++j) z.push_back(WJet::var(p(j), j, n));
    return expr(z);
  };
}

ExampleDomain make_ball(const std::map<std::string, double>& params) {
  const int n = (int)param_or(params, "n", 2);
  if (n < 2) throw UnknownDomainError("ball: need n >= 2");
  ExampleDomain d;
  d.f.id = "ball";
  d.f.n = n;
  d.f.params = {{"n", (double)n}};
  d.f.box = Box::cube(n, 2.2);
  std::vector<double> a(n, 1.0);
  bind_eval(d.f, [a](const auto& z) { return ellipsoid_expr(z, a); });
  d.meta.dfExpected = 1.0;
  d.meta.dfExact = true;
  return d;
}

ExampleDomain make_ellipsoid(const std::map<std::string, double>& params) {
  int n = 2;
  if (params.count("n")) n = (int)params.at("n");
  std::vector<double> a(n, 1.0);
  for (int j = 0; j < n; ++j) a[j] = param_or(params, "a" + std::to_string(j + 1), j + 1.0);
  ExampleDomain d;
  d.f.id = "ellipsoid";
  d.f.n = n;
  for (int j = 0; j < n; ++j) d.f.params["a" + std::to_string(j + 1)] = a[j];
  double amin = *std::min_element(a.begin(), a.end());
  d.f.box = Box::cube(n, 1.8 / std::sqrt(amin));
  bind_eval(d.f, [a](const auto& z) { return ellipsoid_expr(z, a); });
  d.meta.dfExpected = 1.0;
  d.meta.dfExact = true;
  return d;
}

ExampleDomain make_quartic(const std::map<std::string, double>&) {
  ExampleDomain d;
  d.f.id = "quartic";
  d.f.n = 2;
  d.f.box = Box::cube(2, 2.1);
  bind_eval(d.f, [](const auto& z) { return quartic_expr(z); });
  // weak locus: the circle {z1 = 0, |z2| = 1}
  d.meta.weakLocus = [](int count) {
    std::vector<Eigen::VectorXcd> pts;
    for (int i = 0; i < count; ++i) {
      const double th = 2.0 * M_PI * i / count;
      Eigen::VectorXcd p(2);
      p << cplx(0, 0), std::polar(1.0, th);
      pts.push_back(p);
    }
    return pts;
  };
  d.meta.exactFiber = [](const Eigen::VectorXcd&) {
    Eigen::MatrixXcd F(2, 1);
    F << 1.0, 0.0;
    return F;
  };
  d.meta.coreNonempty = false;
  d.meta.dfExpected = 1.0;
  d.meta.dfExact = false;  // attained as supremum
  return d;
}

ExampleDomain make_worm(const std::map<std::string, double>& params) {
  const double beta = param_or(params, "beta", 1.0);
  const double width = param_or(params, "width", 1.0);  // log-radius width of the annulus
  const double t0 = width;                              // caps start at t = log|z|^2 = +-width
  const double capS = param_or(params, "cap_s", 4.0);
  if (beta < 0 || width <= 0) throw UnknownDomainError("worm: need beta >= 0, width > 0");
  ExampleDomain d;
  d.f.id = "worm";
  d.f.n = 2;
  d.f.params = {{"beta", beta}, {"width", width}, {"cap_s", capS}};
  const double rho1 = -width / 2.0, rho2 = width / 2.0;
  const double zmax = std::exp(rho2 + 0.48), zmin = std::exp(rho1 - 0.48);
  Box b;
  b.lo.resize(4);
  b.hi.resize(4);
  b.lo << -zmax, -zmax, -2.2, -2.2;
  b.hi << zmax, zmax, 2.2, 2.2;
  d.f.box = b;
  d.f.valid = [zmin](const Eigen::VectorXcd& z) { return std::abs(z(0)) > 0.6 * zmin; };
  bind_eval(d.f, [beta, t0, capS](const auto& z) { return worm_expr(z, beta, t0, capS); });

  // weak locus: the complex annulus {w = 0, rho1 <= log|z| <= rho2}.
  // Per-ring point counts keep the arc spacing close to the ring spacing
  // (the tangent estimator needs locally isotropic clouds), and staggered
  // ring phases avoid spurious radial alignments.
  d.meta.weakLocus = [rho1, rho2](int count) {
    const double L = rho2 - rho1;
    const double rbar = std::exp(0.5 * (rho1 + rho2));
    const double u = std::sqrt(2.0 * M_PI * rbar * L / std::max(count, 8));
    const int nr = std::max(3, (int)std::round(L / u) + 1);
    std::vector<int> nt(nr);
    int total = 0;
    for (int i = 0; i < nr; ++i) {
      const double rho = rho1 + L * i / (nr - 1.0);
      nt[i] = std::max(4, (int)std::round(2.0 * M_PI * std::exp(rho) * (nr - 1.0) / L));
      total += nt[i];
    }
    for (int i = 0; total != count && i < 4 * nr; ++i) {  // trim/pad to the exact count
      int& n = nt[i % nr];
      if (total > count && n > 4) {
        --n;
        --total;
      } else if (total < count) {
        ++n;
        ++total;
      }
    }
    std::vector<Eigen::VectorXcd> pts;
    for (int i = 0; i < nr; ++i) {
      const double rho = rho1 + L * i / (nr - 1.0);
      const double stagger = 0.618 * i;  // golden-ratio phase per ring
      for (int k = 0; k < nt[i] && (int)pts.size() < count; ++k) {
        const double th = 2.0 * M_PI * (k + stagger) / nt[i];
        Eigen::VectorXcd p(2);
        p << std::polar(std::exp(rho), th), cplx(0, 0);
        pts.push_back(p);
      }
    }
    return pts;
  };
  d.meta.exactFiber = [](const Eigen::VectorXcd&) {
    Eigen::MatrixXcd F(2, 1);
    F << 1.0, 0.0;
    return F;
  };
  d.meta.coreNonempty = true;
  d.meta.coreDirection = [](const Eigen::VectorXcd&) {
    Eigen::VectorXcd v(2);
    v << 1.0, 0.0;
    return v;
  };
  d.meta.annulus = DomainMetadata::Annulus{rho1, rho2, beta};
  d.meta.dfExact = false;
  d.meta.analysisPatch = [t0](const Eigen::VectorXcd& z) {
    const double t = 2.0 * std::log(std::abs(z(0)));
    return std::abs(t) <= t0 + 1e-9;
  };
  return d;
}

}  // namespace

ExampleDomain make_domain(const std::string& name, const std::map<std::string, double>& params) {
  ExampleDomain d;
  if (name == "ball")
    d = make_ball(params);
  else if (name == "ellipsoid")
    d = make_ellipsoid(params);
  else if (name == "quartic")
    d = make_quartic(params);
  else if (name == "worm")
    d = make_worm(params);
  else
    throw UnknownDomainError("unknown domain: " + name);

  // registration check: gradient bounded away from zero on a coarse
  // boundary sample, so r stays a defining function for these parameters
  auto s = sample_boundary(d.f, SampleStrategy::Grid, 40, 1);
  for (const auto& bp : s.points)
    if (bp.dr.norm() < 1e-8)
      throw UnknownDomainError(name + ": degenerate gradient on zero set, bad parameters");
  return d;
}

std::vector<std::string> registry_names() { return {"ball", "ellipsoid", "quartic", "worm"}; }

std::string registry_schema(const std::string& name) {
  if (name == "ball") return "ball{n>=2}";
  if (name == "ellipsoid") return "ellipsoid{n, a1..an > 0}";
  if (name == "quartic") return "quartic{}";
  if (name == "worm") return "worm{beta>=0, width>0, cap_s>0}";
  throw UnknownDomainError("unknown domain: " + name);
}

}  // namespace levicore
