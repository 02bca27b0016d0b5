#include "levicore/annulus.hpp"

#include <cmath>

#include "levicore/nelder_mead.hpp"

namespace levicore {

double annulus_norm_closed_form(const AnnulusProblem& prob) {
  return 2.0 * prob.beta * (prob.rho2 - prob.rho1) / M_PI;
}

namespace {

constexpr double kSlopeCap = 1e9;

// Node mesh with cubic grading toward the annulus edges: the optimal
// profile has steep layers there, and a uniform mesh only converges
// first-order in m through its slope cap.
std::vector<double> oracle_mesh(double rho1, double rho2, int m) {
  std::vector<double> x(m);
  const double c = 0.5 * (rho1 + rho2), hw = 0.5 * (rho2 - rho1);
  for (int i = 0; i < m; ++i) {
    const double xi = -1.0 + 2.0 * i / (m - 1);
    x[i] = c + hw * (15.0 * xi - 10.0 * xi * xi * xi + 3.0 * std::pow(xi, 5)) / 8.0;
  }
  return x;
}

// One feasibility sweep over the inter-node slopes s_i = (f_i - f_{i-1})/d_i
// on a general mesh. With H = d_i + d_{i+1}, a = d_{i+1}/H, b = d_i/H the
// node constraint
//   (a s_i + b s_{i+1})^2 + 4 beta^2 <= 2 lambda (s_{i+1} - s_i)/H
// is a quadratic in s_{i+1} with admissible window
//   u+- = (lambda/H - a b s_i -+ sqrt(Dsc))/b^2,
//   Dsc = lambda^2/H^2 - 2 lambda b s_i/H - 4 beta^2 b^2,
// nonempty iff s_i <= smax. The image of an interval of s_i is an interval
// (u+ decreasing; u- checked at the ends and at its critical point).
bool sweep(double lambda, double beta, const std::vector<double>& mesh,
           Eigen::VectorXd* slopesOut) {
  const int m = (int)mesh.size();
  if (lambda <= 0.0) return beta == 0.0;
  double lo = -kSlopeCap, hi = kSlopeCap;
  std::vector<std::pair<double, double>> windows(m - 1);
  windows[0] = {lo, hi};
  for (int i = 1; i <= m - 2; ++i) {
    const double di = mesh[i] - mesh[i - 1], dn = mesh[i + 1] - mesh[i];
    const double H = di + dn, a = dn / H, b = di / H;
    auto Dsc = [&](double s) {
      return lambda * lambda / (H * H) - 2.0 * lambda * b * s / H - 4.0 * beta * beta * b * b;
    };
    auto uPlus = [&](double s) {
      return (lambda / H - a * b * s + std::sqrt(std::max(0.0, Dsc(s)))) / (b * b);
    };
    auto uMinus = [&](double s) {
      return (lambda / H - a * b * s - std::sqrt(std::max(0.0, Dsc(s)))) / (b * b);
    };
    const double smax =
        (lambda * lambda / (H * H) - 4.0 * beta * beta * b * b) * H / (2.0 * lambda * b);
    const double al = lo, bl = std::min(hi, smax);
    if (al > bl) return false;
    double nhi = uPlus(al);
    double nlo = std::min(uMinus(al), uMinus(bl));
    const double Dcrit = lambda * lambda / (a * a * H * H);
    const double scrit =
        (lambda * lambda / (H * H) - 4.0 * beta * beta * b * b - Dcrit) * H / (2.0 * lambda * b);
    if (scrit >= al && scrit <= bl) nlo = std::min(nlo, uMinus(scrit));
    lo = std::max(nlo, -kSlopeCap);
    hi = std::min(nhi, kSlopeCap);
    if (lo > hi) return false;
    windows[i] = {lo, hi};
  }
  if (slopesOut) {
    Eigen::VectorXd s(m - 1);
    for (int i = 0; i <= m - 2; ++i)
      s(i) = 0.5 * (std::max(windows[i].first, -kSlopeCap) +
                    std::min(windows[i].second, kSlopeCap));
    *slopesOut = s;
  }
  return true;
}

}  // namespace

namespace {

// bisected threshold of the discrete feasibility problem at mesh size m
double dp_value(double beta, double rho1, double rho2, int m, int* bisections,
                Eigen::VectorXd* slopes, bool* feasible) {
  const double L = rho2 - rho1;
  const std::vector<double> mesh = oracle_mesh(rho1, rho2, m);
  auto ok = [&](double lam) { return sweep(lam, beta, mesh, nullptr); };
  double hi = beta * L;  // the linear-profile bound is always feasible at 2 beta L
  while (!ok(hi)) {
    hi *= 2.0;
    if (hi > 1e6 * beta * std::max(1.0, L)) {
      if (feasible) *feasible = false;
      return std::numeric_limits<double>::infinity();
    }
  }
  double lo = 0.0;
  int bis = 0;
  while (hi - lo > 2e-4 * hi) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
    ++bis;
  }
  if (bisections) *bisections += bis;
  if (slopes) sweep(hi, beta, mesh, slopes);
  return hi;
}

}  // namespace

std::vector<double> annulus_oracle_nodes(const AnnulusProblem& prob) {
  return oracle_mesh(prob.rho1, prob.rho2, prob.m);
}

OracleResult annulus_norm_oracle(const AnnulusProblem& prob) {
  OracleResult res;
  if (prob.m < 16) throw CalcError("annulus oracle: need m >= 16");
  const double L = prob.rho2 - prob.rho1;
  if (L <= 0) throw CalcError("annulus oracle: empty annulus");
  if (prob.beta == 0.0) {  // trivial class
    res.value = 0.0;
    res.slopes = Eigen::VectorXd::Zero(prob.m - 1);
    return res;
  }
  const double vm = dp_value(prob.beta, prob.rho1, prob.rho2, prob.m, &res.bisections,
                             &res.slopes, &res.feasible);
  if (!res.feasible) {
    res.value = vm;
    return res;
  }
  // the node scheme is second order; Richardson across m and m/2 removes
  // the leading term (both thresholds scale exactly linearly in beta, so
  // homogeneity is preserved)
  if (prob.m >= 32) {
    bool feas2 = true;
    const double vh =
        dp_value(prob.beta, prob.rho1, prob.rho2, prob.m / 2, &res.bisections, nullptr, &feas2);
    if (feas2) {
      res.value = (4.0 * vm - vh) / 3.0;
      return res;
    }
  }
  res.value = vm;
  return res;
}

Eigen::VectorXd radial_equality_seed(const AnnulusProblem& prob, const GaugeBasis& radialBasis,
                                     double margin) {
  if (prob.beta == 0.0) return Eigen::VectorXd::Zero(radialBasis.count());
  // target profile: f(rho) = t log cos(2 beta (rho - c)/t), whose radial
  // ratio (4 b^2 + f'^2)/(-f'') equals t identically on the open annulus
  const double t = margin * annulus_norm_closed_form(prob);
  const double b2 = prob.beta * prob.beta;
  const double c = 0.5 * (prob.rho1 + prob.rho2);
  auto fp = [&](double rho) {
    return -2.0 * prob.beta * std::tan(2.0 * prob.beta * (rho - c) / t);
  };
  auto fpp = [&](double rho) {
    const double sec = 1.0 / std::cos(2.0 * prob.beta * (rho - c) / t);
    return -4.0 * b2 * sec * sec / t;
  };
  // Stage 1: least squares on the linearized ratio residual (what the sup
  // actually sees; a value-space fit loses several percent through the
  // differentiation of its error). Stage 2: damped Gauss-Newton squeeze of
  // the max ratio toward the basis-optimal equalizer.
  const int m = radialBasis.count();
  const int nodes = 6 * m + 12;
  Eigen::MatrixXd Bp(nodes, m), Bpp(nodes, m);
  Eigen::VectorXd fpT(nodes), fppT(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double xi = std::cos(M_PI * (i + 0.5) / nodes);
    const double rho = c + 0.5 * (prob.rho2 - prob.rho1) * xi;
    Eigen::VectorXcd p(radialBasis.ambient());
    p.setZero();
    p(0) = std::exp(rho);
    // radial first/second derivatives of the basis members from the
    // ambient Wirtinger data: f' = 2 e^rho Re f_z, f'' = 4 e^{2 rho} f_{z zbar}
    Eigen::MatrixXcd G = radialBasis.grads(p);
    auto H = radialBasis.mixed_hessians(p);
    for (int k = 0; k < m; ++k) {
      Bp(i, k) = 2.0 * std::exp(rho) * G(k, 0).real();
      Bpp(i, k) = 4.0 * std::exp(2.0 * rho) * H[k](0, 0).real();
    }
    fpT(i) = fp(rho);
    fppT(i) = fpp(rho);
  }
  Eigen::MatrixXd A(nodes, m);
  Eigen::VectorXd rhs(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double w = 1.0 / (-fppT(i));
    A.row(i) = w * (2.0 * fpT(i) * Bp.row(i) + t * Bpp.row(i));
    rhs(i) = w * (2.0 * fpT(i) * fpT(i) + t * fppT(i));
  }
  Eigen::VectorXd coeff = A.colPivHouseholderQr().solve(rhs);

  auto ratios = [&](const Eigen::VectorXd& cc, Eigen::VectorXd& pp, Eigen::VectorXd& ppp) {
    pp = Bp * cc;
    ppp = Bpp * cc;
    double worst = 0.0;
    for (int i = 0; i < nodes; ++i) {
      if (ppp(i) >= -1e-12) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, (4.0 * b2 + pp(i) * pp(i)) / (-ppp(i)));
    }
    return worst;
  };
  Eigen::VectorXd pp, ppp;
  double best = ratios(coeff, pp, ppp);
  for (int it = 0; it < 30 && std::isfinite(best); ++it) {
    const double target = 0.995 * best;
    for (int i = 0; i < nodes; ++i) {
      const double w = 1.0 / (-ppp(i));
      A.row(i) = w * (2.0 * pp(i) * Bp.row(i) + target * Bpp.row(i));
      rhs(i) = -w * (4.0 * b2 + pp(i) * pp(i) + target * ppp(i));
    }
    Eigen::VectorXd step = A.colPivHouseholderQr().solve(rhs);
    bool improved = false;
    for (double damp : {1.0, 0.5, 0.25, 0.1}) {
      Eigen::VectorXd trial = coeff + damp * step;
      Eigen::VectorXd tp, tpp;
      const double v = ratios(trial, tp, tpp);
      if (v < best) {
        coeff = trial;
        best = v;
        pp = tp;
        ppp = tpp;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return coeff;
}

AppendixNorms appendix_norms(const AnnulusProblem& prob, int laurentDeg, int budgetEvals,
                             std::uint64_t seed) {
  AppendixNorms out;
  const int d = laurentDeg;
  const int dim = 4 * d + 1;  // Re/Im coefficient per k in [-d,d]\{0}, plus the real constant
  const int nr = 49, nt = 64;
  // fixed endpoint-inclusive tensor grid on the annulus (trapezoid weights,
  // area element e^{2 rho}); the sup norm is attained at the edges
  std::vector<double> rho(nr), wr(nr);
  for (int i = 0; i < nr; ++i) {
    rho[i] = prob.rho1 + (prob.rho2 - prob.rho1) * i / (nr - 1.0);
    wr[i] = std::exp(2.0 * rho[i]) * ((i == 0 || i == nr - 1) ? 0.5 : 1.0);
  }
  auto reF = [&](const Eigen::VectorXd& c, double rh, double th) {
    double v = c(0);
    int idx = 1;
    for (int k = 1; k <= d; ++k) {
      const double rk = std::exp(k * rh);
      v += rk * (c(idx) * std::cos(k * th) - c(idx + 1) * std::sin(k * th));
      idx += 2;
      const double rmk = std::exp(-k * rh);
      v += rmk * (c(idx) * std::cos(k * th) + c(idx + 1) * std::sin(k * th));
      idx += 2;
    }
    return v;
  };
  auto h = [&](double rh) { return 2.0 * prob.beta * rh; };
  double wtot = 0.0;
  for (int i = 0; i < nr; ++i) wtot += wr[i] * nt;

  int evals = 0;
  auto l1obj = [&](const Eigen::VectorXd& c) {
    ++evals;
    double s = 0.0;
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j) {
        const double th = 2.0 * M_PI * j / nt;
        s += wr[i] * std::abs(h(rho[i]) - reF(c, rho[i], th));
      }
    return s / wtot;
  };
  auto linfobj = [&](const Eigen::VectorXd& c) {
    ++evals;
    double s = 0.0;
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j) {
        const double th = 2.0 * M_PI * j / nt;
        s = std::max(s, std::abs(h(rho[i]) - reF(c, rho[i], th)));
      }
    return s;
  };
  // initialize at the best constant fit (1-D golden section), then polish
  const double hspan = 2.0 * std::abs(prob.beta) * std::max(std::abs(prob.rho1), std::abs(prob.rho2));
  auto golden_const = [&](auto obj) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(dim);
    double a = -hspan - 1.0, b = hspan + 1.0;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    auto at = [&](double t) {
      c(0) = t;
      return obj(c);
    };
    double f1 = at(x1), f2 = at(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = at(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = at(x2);
      }
    }
    c(0) = 0.5 * (a + b);
    return c;
  };
  Eigen::VectorXd c1 = golden_const(l1obj), ci = golden_const(linfobj);
  NmResult r1 = nelder_mead_multistart(l1obj, dim, 4, budgetEvals, 0.3, seed, {c1});
  NmResult ri = nelder_mead_multistart(linfobj, dim, 4, budgetEvals, 0.3, seed + 1, {ci});
  out.l1 = std::min(r1.f, l1obj(c1));
  out.linf = std::min(ri.f, linfobj(ci));
  AnnulusProblem p = prob;
  const double nA = annulus_norm_oracle(p).value;
  out.ratio = nA > 0 && out.linf > 0 ? out.l1 * out.l1 / (nA * out.linf) : 0.0;
  out.evals = evals;
  return out;
}

}  // namespace levicore
