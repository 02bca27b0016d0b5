#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace levicore {

struct NmResult {
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::infinity();
  int evals = 0;
};

/// Plain downhill simplex. Objectives may return +inf (infeasible
/// candidates are simply ordered last). Deterministic for a fixed start.
inline NmResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& fn,
                            const Eigen::VectorXd& start, double step, int maxEvals,
                            double fTol = 1e-12) {
  const int n = (int)start.size();
  NmResult res;
  if (n == 0) {
    res.x = start;
    res.f = fn(start);
    res.evals = 1;
    return res;
  }
  std::vector<Eigen::VectorXd> xs(n + 1, start);
  std::vector<double> fs(n + 1);
  for (int i = 1; i <= n; ++i) xs[i](i - 1) += step * std::max(1.0, std::abs(start(i - 1)));
  int evals = 0;
  for (int i = 0; i <= n; ++i) fs[i] = (++evals, fn(xs[i]));

  auto order = [&] {
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Eigen::VectorXd> x2(n + 1);
    std::vector<double> f2(n + 1);
    for (int i = 0; i <= n; ++i) {
      x2[i] = xs[idx[i]];
      f2[i] = fs[idx[i]];
    }
    xs.swap(x2);
    fs.swap(f2);
  };

  while (evals < maxEvals) {
    order();
    if (std::isfinite(fs[n]) && std::abs(fs[n] - fs[0]) <= fTol * (1.0 + std::abs(fs[0]))) break;
    Eigen::VectorXd cen = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) cen += xs[i];
    cen /= n;
    Eigen::VectorXd xr = cen + (cen - xs[n]);
    double fr = (++evals, fn(xr));
    if (fr < fs[0]) {
      Eigen::VectorXd xe = cen + 2.0 * (cen - xs[n]);
      double fe = (++evals, fn(xe));
      if (fe < fr) {
        xs[n] = xe;
        fs[n] = fe;
      } else {
        xs[n] = xr;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      xs[n] = xr;
      fs[n] = fr;
    } else {
      Eigen::VectorXd xc = cen + 0.5 * (xs[n] - cen);
      double fc = (++evals, fn(xc));
      if (fc < std::min(fr, fs[n])) {
        xs[n] = xc;
        fs[n] = fc;
      } else {  // shrink
        for (int i = 1; i <= n; ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = (++evals, fn(xs[i]));
          if (evals >= maxEvals) break;
        }
      }
    }
  }
  order();
  res.x = xs[0];
  res.f = fs[0];
  res.evals = evals;
  return res;
}

/// Multi-start wrapper with seeded random restarts plus explicit starts.
inline NmResult nelder_mead_multistart(const std::function<double(const Eigen::VectorXd&)>& fn,
                                       int dim, int starts, int evalsPerStart, double step,
                                       std::uint64_t seed,
                                       const std::vector<Eigen::VectorXd>& extraStarts = {}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  NmResult best;
  std::vector<Eigen::VectorXd> s0 = extraStarts;
  s0.insert(s0.begin(), Eigen::VectorXd::Zero(dim));
  while ((int)s0.size() < starts) {
    Eigen::VectorXd x(dim);
    const double scl = std::pow(3.0, (int)s0.size() % 4 - 1);  // 1/3, 1, 3, 9 pattern
    for (int i = 0; i < dim; ++i) x(i) = scl * step * g(rng);
    s0.push_back(x);
  }
  for (const auto& x0 : s0) {
    NmResult r = nelder_mead(fn, x0, step, evalsPerStart);
    if (r.f < best.f || !std::isfinite(best.f)) {
      best.x = r.x;
      best.f = r.f;
    }
    best.evals += r.evals;
  }
  if (best.x.size() == 0) best.x = Eigen::VectorXd::Zero(dim);
  return best;
}

}  // namespace levicore
