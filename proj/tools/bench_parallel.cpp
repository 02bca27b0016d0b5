// Compares the serial reference path against the OpenMP kernels on the two
// hot loops: boundary Levi scans and collar defect evaluation. Results must
// match bitwise (per-index writes, serial reductions); only the wall time
// differs.

#include <chrono>
#include <iostream>

#include "levicore/df_index.hpp"
#include "levicore/domains.hpp"
#include "levicore/parallel.hpp"

using namespace levicore;
using clk = std::chrono::steady_clock;

namespace {

double ms_since(clk::time_point t0) {
  return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

template <class F>
std::pair<double, double> run_both(F&& f) {
  par::serial_mode() = true;
  auto t0 = clk::now();
  const double a = f();
  const double serialMs = ms_since(t0);
  par::serial_mode() = false;
  t0 = clk::now();
  const double b = f();
  const double parMs = ms_since(t0);
  if (a != b) {
    std::cerr << "MISMATCH serial=" << a << " parallel=" << b << "\n";
    std::exit(1);
  }
  return {serialMs, parMs};
}

}  // namespace

int main(int argc, char** argv) {
  const int count = argc > 1 ? std::atoi(argv[1]) : 400;
  ExampleDomain worm = make_domain("worm", {{"beta", 1.0}});
  BoundarySample s = sample_boundary(worm.f, SampleStrategy::Random, count, 7);
  std::cout << "boundary points: " << s.points.size() << ", threads: " << par::max_threads()
            << "\n";

  auto [ls, lp] = run_both([&] {
    return pseudoconvexity_report(worm.f, s.points).minEigenvalue;
  });
  std::cout << "levi scan      serial " << ls << " ms   omp " << lp << " ms   speedup "
            << ls / lp << "x\n";

  CollarGrid grid = build_collar(worm.f, s.points, 0.05);
  auto [ds, dp] = run_both([&] { return psh_defect(worm.f, 0.5, grid); });
  std::cout << "defect grid    serial " << ds << " ms   omp " << dp << " ms   speedup "
            << ds / dp << "x\n";
  return 0;
}
