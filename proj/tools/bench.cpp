// Timing harness comparing the OpenMP kernels against their serial reference
// implementations: per-point backward hitting times, the sup-inf scan, and
// the rotational Gramian sweep.

#include <chrono>
#include <cstdio>

#include "viscobs/flow.hpp"
#include "viscobs/kernel.hpp"
#include "viscobs/observability.hpp"
#include "viscobs/parallel.hpp"
#include "viscobs/scenario.hpp"

using namespace viscobs;

namespace {

double seconds(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

void row(const char* name, double serial, double parallel) {
  std::printf("%-28s %10.3fs %10.3fs %8.2fx\n", name, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0);
}

}  // namespace

int main() {
  const int nthreads = max_threads();
  std::printf("threads: %d\n", nthreads);
  std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "openmp", "speedup");

  // backward hitting times on the two-cap geometry
  {
    auto sc = named_scenario("sphere_caps");
    sc.geometry.grid_n = 4096;
    auto spec = sc.make_surface();
    auto f = sc.make_f();
    auto omega = sc.omega_region();
    std::vector<double> pts;
    double ts = seconds([&] {
      hitting_times_serial(spec, f, omega, FlowCondition::GCC, 10.0, pts);
    });
    double tp = seconds([&] {
      hitting_times(spec, f, omega, FlowCondition::GCC, 10.0, pts);
    });
    row("flow.hitting_times", ts, tp);
  }

  // sup-inf action scan over sources
  {
    auto sc = named_scenario("sphere_caps");
    sc.geometry.grid_n = 256;
    auto spec = sc.make_surface();
    auto f = sc.make_f();
    auto omega = sc.omega_region();
    PathDomain dom = PathDomain::from(spec);
    std::vector<double> ygrid;
    for (int i = 0; i < 161; ++i)
      ygrid.push_back(spec.s_lo + (spec.s_hi - spec.s_lo) * (i + 0.5) / 161.0);
    // the table itself is single-threaded; the y-scan fans out
    double tp = seconds([&] { dx_sup_inf(dom, f, ygrid, omega, 1.5, 48); });
    set_threads(1);
    double ts = seconds([&] { dx_sup_inf(dom, f, ygrid, omega, 1.5, 48); });
    set_threads(nthreads);
    row("kernel.dx_sup_inf", ts, tp);
  }

  // per-mode Gramian sweep
  {
    auto sc = named_scenario("torus_profile");
    auto spec = sc.make_surface();
    auto f = sc.make_f();
    auto q = sc.make_q();
    auto omega = sc.omega_region();
    double tp = seconds([&] {
      gramian_cost_rotational(spec, f, q, omega, 1.0, 0.05, 24, 48);
    });
    set_threads(1);
    double ts = seconds([&] {
      gramian_cost_rotational(spec, f, q, omega, 1.0, 0.05, 24, 48);
    });
    set_threads(nthreads);
    row("observability.gramian_k", ts, tp);
  }
  return 0;
}
