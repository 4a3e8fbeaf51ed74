#include <doctest.h>

#include <cmath>
#include <random>

#include "viscobs/flow.hpp"
#include "viscobs/scenario.hpp"

using namespace viscobs;

namespace {

SurfaceSpec interval_spec(double lo, double hi, int n = 256) {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Interval;
  cfg.has_range = true;
  cfg.s_lo = lo;
  cfg.s_hi = hi;
  cfg.grid_n = n;
  return build_surface(cfg);
}

SurfaceSpec circle_spec(double L, int n = 256) {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Circle;
  cfg.L = L;
  cfg.grid_n = n;
  return build_surface(cfg);
}

Profile expr_profile(const std::string& text) {
  return Profile::from_expr(ScalarExpr::parse(text, {"s"}));
}

}  // namespace

TEST_CASE("linear ODE: forward flow of s^2/2 from 1 reaches e at t = 1") {
  auto spec = interval_spec(-10.0, 10.0);
  auto f = expr_profile("s^2/2");
  auto tr = integrate_flow(spec, f, 1.0, 0.0, 1.0, false);
  CHECK_FALSE(tr.exited);
  CHECK(tr.s.back() == doctest::Approx(M_E).epsilon(1e-8));
}

TEST_CASE("stationary points stay fixed") {
  auto spec = interval_spec(-2.0, 2.0);
  auto f = expr_profile("cos(s)");  // f'(0) = -sin(0) = 0
  auto tr = integrate_flow(spec, f, 0.0, 0.0, 5.0, false);
  CHECK(std::abs(tr.s.back()) < 1e-12);
}

TEST_CASE("backward trajectory time matches the speed integral") {
  // f' = 1 + s^2: backward flow from s = 1 reaches 0.2 after
  // int_{0.2}^{1} ds/(1+s^2) = atan(1) - atan(0.2)
  auto spec = interval_spec(0.0, 2.0);
  auto f = expr_profile("s + s^3/3");
  auto tr = integrate_flow(spec, f, 1.0, 0.0, 3.0, true);
  double t_expect = std::atan(1.0) - std::atan(0.2);
  // locate the crossing time of 0.2
  double t_hit = -1;
  for (std::size_t i = 1; i < tr.s.size(); ++i)
    if (tr.s[i] <= 0.2) {
      double th = (0.2 - tr.s[i - 1]) / (tr.s[i] - tr.s[i - 1]);
      t_hit = tr.t[i - 1] + th * (tr.t[i] - tr.t[i - 1]);
      break;
    }
  REQUIRE(t_hit > 0);
  CHECK(t_hit == doctest::Approx(t_expect).epsilon(1e-5));
}

TEST_CASE("two-cap geometry: control time L - 2 delta by both methods") {
  auto sc = named_scenario("sphere_caps");
  sc.geometry.grid_n = 2048;
  auto spec = sc.make_surface();
  auto f = sc.make_f();
  auto omega = sc.omega_region();
  const double L = M_PI, delta = 0.05;

  auto closed = gcc_time(spec, f, omega, FlowCondition::GCC, FlowMethod::ClosedForm, 10.0);
  CHECK(closed.satisfied);
  CHECK(closed.T_min == doctest::Approx(L - 2 * delta).epsilon(1e-9));

  auto sim = gcc_time(spec, f, omega, FlowCondition::GCC, FlowMethod::Simulation, 10.0);
  CHECK(sim.satisfied);
  CHECK(std::abs(sim.T_min - (L - 2 * delta)) < 1e-3);

  double gmin = 1e300;
  for (double g : sim.g_field) gmin = std::min(gmin, g);
  CHECK(gmin > 0.0);
}

TEST_CASE("flushing on an interval with constant speed") {
  // omega = (L - delta, L), f = 2s: backward flow exits through 0 at speed 2
  const double L = 1.0, delta = 0.1;
  auto spec = interval_spec(0.0, L, 512);
  auto f = expr_profile("2*s");
  Region1D omega;
  omega.intervals = {{L - delta, L}};
  auto rep = gcc_time(spec, f, omega, FlowCondition::FC, FlowMethod::Simulation, 10.0);
  CHECK(rep.satisfied);
  CHECK(rep.T_min == doctest::Approx((L - delta) / 2.0).epsilon(2e-3));
}

TEST_CASE("stationary point outside omega defeats the condition exactly") {
  auto spec = circle_spec(2.0, 256);
  auto f = expr_profile("cos(pi*s)");  // f' = -pi sin(pi s): zeros at 0 and 1
  Region1D omega;
  omega.intervals = {{-0.25, 0.25}};  // contains 0 and the wrap point, not 1
  auto closed = gcc_time(spec, f, omega, FlowCondition::GCC, FlowMethod::ClosedForm, 20.0);
  CHECK_FALSE(closed.satisfied);
  CHECK(closed.stationary_outside);
  CHECK(std::abs(closed.stationary_at - 1.0) < 1e-2);
  auto sim = gcc_time(spec, f, omega, FlowCondition::GCC, FlowMethod::Simulation, 20.0);
  CHECK_FALSE(sim.satisfied);
}

TEST_CASE("forward/backward field equivalence on random circle scenarios") {
  std::mt19937_64 rng(321u);
  std::uniform_real_distribution<double> amp(0.3, 1.2), width(0.15, 0.3);
  int compared = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double L = 2.0;
    auto spec = circle_spec(L, 384);
    char buf[256];
    double a = amp(rng), b = amp(rng), ph = amp(rng);
    std::snprintf(buf, sizeof(buf), "%.6f*sin(pi*s + %.6f) + %.6f*cos(2*pi*s)", a, ph, b);
    auto f = expr_profile(buf);
    // cover every stationary point with an omega arc, plus one random arc
    Region1D omega;
    const int probes = 2048;
    double w = width(rng);
    for (int i = 0; i < probes; ++i) {
      double s0 = L * i / probes, s1 = L * (i + 1) / probes;
      if (f.fp(s0) * f.fp(s1) <= 0.0) {
        double lo = s0 - w / 2, hi = s1 + w / 2;
        omega.intervals.push_back({std::max(0.0, lo), std::min(L, hi)});
        if (lo < 0) omega.intervals.push_back({L + lo, L});
        if (hi > L) omega.intervals.push_back({0.0, hi - L});
      }
    }
    omega.intervals.push_back({0.1, 0.1 + w});
    auto plus = gcc_time(spec, f, omega, FlowCondition::GCC, FlowMethod::Simulation, 60.0);
    auto minus = gcc_time(spec, f.shifted(0.0), omega, FlowCondition::GCC,
                          FlowMethod::Simulation, 60.0);
    // reversing the field: integrate the flow of -grad f
    auto fneg = Profile::from_expr(ScalarExpr::parse(
        "-(" + std::string(buf) + ")", {"s"}));
    auto rev = gcc_time(spec, fneg, omega, FlowCondition::GCC, FlowMethod::Simulation, 60.0);
    CHECK(plus.satisfied == rev.satisfied);
    CHECK(plus.satisfied == minus.satisfied);
    if (plus.satisfied && rev.satisfied) {
      CHECK(std::abs(plus.T_min - rev.T_min) <= 1e-3 * std::max(1.0, plus.T_min));
      ++compared;
    }
  }
  CHECK(compared >= 15);
}

TEST_CASE("enlarging omega never increases the control time") {
  auto sc = named_scenario("sphere_caps");
  sc.geometry.grid_n = 1024;
  auto spec = sc.make_surface();
  auto f = sc.make_f();
  auto omega = sc.omega_region();
  auto small = gcc_time(spec, f, omega, FlowCondition::GCC, FlowMethod::Simulation, 10.0);
  Region1D bigger = omega;
  bigger.intervals.push_back({1.0, 1.4});
  auto big = gcc_time(spec, f, bigger, FlowCondition::GCC, FlowMethod::Simulation, 10.0);
  CHECK(big.T_min <= small.T_min + 1e-9);
}

TEST_CASE("hitting times: OpenMP kernel matches the serial reference bitwise") {
  auto sc = named_scenario("sphere_caps");
  sc.geometry.grid_n = 512;
  auto spec = sc.make_surface();
  auto f = sc.make_f();
  auto omega = sc.omega_region();
  std::vector<double> pts1, pts2;
  auto par = hitting_times(spec, f, omega, FlowCondition::GCC, 10.0, pts1);
  auto ser = hitting_times_serial(spec, f, omega, FlowCondition::GCC, 10.0, pts2);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) CHECK(par[i] == ser[i]);
}

TEST_CASE("2D flushing for the steep separable field") {
  auto sc = named_scenario("flambda4_2d");
  sc.geometry.box_n = 65;
  auto spec = sc.make_surface();
  auto f = sc.make_f2d();
  auto omega = sc.omega_region_2d();
  auto rep = fc_time_2d(spec, f, omega, 5.0, 4);
  CHECK(rep.satisfied);
  CHECK(rep.T_min <= std::sqrt(2.0) + 1e-6);  // diameter bound
}
