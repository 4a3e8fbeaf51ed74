#include <doctest.h>

#include <cmath>
#include <random>

#include "viscobs/agmon.hpp"
#include "viscobs/observability.hpp"
#include "viscobs/scenario.hpp"

using namespace viscobs;

namespace {

ScalarExpr zero_q() { return ScalarExpr::parse("0", {"s"}); }

SurfaceSpec circle_spec(double L, int n) {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Circle;
  cfg.L = L;
  cfg.grid_n = n;
  return build_surface(cfg);
}

}  // namespace

TEST_CASE("slope sweep self-test: exp(r/eps) recovers r exactly") {
  std::vector<double> eps{0.1, 0.05, 0.025, 0.02};
  const double r = 0.731;
  auto fit = slope_sweep(eps, [&](double e) { return std::make_optional(r / e); }, r,
                         0.1);
  CHECK(std::abs(fit.rate - r) < 1e-12);
  CHECK(fit.pass);
  CHECK_FALSE(fit.partial);
}

TEST_CASE("whole-circle observation: C0 = T^{-1/2} within 1e-6") {
  auto spec = circle_spec(2 * M_PI, 192);
  Profile f;
  Region1D omega;
  omega.intervals = {{0.0, 2 * M_PI}};
  for (double T : {1.0, 2.0, 0.5}) {
    auto op = assemble_operator(spec, f, zero_q(), 0.05, 0);
    auto g = gramian_cost(op, f, omega, T, 48);
    REQUIRE(!g.refused);
    CHECK(std::abs(std::exp(g.log_C0) - 1.0 / std::sqrt(T)) < 1e-6);
  }
}

TEST_CASE("a single retained mode reproduces the witness ratio exactly") {
  auto spec = circle_spec(2.0, 128);
  auto f = Profile::from_expr(ScalarExpr::parse("sin(pi*s)/8", {"s"}));
  Region1D omega;
  omega.intervals = {{0.25, 0.75}};
  auto op = assemble_operator(spec, f, zero_q(), 0.05, 0);
  auto g = gramian_cost(op, f, omega, 1.0, 1);
  auto pair = lowest_eigenpairs(op, 1).front();
  auto w = witness_cost(pair, op, f, omega, 1.0);
  REQUIRE(!g.refused);
  REQUIRE(!w.infinite);
  CHECK(g.log_C0 == doctest::Approx(w.log_C0).epsilon(1e-12));
}

TEST_CASE("witness closed form for observation of the whole domain") {
  auto spec = circle_spec(2 * M_PI, 128);
  Profile f;
  Region1D omega;
  omega.intervals = {{0.0, 2 * M_PI}};
  const double eps = 0.05, T = 1.3;
  auto op = assemble_operator(spec, f, zero_q(), eps, 0);
  auto pair = lowest_eigenpairs(op, 2)[1];  // a mode with mu > 0
  auto w = witness_cost(pair, op, f, omega, T);
  double mu = pair.mu;
  double expect = std::exp(-mu * T / eps) /
                  std::sqrt(eps / (2 * mu) * (1 - std::exp(-2 * mu * T / eps)));
  CHECK(std::exp(w.log_C0) == doctest::Approx(expect).epsilon(1e-12));
  // and the ratio decreases with the horizon
  auto w2 = witness_cost(pair, op, f, omega, 2 * T);
  CHECK(w2.log_C0 < w.log_C0);
}

TEST_CASE("gramian dominates the witness and respects constant shifts") {
  auto sc = named_scenario("sphere_caps");
  sc.geometry.grid_n = 512;
  auto spec = sc.make_surface();
  auto f = sc.make_f();
  auto q = sc.make_q();
  auto omega = sc.omega_region();
  const double T = 1.0;
  for (double eps : {0.1, 0.05}) {
    int k = static_cast<int>(std::lround(1.0 / eps));
    auto op = assemble_operator(spec, f, q, eps, k);
    auto g = gramian_cost(op, f, omega, T, 48);
    REQUIRE(!g.refused);
    auto pot = effective_potential(spec, f, 1.0);
    auto pair = nearest_eigenpair(op, pot.V_min, 1).front();
    auto w = witness_cost(pair, op, f, omega, T);
    CHECK(g.log_C0 >= w.log_C0 - 1e-9);

    auto g2 = gramian_cost(op, f.shifted(2.0), omega, T, 48);
    REQUIRE(!g2.refused);
    CHECK(std::abs(g2.log_C0 - g.log_C0) < 1e-9);
  }
}

TEST_CASE("cost is nonincreasing in the horizon") {
  auto spec = circle_spec(2.0, 128);
  auto f = Profile::from_expr(ScalarExpr::parse("cos(pi*s)/4", {"s"}));
  Region1D omega;
  omega.intervals = {{0.3, 0.9}};
  auto op = assemble_operator(spec, f, zero_q(), 0.05, 0);
  double prev = 1e300;
  for (double T : {0.5, 1.0, 1.5, 2.0}) {
    auto g = gramian_cost(op, f, omega, T, 32);
    REQUIRE(!g.refused);
    CHECK(g.log_C0 <= prev + 1e-12);
    prev = g.log_C0;
  }
}

TEST_CASE("closed-form time integrals agree with brute-force evolution") {
  // independent route: RK4 on eps v' = -Kv with Simpson in time
  GeometryConfig cfg;
  cfg.kind = DomainCase::Interval;
  cfg.has_range = true;
  cfg.s_lo = 0.0;
  cfg.s_hi = 1.0;
  cfg.grid_n = 200;
  auto spec = build_surface(cfg);
  auto f = Profile::from_expr(ScalarExpr::parse("s/2", {"s"}));
  Region1D omega;
  omega.intervals = {{0.6, 0.9}};
  const double eps = 0.1, T = 0.4;
  auto op = assemble_operator(spec, f, zero_q(), eps, 0);
  const int n = op.n();

  auto pair = lowest_eigenpairs(op, 1).front();
  auto w = witness_cost(pair, op, f, omega, T);

  // time stepping of the mode (dense route, small dt)
  std::vector<double> v = pair.phi;
  auto rhs = [&](const std::vector<double>& x, std::vector<double>& out) {
    op.apply_stiffness(x, out);
    for (int i = 0; i < n; ++i) out[i] = -out[i] / (eps * op.mass[i]);
  };
  auto weighted_sq = [&](const std::vector<double>& x, bool on_omega) {
    double acc = 0;
    for (int i = 0; i < n; ++i) {
      if (on_omega && !omega.contains(op.grid[i])) continue;
      acc += x[i] * x[i] * std::exp(-f.f(op.grid[i]) / eps) * op.mass[i];
    }
    return acc;
  };
  const int steps = 4000;
  const double dt = T / steps;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double integral = 0.5 * weighted_sq(v, true) * dt;
  for (int s = 0; s < steps; ++s) {
    rhs(v, k1);
    for (int i = 0; i < n; ++i) tmp[i] = v[i] + 0.5 * dt * k1[i];
    rhs(tmp, k2);
    for (int i = 0; i < n; ++i) tmp[i] = v[i] + 0.5 * dt * k2[i];
    rhs(tmp, k3);
    for (int i = 0; i < n; ++i) tmp[i] = v[i] + dt * k3[i];
    rhs(tmp, k4);
    for (int i = 0; i < n; ++i)
      v[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    integral += (s + 1 == steps ? 0.5 : 1.0) * weighted_sq(v, true) * dt;
  }
  double ratio = std::sqrt(weighted_sq(v, false) / integral);
  CHECK(std::log(ratio) == doctest::Approx(w.log_C0).epsilon(1e-6));
}

TEST_CASE("theory rates: steep well, vacuous flat case, rotation-driven bound") {
  SUBCASE("steep-well interval certifies lambda*eta^2/n") {
    auto sc = named_scenario("flambda4");
    auto spec = sc.make_surface();
    auto f = sc.make_f();
    auto omega = sc.omega_region();
    auto pot = effective_potential(spec, f, 0.0);
    auto ag = agmon_distance_1d(pot, pot.V_min, AgmonTopology::Interval);
    weight_W(ag, f);
    auto rep = theoretical_rate(ag, pot, omega, 0.1, RateMode::General);
    CHECK(rep.t_unif_lower >= 4.0 * 0.25 * 0.25 - 1e-9);
    CHECK(rep.rate > 0.0);  // blow-up certified at T = 0.1
  }
  SUBCASE("constant f leaves a vacuous bound") {
    auto spec = circle_spec(2.0, 128);
    Profile f;
    Region1D omega;
    omega.intervals = {{0.2, 0.4}};
    auto pot = effective_potential(spec, f, 0.0);
    auto ag = agmon_distance_1d(pot, pot.V_min, AgmonTopology::Circle);
    weight_W(ag, f);
    auto rep = theoretical_rate(ag, pot, omega, 1.0, RateMode::General);
    CHECK(rep.rate <= 1e-12);
    CHECK_FALSE(rep.never_observable);  // omega meets the (everywhere) minimum set
  }
  SUBCASE("stationary point off omega: never uniformly observable") {
    GeometryConfig cfg;
    cfg.kind = DomainCase::Interval;
    cfg.has_range = true;
    cfg.s_lo = -2.0;
    cfg.s_hi = 2.0;
    cfg.grid_n = 256;
    auto spec = build_surface(cfg);
    auto f = Profile::from_expr(ScalarExpr::parse("s^2/2", {"s"}));
    Region1D omega;
    omega.intervals = {{1.0, 1.5}};  // misses the stationary point at 0
    auto pot = effective_potential(spec, f, 0.0);
    auto ag = agmon_distance_1d(pot, pot.V_min, AgmonTopology::Interval);
    weight_W(ag, f);
    auto rep = theoretical_rate(ag, pot, omega, 5.0, RateMode::General);
    CHECK(rep.never_observable);
    CHECK(std::isinf(rep.t_unif_lower));
  }
  SUBCASE("torus profile: positive rate at T = 1") {
    auto sc = named_scenario("torus_profile");
    auto spec = sc.make_surface();
    auto f = sc.make_f();
    auto omega = sc.omega_region();
    auto pot = effective_potential(spec, f, 1.0);
    REQUIRE(pot.unique_min);
    auto ag = agmon_distance_1d(pot, pot.V_min, AgmonTopology::Circle);
    weight_W(ag, f);
    auto rep = theoretical_rate(ag, pot, omega, 1.0, RateMode::Revolution);
    CHECK(rep.rate > 0.5);
    // the delta^{-1/2} blow-up of the uniform time
    CHECK(rep.t_unif_lower > 0.3 / std::sqrt(0.05));
  }
}

TEST_CASE("horizon bracket sentinels") {
  std::vector<double> Ts{0.5, 1.0, 1.5, 2.0};
  SUBCASE("no blow-up anywhere leaves T_lo absent") {
    auto br = t_unif_bracket(Ts, [](double) { return std::make_optional(0.01); }, 0.1);
    CHECK_FALSE(br.has_lo);
    CHECK(br.has_hi);
    CHECK(br.T_hi == 0.5);
  }
  SUBCASE("blow-up everywhere leaves T_hi absent") {
    auto br = t_unif_bracket(Ts, [](double T) { return std::make_optional(2.0 - T); },
                             0.1);
    CHECK(br.has_lo);
    CHECK(br.T_lo == 1.5);
    CHECK(br.has_hi);
    CHECK(br.T_hi == 2.0);
  }
}

TEST_CASE("rotational gramian takes the sup over modes") {
  auto sc = named_scenario("torus_profile");
  sc.geometry.grid_n = 256;
  auto spec = sc.make_surface();
  auto f = sc.make_f();
  auto q = sc.make_q();
  auto omega = sc.omega_region();
  const double eps = 0.05, T = 1.0;
  auto full = gramian_cost_rotational(spec, f, q, omega, T, eps, 24, 32);
  REQUIRE(!full.refused);
  for (int k : {0, 10, 20}) {
    auto op = assemble_operator(spec, f, q, eps, k);
    auto g = gramian_cost(op, f, omega, T, 32);
    if (!g.refused) CHECK(full.log_C0 >= g.log_C0 - 1e-12);
  }
}
