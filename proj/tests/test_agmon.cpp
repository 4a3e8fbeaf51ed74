#include <doctest.h>

#include <cmath>

#include "viscobs/agmon.hpp"
#include "viscobs/numerics.hpp"
#include "viscobs/scenario.hpp"

using namespace viscobs;

namespace {

SurfaceSpec interval_spec(double lo, double hi, int n) {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Interval;
  cfg.has_range = true;
  cfg.s_lo = lo;
  cfg.s_hi = hi;
  cfg.grid_n = n;
  return build_surface(cfg);
}

}  // namespace

TEST_CASE("quadratic well: d_A(s) = s^2/4 by quadrature") {
  auto spec = interval_spec(-20.0, 20.0, 4001);
  auto f = Profile::from_expr(ScalarExpr::parse("s^2/2", {"s"}));
  auto pot = effective_potential(spec, f, 0.0);
  auto ag = agmon_distance_1d(pot, 0.0, AgmonTopology::Interval);
  for (std::size_t i = 0; i < ag.grid.size(); i += 13) {
    if (ag.allowed[i]) continue;  // the allowed cell carries d_A = 0 by definition
    CHECK(std::abs(ag.d_A[i] - viscobs::sq(ag.grid[i]) / 4.0) <= 1e-6);
  }
}

TEST_CASE("allowed region carries zero distance exactly") {
  auto spec = interval_spec(-2.0, 2.0, 128);
  auto f = Profile::from_expr(ScalarExpr::parse("s^2/2", {"s"}));
  auto pot = effective_potential(spec, f, 0.0);
  auto ag = agmon_distance_1d(pot, 0.0, AgmonTopology::Interval);
  int zeros = 0;
  for (std::size_t i = 0; i < ag.grid.size(); ++i) {
    if (ag.allowed[i]) {
      CHECK(ag.d_A[i] == 0.0);
      ++zeros;
    } else {
      CHECK(ag.d_A[i] > 0.0);
    }
  }
  CHECK(zeros >= 1);
}

TEST_CASE("energy below the bottom is rejected") {
  auto spec = interval_spec(-2.0, 2.0, 128);
  auto f = Profile::from_expr(ScalarExpr::parse("s^2/2", {"s"}));
  auto pot = effective_potential(spec, f, 0.0);
  CHECK_THROWS_AS(agmon_distance_1d(pot, -0.5, AgmonTopology::Interval),
                  std::invalid_argument);
}

TEST_CASE("pole asymptotics: d_A + c log s stays bounded near the pole") {
  auto sc = named_scenario("sphere_caps");
  sc.geometry.grid_n = 4000;
  auto spec = sc.make_surface();
  Profile zero;  // f = 0, c = 1: V = 1/sin^2, d_A = -log sin s
  auto pot = effective_potential(spec, zero, 1.0);
  auto ag = agmon_distance_1d(pot, pot.V_min, AgmonTopology::Interval);
  double lo = 1e300, hi = -1e300;
  for (double s = 1e-3; s <= 1e-2; s += 5e-4) {
    double v = ag.dA_at(s) + std::log(s);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo < 0.05);
  // exact form for this profile
  CHECK(ag.dA_at(0.3) == doctest::Approx(-std::log(std::sin(0.3))).epsilon(1e-5));
  CHECK(!std::isfinite(ag.d_A_lo));  // confinement diverges at the pole
}

TEST_CASE("steep-well slice: V = (lambda^2 s^2 + 1)/4 gives lambda s^2/4") {
  const double lambda = 4.0;
  auto spec = interval_spec(-1.0, 1.0, 1024);
  auto f = Profile::from_derivative(ScalarExpr::parse("sqrt(16*s^2 + 1)", {"s"}), -1.0,
                                    1.0);
  auto pot = effective_potential(spec, f, 0.0);
  CHECK(pot.V_min == doctest::Approx(0.25).epsilon(1e-10));
  auto ag = agmon_distance_1d(pot, pot.V_min, AgmonTopology::Interval);
  for (double s : {-0.8, -0.3, 0.45, 0.9})
    CHECK(ag.dA_at(s) == doctest::Approx(lambda * s * s / 4.0).epsilon(1e-6));
}

TEST_CASE("circle topology takes the shorter arc") {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Circle;
  cfg.L = 2.0;
  cfg.grid_n = 512;
  auto spec = build_surface(cfg);
  // V = sin^2(pi s): minima at s = 0 and s = 1; E above 0 keeps two allowed
  // islands, and distances must use the shorter direction
  auto f = Profile::from_expr(ScalarExpr::parse("-cos(pi*s)*2/pi", {"s"}));
  // f' = 2 sin(pi s): V = sin^2(pi s)
  auto pot = effective_potential(spec, f, 0.0);
  auto ag = agmon_distance_1d(pot, 0.01, AgmonTopology::Circle);
  // by symmetry d_A(0.5) == d_A(1.5) (both between the islands)
  CHECK(ag.dA_at(0.5) == doctest::Approx(ag.dA_at(1.5)).epsilon(1e-6));
  // inside an island the distance vanishes
  CHECK(ag.dA_at(1.0) == 0.0);
}

TEST_CASE("monotonicity in the energy level") {
  auto spec = interval_spec(-2.0, 2.0, 256);
  auto f = Profile::from_expr(ScalarExpr::parse("s^2/2", {"s"}));
  auto pot = effective_potential(spec, f, 0.0);
  auto ag1 = agmon_distance_1d(pot, 0.0, AgmonTopology::Interval);
  auto ag2 = agmon_distance_1d(pot, 0.25, AgmonTopology::Interval);
  for (std::size_t i = 0; i < ag1.grid.size(); i += 7)
    CHECK(ag1.d_A[i] >= ag2.d_A[i] - 1e-12);
}

TEST_CASE("1-Lipschitz with respect to the local metric") {
  auto spec = interval_spec(-2.0, 2.0, 256);
  auto f = Profile::from_expr(ScalarExpr::parse("sin(2*s) + s^2/2", {"s"}));
  auto pot = effective_potential(spec, f, 0.0);
  auto ag = agmon_distance_1d(pot, pot.V_min + 0.05, AgmonTopology::Interval);
  for (std::size_t i = 0; i + 8 < ag.grid.size(); i += 8) {
    double seg = adaptive_simpson(
        [&](double s) {
          double g = pot.eval(s) - ag.E;
          return g > 0 ? std::sqrt(g) : 0.0;
        },
        ag.grid[i], ag.grid[i + 8], 1e-10);
    CHECK(std::abs(ag.d_A[i + 8] - ag.d_A[i]) <= seg + 1e-7);
  }
}

TEST_CASE("weight W = d_A + f/2, bitwise, and the recorded minima") {
  auto spec = interval_spec(-2.0, 2.0, 256);
  auto f = Profile::from_expr(ScalarExpr::parse("s^2/2 + s/4", {"s"}));
  auto pot = effective_potential(spec, f, 0.0);
  auto ag = agmon_distance_1d(pot, pot.V_min, AgmonTopology::Interval);
  weight_W(ag, f);
  for (std::size_t i = 0; i < ag.grid.size(); i += 11)
    CHECK(ag.W[i] == ag.d_A[i] + 0.5 * f.f(ag.grid[i]));  // bitwise construction
  Region1D omega;
  omega.intervals = {{1.0, 1.5}};
  double wmin = 1e300;
  for (std::size_t i = 0; i < ag.grid.size(); ++i)
    if (omega.contains(ag.grid[i])) wmin = std::min(wmin, ag.W[i]);
  CHECK(ag.W_min_over(omega) <= wmin + 1e-12);
  CHECK(ag.W_min <= ag.W_min_over(omega));
}

TEST_CASE("constant shift moves W by C/2 and leaves the gap unchanged") {
  auto spec = interval_spec(-2.0, 2.0, 256);
  auto f = Profile::from_expr(ScalarExpr::parse("s^2/2", {"s"}));
  auto pot = effective_potential(spec, f, 0.0);
  auto ag1 = agmon_distance_1d(pot, pot.V_min, AgmonTopology::Interval);
  auto ag2 = ag1;
  weight_W(ag1, f);
  weight_W(ag2, f.shifted(3.0));
  Region1D omega;
  omega.intervals = {{1.0, 1.5}};
  for (std::size_t i = 0; i < ag1.grid.size(); i += 19)
    CHECK(ag2.W[i] - ag1.W[i] == doctest::Approx(1.5).epsilon(1e-12));
  double gap1 = ag1.W_min_over(omega) - ag1.W_min;
  double gap2 = ag2.W_min_over(omega) - ag2.W_min;
  CHECK(gap1 == doctest::Approx(gap2).epsilon(1e-9));
}

TEST_CASE("2D fast marching: radial wells against the closed forms") {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Box2d;
  cfg.box_lo[0] = cfg.box_lo[1] = -0.5;
  cfg.box_hi[0] = cfg.box_hi[1] = 0.5;
  cfg.box_n = 129;  // h = 1/128 for the unit-rate checks
  auto spec = build_surface(cfg);

  SUBCASE("V = |x|^2, E = 0: d_A = |x|^2/2") {
    auto f2 =
        Profile2D::from_expr(ScalarExpr::parse("(x1^2 + x2^2)", {"x1", "x2"}));
    // grad f = 2x: V = |x|^2
    auto pot = effective_potential_2d(spec, f2);
    auto ag = agmon_distance_grid(pot, 0.0);
    double err = 0;
    for (int j = 0; j < pot.ny; ++j)
      for (int i = 0; i < pot.nx; ++i) {
        double x = pot.x_at(i), y = pot.y_at(j);
        err = std::max(err, std::abs(ag.d_A[j * pot.nx + i] - (x * x + y * y) / 2.0));
      }
    CHECK(err < 2e-2);  // first-order at h = 1/128
  }

  SUBCASE("V constant at the energy level: d_A vanishes") {
    auto f2 = Profile2D::from_expr(ScalarExpr::parse("2*x1 + 0*x2", {"x1", "x2"}));
    auto pot = effective_potential_2d(spec, f2);  // V = 1 everywhere
    auto ag = agmon_distance_grid(pot, 1.0);
    for (double v : ag.d_A) CHECK(v == 0.0);
  }
}
