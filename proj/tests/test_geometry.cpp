#include <doctest.h>

#include <cmath>

#include "viscobs/geometry.hpp"

using namespace viscobs;

namespace {

GeometryConfig sphere_cfg(const std::string& R, double L = M_PI, int n = 256) {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Sphere;
  cfg.L = L;
  cfg.R_text = R;
  cfg.grid_n = n;
  return cfg;
}

}  // namespace

TEST_CASE("sphere profile accepted with pole set") {
  auto spec = build_surface(sphere_cfg("sin(s)"));
  CHECK(spec.pole_lo);
  CHECK(spec.pole_hi);
  CHECK(!spec.dirichlet_lo);
  CHECK(spec.grid.front() == doctest::Approx(0.5 * spec.dx));
  CHECK(spec.grid.back() == doctest::Approx(M_PI - 0.5 * spec.dx));
}

TEST_CASE("cylinder accepted with boundaries at both ends") {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Cylinder;
  cfg.L = 1.0;
  cfg.R_text = "0.5";
  cfg.grid_n = 128;
  auto spec = build_surface(cfg);
  CHECK(spec.dirichlet_lo);
  CHECK(spec.dirichlet_hi);
}

TEST_CASE("sphere profile with R(L) != 0 rejected with the failed condition") {
  CHECK_THROWS_WITH_AS(build_surface(sphere_cfg("s")),
                       doctest::Contains("R(L) = 0"), std::invalid_argument);
  // wrong slope at the north pole
  CHECK_THROWS_WITH_AS(build_surface(sphere_cfg("0.5*sin(s)")),
                       doctest::Contains("R'(0) = 1"), std::invalid_argument);
}

TEST_CASE("torus periodicity conditions checked") {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Torus;
  cfg.L = 2.0;
  cfg.R_text = "2 + cos(pi*s)";
  cfg.grid_n = 128;
  CHECK_NOTHROW(build_surface(cfg));
  cfg.R_text = "2 + s";
  CHECK_THROWS_AS(build_surface(cfg), std::invalid_argument);
}

TEST_CASE("effective potential on the round sphere with f = 0") {
  auto spec = build_surface(sphere_cfg("sin(s)", M_PI, 512));
  Profile f;  // zero
  auto pot = effective_potential(spec, f, 1.0);
  CHECK(pot.V_min == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(pot.s_min == doctest::Approx(M_PI / 2).epsilon(1e-8));
  CHECK(pot.unique_min);
  // V = 1/sin^2 s at the nodes
  for (std::size_t i = 0; i < pot.grid.size(); i += 37)
    CHECK(pot.values[i] == doctest::Approx(1.0 / viscobs::sq(std::sin(pot.grid[i]))));
}

TEST_CASE("potential of the quadratic well on an interval") {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Interval;
  cfg.has_range = true;
  cfg.s_lo = -2.0;
  cfg.s_hi = 2.0;
  cfg.grid_n = 256;
  auto spec = build_surface(cfg);
  auto f = Profile::from_expr(ScalarExpr::parse("s^2/2", {"s"}));
  auto pot = effective_potential(spec, f, 0.0);
  CHECK(pot.V_min == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(pot.s_min) < 1e-9);
  CHECK(pot.unique_min);
  for (std::size_t i = 0; i < pot.grid.size(); i += 17)
    CHECK(pot.values[i] == doctest::Approx(viscobs::sq(pot.grid[i]) / 4.0));
}

TEST_CASE("flat potential with rotation flagged as non-unique") {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Cylinder;
  cfg.L = 1.0;
  cfg.R_text = "0.5";
  cfg.grid_n = 128;
  auto spec = build_surface(cfg);
  Profile f;
  auto pot = effective_potential(spec, f, 1.0);
  CHECK_FALSE(pot.unique_min);  // V = 4 everywhere
}

TEST_CASE("adding a constant to f leaves the potential bitwise unchanged") {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Interval;
  cfg.has_range = true;
  cfg.s_lo = -1.0;
  cfg.s_hi = 3.0;
  cfg.grid_n = 128;
  auto spec = build_surface(cfg);
  auto f = Profile::from_expr(ScalarExpr::parse("sin(2*s) + s^2/3", {"s"}));
  auto pot1 = effective_potential(spec, f, 0.0);
  auto pot2 = effective_potential(spec, f.shifted(11.0), 0.0);
  for (std::size_t i = 0; i < pot1.values.size(); ++i)
    CHECK(pot1.values[i] == pot2.values[i]);  // bitwise
}

TEST_CASE("grid refinement moves V_min at second order") {
  auto coarse = effective_potential(build_surface(sphere_cfg("sin(s)", M_PI, 128)),
                                    Profile(), 1.0);
  auto fine = effective_potential(build_surface(sphere_cfg("sin(s)", M_PI, 256)),
                                  Profile(), 1.0);
  // the refined minimum is golden-section accurate in both cases
  CHECK(std::abs(coarse.V_min - fine.V_min) <= 4.0 / (128.0 * 128.0));
}

TEST_CASE("2D potential of the separable steep well") {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Box2d;
  cfg.box_lo[0] = cfg.box_lo[1] = -0.5;
  cfg.box_hi[0] = cfg.box_hi[1] = 0.5;
  cfg.box_n = 65;
  auto spec = build_surface(cfg);
  double lambda = 4.0;
  auto f1 = Profile::from_derivative(
      ScalarExpr::parse("sqrt(16*s^2 + 1)", {"s"}), -0.5, 0.5);
  auto f = Profile2D::separable(f1);
  auto pot = effective_potential_2d(spec, f);
  CHECK(pot.V_min == doctest::Approx(0.5).epsilon(1e-12));  // (0 + n)/4, n = 2
  CHECK(pot.unique_min);
  // V(x) = (lambda^2 |x|^2 + 2)/4 on the lattice
  double x = pot.x_at(48), y = pot.y_at(20);
  double expect = (lambda * lambda * (x * x + y * y) + 2.0) / 4.0;
  CHECK(pot.values[20 * 65 + 48] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("region complement handles the circle wrap") {
  Region1D omega;
  omega.intervals = {{0.0, 0.25}, {1.75, 2.0}};
  auto comps = omega.complement(0.0, 2.0, true);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].first == doctest::Approx(0.25));
  CHECK(comps[0].second == doctest::Approx(1.75));
  auto open = omega.complement(0.0, 2.0, false);
  REQUIRE(open.size() == 1);
}

TEST_CASE("profile from derivative integrates accurately") {
  auto p = Profile::from_derivative(ScalarExpr::parse("cos(s)", {"s"}), 0.0, 3.0);
  for (double s : {0.3, 1.1, 2.7})
    CHECK(p.f(s) == doctest::Approx(std::sin(s)).epsilon(1e-10));
  CHECK(p.fp(1.0) == doctest::Approx(std::cos(1.0)));
  CHECK(p.fpp(1.0) == doctest::Approx(-std::sin(1.0)));
  auto shifted = p.shifted(2.0);
  CHECK(shifted.f(1.1) == doctest::Approx(std::sin(1.1) + 2.0).epsilon(1e-10));
}
