#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "viscobs/agmon.hpp"
#include "viscobs/scenario.hpp"
#include "viscobs/spectral.hpp"

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

ScalarExpr zero_q() { return ScalarExpr::parse("0", {"s"}); }

}  // namespace

TEST_CASE("harmonic levels eps(n + 1/2), with an independent bisection oracle") {
  auto sc = named_scenario("harmonic");
  auto spec = sc.make_surface();
  auto f = sc.make_f();
  auto q = sc.make_q();
  const double eps = 0.05;
  auto op = assemble_operator(spec, f, q, eps, 0);
  auto pairs = nearest_eigenpair(op, 0.0, 5);
  std::sort(pairs.begin(), pairs.end(),
            [](const EigenPair& a, const EigenPair& b) { return a.mu < b.mu; });
  for (int n = 0; n < 5; ++n)
    CHECK(std::abs(pairs[n].mu - eps * (n + 0.5)) < 1e-4);

  // independent route: assemble the reduced tridiagonal from scratch and
  // solve by Sturm bisection
  const int N = spec.grid_n;
  const double dx = spec.dx, e2 = eps * eps;
  std::vector<double> d(N), e(N - 1, -e2 / (dx * dx));
  for (int i = 0; i < N; ++i) {
    double s = spec.s_lo + (i + 0.5) * dx;
    double w = 2.0 * e2 / (dx * dx);
    if (i == 0 || i == N - 1) w = 3.0 * e2 / (dx * dx);  // Dirichlet half-cell
    d[i] = w + s * s / 4.0;
  }
  auto oracle = oracles::sturm_lowest(d, e, 5);
  for (int n = 0; n < 5; ++n)
    CHECK(pairs[n].mu == doctest::Approx(oracle[n]).epsilon(1e-9));
}

TEST_CASE("free circle mode: zero eigenvalue with the constant eigenfunction") {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Circle;
  cfg.L = 2 * M_PI;
  cfg.grid_n = 128;
  auto spec = build_surface(cfg);
  Profile f;
  auto op = assemble_operator(spec, f, zero_q(), 0.1, 0);
  auto pairs = lowest_eigenpairs(op, 1);
  CHECK(std::abs(pairs[0].mu) < 1e-12);
  double lo = 1e300, hi = -1e300;
  for (double v : pairs[0].phi) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo < 1e-9);
}

TEST_CASE("round-sphere mode gap obeys the k^{-2/3} envelope") {
  auto sc = named_scenario("sphere_caps");
  sc.geometry.grid_n = 1024;
  auto spec = sc.make_surface();
  Profile f;  // f = 0, c = 1
  for (int k : {20, 40}) {
    auto op = assemble_operator(spec, f, zero_q(), 1.0 / k, k);
    auto pairs = nearest_eigenpair(op, 1.0, 1);
    double gap = std::abs(pairs[0].mu - 1.0);
    CHECK(gap <= 3.0 * std::pow(double(k), -2.0 / 3.0));
    CHECK(pairs[0].norm_check < 1e-12);
  }
}

TEST_CASE("eigen residuals and orthonormality in the mass inner product") {
  auto sc = named_scenario("sphere_caps");
  sc.geometry.grid_n = 512;
  auto spec = sc.make_surface();
  auto f = sc.make_f();
  auto op = assemble_operator(spec, f, zero_q(), 0.05, 20);
  auto pairs = lowest_eigenpairs(op, 6);
  for (const auto& p : pairs) {
    std::vector<double> r(op.n());
    op.apply_stiffness(p.phi, r);
    double rn = 0, mn = 0;
    for (int i = 0; i < op.n(); ++i) {
      r[i] -= p.mu * op.mass[i] * p.phi[i];
      rn += r[i] * r[i];
      mn += viscobs::sq(op.mass[i] * p.phi[i]);
    }
    CHECK(std::sqrt(rn / mn) <= 1e-10);
  }
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      double g = 0;
      for (int i = 0; i < op.n(); ++i)
        g += pairs[a].phi[i] * pairs[b].phi[i] * op.mass[i];
      CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("nearest-eigenpair semantics at an unreachable target") {
  auto spec = interval_spec(0.0, 1.0, 64);
  Profile f;
  auto op = assemble_operator(spec, f, zero_q(), 0.1, 0);
  auto pairs = nearest_eigenpair(op, 1e9, 1);
  auto all = all_eigenvalues(op);
  CHECK(pairs[0].mu == doctest::Approx(all.back()));
  CHECK_THROWS_AS(nearest_eigenpair(op, 0.0, op.n() + 1), std::invalid_argument);
}

TEST_CASE("symmetric double well: parity of the two lowest modes") {
  auto spec = interval_spec(-3.0, 3.0, 512);
  auto f = Profile::from_expr(ScalarExpr::parse("s^3/3 - s", {"s"}));  // f' = s^2-1
  auto op = assemble_operator(spec, f, zero_q(), 0.05, 0, /*include_qf=*/false);
  auto pairs = lowest_eigenpairs(op, 2);
  const int n = op.n();
  for (const auto& p : pairs)
    for (int i = 0; i < n / 2; i += 5)
      CHECK(std::abs(std::abs(p.phi[i]) - std::abs(p.phi[n - 1 - i])) < 1e-9);
}

TEST_CASE("conjugation: identity at f = 0, exact round trip, closed form") {
  auto spec = interval_spec(0.0, 1.0, 64);
  Profile zero;
  std::vector<double> u(spec.grid.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(3.0 * spec.grid[i]) + 2.0;
  auto v = conjugate(u, zero, spec.grid, 0.5, true);
  CHECK(v.log_scale == 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(v.values[i] == u[i]);

  auto f = Profile::from_expr(ScalarExpr::parse("s", {"s"}));
  std::vector<double> ones(spec.grid.size(), 1.0);
  auto ev = conjugate(ones, f, spec.grid, 0.5, true);
  for (std::size_t i = 0; i < ones.size(); i += 9)
    CHECK(ev.values[i] == doctest::Approx(std::exp(spec.grid[i])).epsilon(1e-14));

  auto fwd = conjugate(u, f, spec.grid, 0.07, true);
  auto back = conjugate(fwd.values, f, spec.grid, 0.07, false);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(back.values[i] == doctest::Approx(u[i]).epsilon(1e-14));
}

TEST_CASE("conjugation overflow guard switches to the scaled representation") {
  auto spec = interval_spec(0.0, 2000.0, 128);
  auto f = Profile::from_expr(ScalarExpr::parse("s", {"s"}));
  std::vector<double> ones(spec.grid.size(), 1.0);
  auto v = conjugate(ones, f, spec.grid, 0.5, true);  // max exponent = 2000
  CHECK(v.log_scale > 0.0);
  for (double x : v.values) CHECK(std::isfinite(x));
  std::size_t last = spec.grid.size() - 1;
  CHECK(v.log_scale + std::log(v.values[last]) ==
        doctest::Approx(spec.grid[last] / 1.0).epsilon(1e-12));
}

TEST_CASE("energy densities: definitional identity and the Gronwall envelope") {
  auto sc = named_scenario("sphere_caps");
  sc.geometry.grid_n = 1024;
  auto spec = sc.make_surface();
  Profile f;  // f = 0 keeps the closed forms clean
  const int k = 40;
  auto op = assemble_operator(spec, f, zero_q(), 1.0 / k, k);
  auto pot = effective_potential(spec, f, 1.0);
  auto pair = nearest_eigenpair(op, pot.V_min, 1).front();
  auto e = energy_densities(pair, op);
  for (int i = 0; i < op.n(); i += 13)
    CHECK(e.Ek[i] - e.Ek_plus[i] ==
          doctest::Approx(viscobs::sq(pair.phi[i])).epsilon(1e-12));

  auto ag = agmon_distance_1d(pot, pot.V_min, AgmonTopology::Interval);
  auto idx = [&](double s) {
    return static_cast<std::size_t>((s - spec.s_lo) / spec.dx);
  };
  const double delta = 0.1;
  for (auto [s, t] : std::vector<std::pair<double, double>>{
           {0.6, 0.9}, {0.5, 1.2}, {2.2, 2.6}}) {
    double Es = e.Ek_plus[idx(s)], Et = e.Ek_plus[idx(t)];
    double dA_gap = std::abs(ag.d_A[idx(s)] - ag.d_A[idx(t)]);
    CHECK(Et <= std::exp(2.0 / pair.eps * (dA_gap + delta)) * Es);
    CHECK(Es <= std::exp(2.0 / pair.eps * (dA_gap + delta)) * Et);
  }
}

TEST_CASE("two-sided localization on the round sphere at k = 40") {
  auto sc = named_scenario("sphere_caps");
  sc.geometry.grid_n = 2048;
  auto spec = sc.make_surface();
  Profile f;
  const int k = 40;
  auto op = assemble_operator(spec, f, zero_q(), 1.0 / k, k);
  auto pot = effective_potential(spec, f, 1.0);
  auto pair = nearest_eigenpair(op, pot.V_min, 1).front();
  auto ag = agmon_distance_1d(pot, pot.V_min, AgmonTopology::Interval);

  // bands centered at d_A = 0.5, 1.0, 1.5 (s below the equator)
  std::vector<std::pair<double, double>> bands;
  for (double dA : {0.5, 1.0, 1.5}) {
    double hi = std::asin(std::exp(-(dA - 0.06)));
    double lo = std::asin(std::exp(-(dA + 0.06)));
    bands.push_back({lo, hi});
  }
  auto rep = verify_decay_bounds(pair, ag, op, bands, 0.35, pot.V_min, pot.s_min, 0.35,
                                 0.2);
  REQUIRE(!rep.refused);
  CHECK(rep.mu_gap < 0.1);
  for (const auto& b : rep.bands) {
    CHECK(b.lower_ok);
    CHECK(b.upper_ok);
  }
  CHECK(rep.slope > 0.9);
  CHECK(rep.slope < 1.1);
  CHECK(rep.allowed_mass >= 0.5);

  // a band inside the allowed region has d_A = 0 and a vacuous upper bound
  auto inner = verify_decay_bounds(pair, ag, op,
                                   {{pot.s_min - 0.1, pot.s_min + 0.1}}, 0.35,
                                   pot.V_min, pot.s_min, 0.35, 0.2);
  CHECK(inner.bands[0].dA_inf == 0.0);
  CHECK(inner.bands[0].upper_ok);

  // hypothesis violation: a pair far from the bottom is refused with the gap
  auto far = nearest_eigenpair(op, pot.V_min + 3.0, 1).front();
  auto refused = verify_decay_bounds(far, ag, op, bands, 0.35, pot.V_min, pot.s_min,
                                     0.35, 0.2);
  CHECK(refused.refused);
  CHECK(refused.mu_gap > 0.2);
}

TEST_CASE("boundary flux: symmetry and the no-boundary error") {
  GeometryConfig cfg;
  cfg.kind = DomainCase::Cylinder;
  cfg.L = 1.0;
  cfg.R_text = "1 + 4*s*(1 - s)";  // reflection-symmetric bulge
  cfg.grid_n = 512;
  auto spec = build_surface(cfg);
  Profile f;  // keep the operator reflection symmetric
  auto op = assemble_operator(spec, f, zero_q(), 0.1, 8);
  auto pair = lowest_eigenpairs(op, 1).front();
  auto flux = boundary_flux(pair, op);
  REQUIRE(flux.has_lo);
  REQUIRE(flux.has_hi);
  CHECK(std::abs(flux.dphi_lo - flux.dphi_hi) < 1e-9 * std::max(1.0, flux.dphi_lo));
  CHECK(flux.h12_weight ==
        doctest::Approx(std::sqrt(2 * M_PI) * std::pow(65.0, 0.25)));

  auto ssc = named_scenario("sphere_caps");
  ssc.geometry.grid_n = 256;
  auto sphere = ssc.make_surface();
  auto op2 = assemble_operator(sphere, Profile(), zero_q(), 0.1, 4);
  auto p2 = lowest_eigenpairs(op2, 1).front();
  CHECK_THROWS_AS(boundary_flux(p2, op2), std::invalid_argument);
}

TEST_CASE("boundary-well flux decays like the Agmon distance at the wall") {
  auto sc = named_scenario("cylinder_profile");
  sc.geometry.grid_n = 1024;
  auto spec = sc.make_surface();
  auto f = sc.make_f();
  auto q = sc.make_q();
  auto pot = effective_potential(spec, f, 1.0);
  auto ag = agmon_distance_1d(pot, pot.V_min, AgmonTopology::Interval);
  REQUIRE(std::isfinite(ag.d_A_hi));
  const int k = 8;
  const double eps = 1.0 / k;
  auto op = assemble_operator(spec, f, q, eps, k);
  auto pair = nearest_eigenpair(op, pot.V_min, 1).front();
  auto flux = boundary_flux(pair, op);
  REQUIRE(flux.dphi_hi > 0.0);
  double lhs = -eps * std::log(flux.dphi_hi);
  CHECK(lhs >= 0.9 * ag.d_A_hi - 0.5);
}

TEST_CASE("evolution through the conjugated operator matches direct stepping") {
  auto spec = interval_spec(0.0, 1.0, 64);
  auto f = Profile::from_expr(ScalarExpr::parse("sin(3*s)", {"s"}));
  const double eps = 0.1;
  auto op = assemble_operator(spec, f, zero_q(), eps, 0);
  const int n = op.n();

  std::vector<double> u0(n);
  for (int i = 0; i < n; ++i) u0[i] = std::exp(-viscobs::sq((op.grid[i] - 0.4) / 0.1));

  // direct route: RK4 on du/dt = -(1/eps) D^{-1} M^{-1} K D u, 100 steps
  std::vector<double> D(n);
  for (int i = 0; i < n; ++i) D[i] = std::exp(f.f(op.grid[i]) / (2.0 * eps));
  auto apply = [&](const std::vector<double>& u, std::vector<double>& out) {
    std::vector<double> v(n), Kv(n);
    for (int i = 0; i < n; ++i) v[i] = D[i] * u[i];
    op.apply_stiffness(v, Kv);
    for (int i = 0; i < n; ++i) out[i] = -Kv[i] / (eps * op.mass[i] * D[i]);
  };
  std::vector<double> u = u0, k1(n), k2(n), k3(n), k4(n), tmp(n);
  const double dt = 2.5e-5;
  for (int step = 0; step < 100; ++step) {
    apply(u, k1);
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
    apply(tmp, k2);
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
    apply(tmp, k3);
    for (int i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
    apply(tmp, k4);
    for (int i = 0; i < n; ++i)
      u[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }

  // spectral route: diagonalize the symmetric operator, evolve, conjugate back
  auto pairs = lowest_eigenpairs(op, n);
  std::vector<double> v0(n), c(n, 0.0), v(n, 0.0);
  for (int i = 0; i < n; ++i) v0[i] = D[i] * u0[i];
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i) c[m] += pairs[m].phi[i] * v0[i] * op.mass[i];
  const double T = 100 * dt;
  for (int m = 0; m < n; ++m) {
    double amp = c[m] * std::exp(-pairs[m].mu * T / eps);
    for (int i = 0; i < n; ++i) v[i] += amp * pairs[m].phi[i];
  }
  double err = 0, scale = 0;
  for (int i = 0; i < n; ++i) {
    err = std::max(err, std::abs(v[i] / D[i] - u[i]));
    scale = std::max(scale, std::abs(u[i]));
  }
  CHECK(err / scale < 1e-8);
}

TEST_CASE("grid refinement moves the low eigenvalues at second order") {
  auto f = Profile::from_expr(ScalarExpr::parse("s^2/2", {"s"}));
  auto mu_at = [&](int n) {
    auto spec = interval_spec(-12.0, 12.0, n);
    auto op = assemble_operator(spec, f, ScalarExpr::parse("0.5", {"s"}), 0.1, 0);
    auto vals = all_eigenvalues(op);
    vals.resize(10);
    return vals;
  };
  auto a = mu_at(256), b = mu_at(512), c = mu_at(1024);
  for (int j = 0; j < 10; ++j) {
    double d1 = std::abs(a[j] - b[j]);
    double d2 = std::abs(b[j] - c[j]);
    // fourfold error reduction per refinement, with slack
    CHECK(d2 <= 0.4 * d1 + 1e-12);
  }
}
