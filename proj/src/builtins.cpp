#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "viscobs/scenario.hpp"

namespace viscobs {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double get(const std::map<std::string, double>& params, const std::string& key,
           double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void check_range(const std::string& name, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi))
    throw std::invalid_argument("parameter " + name + " = " + fmt(v) +
                                " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
}

// Rising cutoff: 0 below a, 1 above b, smoothstep transition.
std::string rise(double a, double b) {
  return "smoothstep(" + fmt(a) + ", " + fmt(b) + ", s)";
}
std::string fall(double a, double b) {
  return "(1 - smoothstep(" + fmt(a) + ", " + fmt(b) + ", s))";
}

Scenario flambda(double lambda, int dim) {
  check_range("lambda", lambda, 0.1, 64.0);
  Scenario sc;
  sc.name = "flambda" + std::to_string(static_cast<int>(lambda)) +
            (dim == 2 ? "_2d" : "");
  const double eta = 0.25;
  if (dim == 1) {
    sc.geometry.kind = DomainCase::Interval;
    sc.geometry.has_range = true;
    sc.geometry.s_lo = -1.0;
    sc.geometry.s_hi = 1.0;
    sc.geometry.L = 2.0;
    sc.geometry.grid_n = 2048;
    sc.omega_intervals = {eta, 2 * eta};
    sc.analyses = {"flow", "agmon", "spectral", "observability"};
  } else {
    sc.geometry.kind = DomainCase::Box2d;
    sc.geometry.box_lo[0] = sc.geometry.box_lo[1] = -0.5;
    sc.geometry.box_hi[0] = sc.geometry.box_hi[1] = 0.5;
    sc.geometry.box_n = 513;
    sc.omega_boxes = {0.3, 0.3, 0.45, 0.45};
    sc.analyses = {"flow", "agmon"};
  }
  sc.fprime_text = "sqrt(" + fmt(lambda * lambda) + "*s^2 + 1)";
  sc.c = 0.0;
  sc.flow_condition = "fc";
  sc.epsilons = {0.1, 0.070710678118654752, 0.05, 0.035355339059327376, 0.025};
  sc.Ts = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  const int n = dim;
  const double bound = lambda * eta * eta / n;
  if (dim == 1) {
    // flushing within the diameter, uniform time at least lambda*eta^2/n
    sc.predictions.push_back({"T_flow_sim", "le", 2.0, 1e-3});
    sc.predictions.push_back({"t_unif_lower", "ge", bound, 1e-9});
    sc.predictions.push_back({"t_unif_T_lo", "ge", bound - 0.1 * std::max(1.0, bound), 0.0});
  } else {
    sc.predictions.push_back({"T_flow_sim", "le", std::sqrt(2.0) * 1.0, 1e-3});
    sc.predictions.push_back({"t_unif_lower", "ge", bound, 1e-9});
    sc.predictions.push_back({"fmm_max_err", "le", 5e-3, 0.0});
  }
  return sc;
}

Scenario sphere_caps(double delta, double c) {
  check_range("delta", delta, 1e-3, 0.5);
  check_range("c", c, 0.01, 16.0);
  Scenario sc;
  sc.name = "sphere_caps";
  const double L = M_PI;
  sc.geometry.kind = DomainCase::Sphere;
  sc.geometry.L = L;
  sc.geometry.R_text = "sin(s)";
  sc.geometry.grid_n = 2048;
  // f' = 1 on [delta, L-delta], smoothstep shoulders of width delta/2
  sc.fprime_text = rise(delta / 2, delta) + "*" + fall(L - delta, L - delta / 2);
  sc.c = c;
  sc.omega_intervals = {0.0, delta, L - delta, L};
  sc.ks = {10, 14, 20, 28, 40};
  sc.Ts = {1.0};
  sc.kernel_t_factors = {0.5, 1.2};
  sc.analyses = {"flow", "agmon", "spectral", "observability", "kernel"};
  sc.predictions.push_back({"T_flow_sim", "abs", L - 2 * delta, 1e-3});
  sc.predictions.push_back({"T_flow_closed", "abs", L - 2 * delta, 1e-6});
  sc.predictions.push_back({"V_min", "abs", c * c + 0.25, 1e-9});
  sc.predictions.push_back({"unique_min", "abs", 1.0, 0.0});
  return sc;
}

Scenario torus_profile(double delta) {
  check_range("delta", delta, 1e-3, 0.5);
  Scenario sc;
  sc.name = "torus_profile";
  const double L = 2.0, alpha = 0.25;
  const double beta2 = (L / 2 - alpha) / 2;  // plateau starts here (from s_min)
  sc.geometry.kind = DomainCase::Torus;
  sc.geometry.L = L;
  // chi = 1 + (1/delta - 1) * smoothstep(0, beta2, |s - 1|); R = chi^{-1/2}
  std::string chi = "(1 + " + fmt(1.0 / delta - 1.0) + "*smoothstep(0, " + fmt(beta2) +
                    ", abs(s - 1)))";
  sc.geometry.R_text = "1/sqrt(" + chi + ")";
  sc.geometry.grid_n = 512;
  sc.f_text = "0";
  sc.c = 1.0;
  sc.omega_intervals = {0.0, alpha, L - alpha, L};
  sc.ks = {10, 14, 20, 28, 40};
  sc.Ts = {1.0};
  sc.n_modes = 64;
  sc.analyses = {"flow", "agmon", "spectral", "observability"};
  // with f = 0 the profile floor is exactly sqrt(delta)
  sc.predictions.push_back({"R_min", "abs", std::sqrt(delta), 1e-12});
  sc.predictions.push_back({"V_min", "abs", 1.0, 1e-10});
  sc.predictions.push_back({"unique_min", "abs", 1.0, 0.0});
  return sc;
}

Scenario cylinder_profile(double delta, double gamma) {
  check_range("delta", delta, 1e-3, 1.0);
  if (!(gamma > 2.0)) throw std::invalid_argument("cylinder_profile needs gamma > 2");
  Scenario sc;
  sc.name = "cylinder_profile";
  const double L = 1.0;
  const double M = 0.25;       // max |f'|^2/4 for f = s
  const double margin = 0.25;  // keeps V strictly above |f'|^2/4 at s_min
  sc.geometry.kind = DomainCase::Cylinder;
  sc.geometry.L = L;
  // t = min(s, L-s); V = chi(t)/(t+delta)^gamma + (1-chi(t))(t-L/2)^2 + M + margin
  std::string t = "min(s, " + fmt(L) + " - s)";
  std::string chi = "(1 - smoothstep(" + fmt(L / 4) + ", " + fmt(0.45 * L) + ", " + t + "))";
  std::string V = "(" + chi + "/(" + t + " + " + fmt(delta) + ")^" + fmt(gamma) +
                  " + (1 - " + chi + ")*(" + t + " - " + fmt(L / 2) + ")^2 + " +
                  fmt(M + margin) + ")";
  sc.geometry.R_text = "1/sqrt(" + V + " - " + fmt(M) + ")";
  sc.geometry.grid_n = 1024;
  sc.f_text = "s";
  sc.c = 1.0;
  sc.boundary_obs = "both";
  sc.ks = {8, 10, 12};
  sc.Ts = {1.0};
  sc.analyses = {"flow", "agmon", "spectral", "observability"};
  sc.flow_condition = "fc";
  sc.predictions.push_back({"T_flow_sim", "abs", L, 1e-3});
  sc.predictions.push_back({"V_min", "abs", M + margin, 1e-9});
  // uniform-time lower bound carries the delta^{1-gamma/2} blow-up
  double dA_tail = 2.0 / (gamma - 2.0) *
                   (std::pow(delta, 1.0 - gamma / 2) -
                    std::pow(delta + L / 4, 1.0 - gamma / 2));
  sc.predictions.push_back({"t_unif_lower", "ge", dA_tail / (M + margin) - 0.55, 0.0});
  return sc;
}

Scenario whole_circle() {
  Scenario sc;
  sc.name = "whole_circle";
  sc.geometry.kind = DomainCase::Circle;
  sc.geometry.L = 2 * M_PI;
  sc.geometry.grid_n = 192;
  sc.f_text = "0";
  sc.c = 0.0;
  sc.omega_intervals = {0.0, 2 * M_PI};
  sc.epsilons = {0.1, 0.05, 0.04, 0.025};
  sc.Ts = {1.0, 2.0};
  sc.n_modes = 48;
  sc.analyses = {"observability"};
  // C0 = T^{-1/2} for the whole-domain observation of the pure heat flow
  sc.predictions.push_back({"gramian_log_C0", "abs", -0.5 * std::log(1.0), 1e-6});
  return sc;
}

Scenario harmonic() {
  Scenario sc;
  sc.name = "harmonic";
  sc.geometry.kind = DomainCase::Interval;
  sc.geometry.has_range = true;
  sc.geometry.s_lo = -20.0;
  sc.geometry.s_hi = 20.0;
  sc.geometry.L = 40.0;
  sc.geometry.grid_n = 4001;
  sc.f_text = "s^2/2";
  sc.q_text = "0.5";  // cancels (Laplace f)/2 so the potential is exactly s^2/4
  sc.c = 0.0;
  sc.omega_intervals = {10.0, 20.0};
  sc.epsilons = {0.05};
  sc.Ts = {1.0};
  sc.analyses = {"agmon", "spectral"};
  for (int j = 0; j < 5; ++j)
    sc.predictions.push_back({"mu_" + std::to_string(j), "abs", 0.05 * (j + 0.5), 1e-4});
  return sc;
}

Scenario edge_well() {
  Scenario sc;
  sc.name = "edge_well";
  sc.geometry.kind = DomainCase::Cylinder;
  sc.geometry.L = 1.0;
  sc.geometry.R_text = "1 + s";
  sc.geometry.grid_n = 2048;
  sc.f_text = "0";
  sc.c = 1.0;
  sc.omega_intervals = {0.0, 0.2};
  sc.ks = {10, 14, 20, 28, 40, 57, 80};
  sc.Ts = {1.0};
  sc.analyses = {"agmon", "spectral"};
  // boundary-edge well: the spectral gap above V_min scales like k^{-2/3}
  sc.predictions.push_back({"V_min", "abs", 0.25, 1e-10});
  sc.predictions.push_back({"gap_exponent", "ge", 0.55, 0.0});
  sc.predictions.push_back({"gap_exponent", "le", 0.85, 0.0});
  return sc;
}

}  // namespace

Scenario named_scenario(const std::string& name,
                        const std::map<std::string, double>& params) {
  if (name == "flambda" || name == "flambda4")
    return flambda(get(params, "lambda", 4.0), static_cast<int>(get(params, "dim", 1)));
  if (name == "flambda2") return flambda(2.0, 1);
  if (name == "flambda8") return flambda(8.0, 1);
  if (name == "flambda4_2d") return flambda(4.0, 2);
  if (name == "sphere_caps")
    return sphere_caps(get(params, "delta", 0.05), get(params, "c", 1.0));
  if (name == "torus_profile") return torus_profile(get(params, "delta", 0.05));
  if (name == "cylinder_profile")
    return cylinder_profile(get(params, "delta", 0.2), get(params, "gamma", 3.0));
  if (name == "whole_circle") return whole_circle();
  if (name == "harmonic") return harmonic();
  if (name == "edge_well") return edge_well();
  throw std::invalid_argument("unknown builtin scenario '" + name + "'");
}

std::vector<std::string> builtin_scenario_names() {
  return {"sphere_caps", "flambda2",     "flambda4",        "flambda8",
          "flambda4_2d", "torus_profile", "cylinder_profile", "whole_circle",
          "harmonic",    "edge_well"};
}

}  // namespace viscobs
