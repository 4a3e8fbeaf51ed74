#include "viscobs/observability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <lapacke.h>

#include "viscobs/numerics.hpp"
#include "viscobs/parallel.hpp"

namespace viscobs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log of int_0^T e^{-mu_sum t / eps} dt
double log_time_integral(double mu_sum, double T, double eps) {
  if (mu_sum == 0.0) return std::log(T);
  double a = mu_sum * T / eps;
  // eps/mu_sum * (1 - e^{-a}); stable for both signs of a
  if (a > 0) {
    double one_minus = a > 1e-8 ? 1.0 - std::exp(-a) : a * (1.0 - 0.5 * a);
    return std::log(eps / mu_sum) + std::log(one_minus);
  }
  // growing integrand: eps/|mu| (e^{|a|} - 1)
  double abs_a = -a;
  return std::log(eps / -mu_sum) + abs_a + std::log1p(-std::exp(-abs_a));
}

}  // namespace

RateReport theoretical_rate(const AgmonField& W, const PotentialField& pot,
                            const Region1D& omega, double T, RateMode mode) {
  if (!W.has_W) throw std::invalid_argument("theoretical_rate: weight W not filled");
  RateReport rep;
  if (mode == RateMode::Revolution || mode == RateMode::Boundary) {
    if (!pot.unique_min)
      throw std::invalid_argument("revolution rate requires a unique potential minimum");
    rep.W_omega = W.W_min_over(omega);
    rep.W_ref = W.W_min;
    rep.E0 = pot.V_min;
    rep.rate = rep.W_omega - rep.W_ref - rep.E0 * T;
    rep.t_unif_lower = rep.E0 > 0 ? (rep.W_omega - rep.W_ref) / rep.E0 : kInf;
    return rep;
  }
  // General bound: min over omega of W_E minus max over K_E of W_E minus E T.
  rep.W_omega = W.W_min_over(omega);
  double wmax = -kInf;
  for (std::size_t i = 0; i < W.grid.size(); ++i)
    if (W.allowed[i]) wmax = std::max(wmax, W.W[i]);
  rep.W_ref = wmax;
  rep.E0 = W.E;
  rep.rate = rep.W_omega - rep.W_ref - rep.E0 * T;
  double gap = rep.W_omega - rep.W_ref;
  if (rep.E0 > 1e-14) {
    rep.t_unif_lower = std::max(0.0, gap) / rep.E0;
  } else {
    // E0 = 0: if omega misses the allowed region the cost blows up for every
    // horizon and no uniform time exists.
    double dmin = kInf;
    for (std::size_t i = 0; i < W.grid.size(); ++i)
      if (omega.contains(W.grid[i])) dmin = std::min(dmin, W.d_A[i]);
    for (const auto& iv : omega.intervals)
      for (double s : {iv.first, iv.second})
        if (s >= W.s_lo && s <= W.s_hi) dmin = std::min(dmin, W.dA_at(s));
    rep.never_observable = dmin > 1e-12;
    rep.t_unif_lower = rep.never_observable ? kInf : 0.0;
  }
  return rep;
}

WitnessCost witness_cost(const EigenPair& pair, const DiscreteOperator& op,
                         const Profile& f, const Region1D& omega, double T,
                         ObsTarget target) {
  if (T <= 0) throw std::invalid_argument("witness_cost: T must be positive");
  WitnessCost out;
  const int n = op.n();
  const double eps = pair.eps;

  // log of the weighted L2 norms ||e^{-f/2eps} phi|| over M and over omega
  std::vector<double> terms_M, terms_omega;
  terms_M.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (pair.phi[i] == 0.0) continue;
    double t = 2.0 * std::log(std::abs(pair.phi[i])) - f.f(op.grid[i]) / eps +
               std::log(op.mass[i]);
    terms_M.push_back(t);
    if (omega.contains(op.grid[i])) terms_omega.push_back(t);
  }
  double log_norm_M2 = log_sum_exp(terms_M);
  double log_norm_omega2 = log_sum_exp(terms_omega);
  out.omega_mass = std::exp(0.5 * log_norm_omega2);

  double log_numer, log_obs_space;
  if (target == ObsTarget::Interior) {
    log_numer = -pair.mu * T / eps + 0.5 * log_norm_M2;
    log_obs_space = 0.5 * log_norm_omega2;
    if (terms_omega.empty() || !std::isfinite(log_norm_omega2)) {
      out.infinite = true;
      out.log_C0 = kInf;
      return out;
    }
  } else {
    if (!op.dirichlet_lo && !op.dirichlet_hi)
      throw std::invalid_argument("boundary witness requires a Dirichlet boundary");
    // numerator: H^1_0 norm of u(T) = e^{-muT/eps} e^{-f/2eps} phi
    double C = -kInf;
    std::vector<double> logw(n, -kInf);
    for (int i = 0; i < n; ++i) {
      if (pair.phi[i] == 0.0) continue;
      logw[i] = std::log(std::abs(pair.phi[i])) - 0.5 * f.f(op.grid[i]) / eps;
      C = std::max(C, logw[i]);
    }
    std::vector<double> w(n, 0.0);
    for (int i = 0; i < n; ++i)
      if (std::isfinite(logw[i]))
        w[i] = std::copysign(std::exp(logw[i] - C), pair.phi[i]);
    double grad2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double d;
      if (i == 0)
        d = (w[1] - w[0]) / op.dx;
      else if (i == n - 1)
        d = (w[n - 1] - w[n - 2]) / op.dx;
      else
        d = (w[i + 1] - w[i - 1]) / (2.0 * op.dx);
      grad2 += d * d * op.mass[i];
    }
    log_numer = -pair.mu * T / eps + 0.5 * std::log(grad2) + C;
    // observation: eps * |d_s phi| at the Dirichlet ends, H^{1/2}(S^1) weight
    auto flux = boundary_flux(pair, op);
    double best = 0.0;
    if (flux.has_lo)
      best += sq(flux.dphi_lo) * std::exp(-f.f(op.s_lo) / eps);
    if (flux.has_hi)
      best += sq(flux.dphi_hi) * std::exp(-f.f(op.s_hi) / eps);
    if (best <= 0) {
      out.infinite = true;
      out.log_C0 = kInf;
      return out;
    }
    log_obs_space = std::log(eps * flux.h12_weight) + 0.5 * std::log(best);
  }

  double log_time = log_time_integral(2.0 * pair.mu, T, eps);
  out.log_C0 = log_numer - (0.5 * log_time + log_obs_space);
  return out;
}

// ---------------------------------------------------------------------------
// Gramian

GramianCost gramian_cost(const DiscreteOperator& op, const Profile& f,
                         const Region1D& omega, double T, int n_modes) {
  if (n_modes < 1 || n_modes > op.n())
    throw std::invalid_argument("gramian_cost: n_modes out of range");
  GramianCost out;
  auto modes = lowest_eigenpairs(op, n_modes);
  const int n = op.n();
  const int m = n_modes;
  const double eps = op.eps;

  // weighted mass entries with the common scale factored out (it cancels in
  // the generalized eigenvalue)
  double F = -kInf;
  for (int i = 0; i < n; ++i) F = std::max(F, -f.f(op.grid[i]) / eps);
  std::vector<double> w(n), w_omega(n, 0.0);
  for (int i = 0; i < n; ++i) {
    w[i] = std::exp(-f.f(op.grid[i]) / eps - F) * op.mass[i];
    if (omega.contains(op.grid[i])) w_omega[i] = w[i];
  }

  std::vector<double> SM(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<double> SO(static_cast<std::size_t>(m) * m, 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      double sm = 0, so = 0;
      const auto& pa = modes[a].phi;
      const auto& pb = modes[b].phi;
      for (int i = 0; i < n; ++i) {
        double p = pa[i] * pb[i];
        sm += p * w[i];
        so += p * w_omega[i];
      }
      SM[static_cast<std::size_t>(a) * m + b] = SM[static_cast<std::size_t>(b) * m + a] = sm;
      SO[static_cast<std::size_t>(a) * m + b] = SO[static_cast<std::size_t>(b) * m + a] = so;
    }

  std::vector<double> A(static_cast<std::size_t>(m) * m),
      G(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double mu_sum = modes[a].mu + modes[b].mu;
      std::size_t id = static_cast<std::size_t>(a) * m + b;
      A[id] = std::exp(-mu_sum * T / eps) * SM[id];
      G[id] = SO[id] * std::exp(log_time_integral(mu_sum, T, eps));
    }

  // diagonal prescaling: unit diagonal on G
  double gmin = kInf, gmax = 0.0;
  std::vector<double> D(m);
  for (int a = 0; a < m; ++a) {
    double g = G[static_cast<std::size_t>(a) * m + a];
    if (g <= 0 || !std::isfinite(g)) {
      out.refused = true;
      out.cond_estimate = kInf;
      return out;
    }
    gmin = std::min(gmin, g);
    gmax = std::max(gmax, g);
    D[a] = 1.0 / std::sqrt(g);
  }
  out.cond_estimate = gmax / gmin;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      std::size_t id = static_cast<std::size_t>(a) * m + b;
      A[id] *= D[a] * D[b];
      G[id] *= D[a] * D[b];
    }

  std::vector<double> eig(m);
  int info = LAPACKE_dsygv(LAPACK_ROW_MAJOR, 1, 'N', 'L', m, A.data(), m, G.data(), m,
                           eig.data());
  if (info != 0) {
    out.refused = true;
    return out;
  }
  double top = eig[m - 1];
  if (!(top > 0) || !std::isfinite(top)) {
    out.refused = true;
    return out;
  }
  out.log_C0 = 0.5 * std::log(top);
  return out;
}

GramianCost gramian_cost_rotational(const SurfaceSpec& spec, const Profile& f,
                                    const ScalarExpr& q, const Region1D& omega,
                                    double T, double eps, int k_max, int n_modes,
                                    bool include_qf) {
  std::vector<GramianCost> per_k(static_cast<std::size_t>(k_max) + 1);
  parallel_for(static_cast<std::ptrdiff_t>(k_max) + 1, [&](std::ptrdiff_t k) {
    auto op = assemble_operator(spec, f, q, eps, static_cast<int>(k), include_qf);
    per_k[static_cast<std::size_t>(k)] =
        gramian_cost(op, f, omega, T, std::min(n_modes, op.n()));
  });
  GramianCost best;
  bool any = false;
  for (const auto& g : per_k) {
    if (g.refused) {
      best.refused = true;
      best.cond_estimate = std::max(best.cond_estimate, g.cond_estimate);
      continue;
    }
    if (!any || g.log_C0 > best.log_C0) {
      double cond = std::max(best.cond_estimate, g.cond_estimate);
      bool refused = best.refused;
      best = g;
      best.cond_estimate = cond;
      best.refused = refused;
      any = true;
    }
  }
  if (!any) best.refused = true;
  return best;
}

// ---------------------------------------------------------------------------

SweepFit slope_sweep(std::span<const double> eps_list,
                     const std::function<std::optional<double>(double)>& log_cost,
                     double theory_rate, double delta_fit) {
  if (eps_list.size() < 4)
    throw std::invalid_argument("slope_sweep: need at least 4 viscosities");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("slope_sweep: eps list must decrease");
  SweepFit fit;
  fit.points.resize(eps_list.size());
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    fit.points[i].eps = eps_list[i];
    auto v = log_cost(eps_list[i]);
    if (v.has_value() && std::isfinite(*v)) {
      fit.points[i].log_C0 = *v;
      fit.points[i].ok = true;
    } else {
      fit.partial = true;
    }
  }
  // constant-model fit of eps*log C0, discarding the largest eps
  std::vector<double> ys;
  for (std::size_t i = 1; i < fit.points.size(); ++i)
    if (fit.points[i].ok) ys.push_back(fit.points[i].eps * fit.points[i].log_C0);
  if (ys.empty()) {
    fit.partial = true;
    return fit;
  }
  double mean = 0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(ys.size());
  double var = 0;
  for (double y : ys) var += sq(y - mean);
  fit.rate = mean;
  fit.residual = std::sqrt(var / static_cast<double>(ys.size()));
  fit.pass = fit.rate >= theory_rate - delta_fit;
  return fit;
}

TBracket t_unif_bracket(std::span<const double> T_grid,
                        const std::function<std::optional<double>(double)>& fitted_rate,
                        double delta_fit) {
  for (std::size_t i = 1; i < T_grid.size(); ++i)
    if (!(T_grid[i] > T_grid[i - 1]))
      throw std::invalid_argument("t_unif_bracket: T grid must increase");
  TBracket br;
  for (double T : T_grid) {
    auto r = fitted_rate(T);
    if (!r.has_value()) continue;
    br.rates.push_back({T, *r});
    if (*r > delta_fit) {
      br.T_lo = T;
      br.has_lo = true;
    }
    if (*r < delta_fit && !br.has_hi) {
      br.T_hi = T;
      br.has_hi = true;
    }
  }
  return br;
}

}  // namespace viscobs
