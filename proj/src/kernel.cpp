#include "viscobs/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "viscobs/flow.hpp"
#include "viscobs/numerics.hpp"
#include "viscobs/parallel.hpp"

namespace viscobs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PathDomain PathDomain::from(const SurfaceSpec& spec) {
  if (!spec.is_1d()) throw std::invalid_argument("PathDomain: 1D domains only");
  PathDomain d;
  d.periodic = spec.periodic;
  d.lo = spec.s_lo;
  d.hi = spec.s_hi;
  return d;
}

double PathDomain::wrap(double s) const {
  if (!periodic) return s;
  double L = period();
  double t = std::fmod(s - lo, L);
  if (t < 0) t += L;
  return lo + t;
}

double PathDomain::dist(double a, double b) const {
  double d = std::abs(a - b);
  if (!periodic) return d;
  double L = period();
  d = std::fmod(d, L);
  return std::min(d, L - d);
}

// ---------------------------------------------------------------------------
// Discrete path action

namespace {

struct ActionFunctional {
  const PathDomain& dom;
  const Profile& f;
  ActionForm form;
  double dt;

  double fp(double s) const { return f.fp(dom.wrap(s)); }
  double fpp(double s) const { return f.fpp(dom.wrap(s)); }

  // integrand psi(p, v) and derivatives
  double psi(double p, double v) const {
    switch (form) {
      case ActionForm::Rho: {
        double g = fp(p);
        return 0.25 * v * v + 0.25 * g * g;
      }
      case ActionForm::DXMinus: {
        double w = v - fp(p);
        return 0.25 * w * w;
      }
      case ActionForm::DXPlus: {
        double w = v + fp(p);
        return 0.25 * w * w;
      }
    }
    return 0;
  }
  double psi_v(double p, double v) const {
    switch (form) {
      case ActionForm::Rho: return 0.5 * v;
      case ActionForm::DXMinus: return 0.5 * (v - fp(p));
      case ActionForm::DXPlus: return 0.5 * (v + fp(p));
    }
    return 0;
  }
  double psi_p(double p, double v) const {
    switch (form) {
      case ActionForm::Rho: return 0.5 * fp(p) * fpp(p);
      case ActionForm::DXMinus: return -0.5 * (v - fp(p)) * fpp(p);
      case ActionForm::DXPlus: return 0.5 * (v + fp(p)) * fpp(p);
    }
    return 0;
  }

  double value(std::span<const double> path) const {
    double acc = 0;
    for (std::size_t j = 0; j + 1 < path.size(); ++j) {
      double v = (path[j + 1] - path[j]) / dt;
      acc += 0.5 * dt * (psi(path[j], v) + psi(path[j + 1], v));
    }
    return acc;
  }

  void gradient(std::span<const double> path, std::span<double> grad) const {
    std::size_t m = path.size() - 1;
    for (std::size_t i = 1; i < m; ++i) grad[i - 1] = 0;
    for (std::size_t j = 0; j < m; ++j) {
      double v = (path[j + 1] - path[j]) / dt;
      double a_v = psi_v(path[j], v) + psi_v(path[j + 1], v);  // d/dv of both halves
      double gl = 0.5 * dt * psi_p(path[j], v) - 0.5 * a_v;
      double gr = 0.5 * dt * psi_p(path[j + 1], v) + 0.5 * a_v;
      if (j >= 1) grad[j - 1] += gl;
      if (j + 1 <= m - 1) grad[j] += gr;
    }
  }
};

// Solves (kappa * tridiag(-1, 2, -1) + reg I) d = g in place (Thomas).
void precondition(std::vector<double>& g, double kappa, double reg) {
  std::size_t n = g.size();
  if (n == 0) return;
  std::vector<double> c(n, -kappa), d(n, 2 * kappa + reg);
  std::vector<double> cp(n), dp(n);
  cp[0] = c[0] / d[0];
  dp[0] = g[0] / d[0];
  for (std::size_t i = 1; i < n; ++i) {
    double m = d[i] - c[i - 1] * cp[i - 1];
    cp[i] = c[i] / m;
    dp[i] = (g[i] - c[i - 1] * dp[i - 1]) / m;
  }
  g[n - 1] = dp[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) g[i] = dp[i] - cp[i] * g[i + 1];
}

struct OptimOutcome {
  double value = kInf;
  std::vector<double> path;
  bool converged = false;
  int iterations = 0;
};

OptimOutcome optimize_path(const ActionFunctional& F, std::vector<double> path,
                           int max_iter) {
  OptimOutcome out;
  std::size_t m = path.size() - 1;
  std::vector<double> grad(m >= 1 ? m - 1 : 0);
  double val = F.value(path);
  int stable = 0;
  double kappa = 1.0 / (2.0 * F.dt);
  int it = 0;
  for (; it < max_iter && m >= 2; ++it) {
    F.gradient(path, grad);
    std::vector<double> dir = grad;
    precondition(dir, kappa, 1e-12);
    double gd = 0;
    for (std::size_t i = 0; i + 1 < m; ++i) gd += grad[i] * dir[i];
    if (gd <= 0) break;
    double step = 1.0;
    std::vector<double> trial = path;
    double new_val = val;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t i = 1; i < m; ++i) trial[i] = path[i] - step * dir[i - 1];
      new_val = F.value(trial);
      if (new_val <= val - 1e-4 * step * gd) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
    double drop = val - new_val;
    path.swap(trial);
    val = new_val;
    stable = drop < 1e-10 ? stable + 1 : 0;
    if (stable >= 5) {
      out.converged = true;
      break;
    }
  }
  if (m < 2) out.converged = true;
  out.value = val;
  out.path = std::move(path);
  out.iterations = it;
  return out;
}

std::vector<double> straight_path(double x, double y, int m) {
  std::vector<double> p(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) p[j] = x + (y - x) * j / m;
  return p;
}

// forward (sign=+1) or backward (sign=-1) flow path from x over [0, t],
// sampled uniformly and sheared to end at y.
std::vector<double> flow_path(const PathDomain& dom, const Profile& f, double x, double y,
                              double t, int m, double sign) {
  std::vector<double> p(static_cast<std::size_t>(m) + 1);
  p[0] = x;
  double s = x;
  double dt = t / m;
  for (int j = 1; j <= m; ++j) {
    // a few RK4 substeps per segment
    const int sub = 4;
    double h = dt / sub;
    for (int q = 0; q < sub; ++q) {
      auto rhs = [&](double z) { return sign * f.fp(dom.wrap(z)); };
      double k1 = rhs(s);
      double k2 = rhs(s + 0.5 * h * k1);
      double k3 = rhs(s + 0.5 * h * k2);
      double k4 = rhs(s + h * k3);
      s += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    p[j] = s;
  }
  double miss = y - p[m];
  for (int j = 0; j <= m; ++j) p[j] += miss * j / m;
  return p;
}

}  // namespace

ActionResult action_distance(const PathDomain& dom, const Profile& f, double x, double y,
                             double t, ActionForm form, int m) {
  if (t <= 0) throw std::invalid_argument("action_distance: t must be positive");
  if (m < 16) throw std::invalid_argument("action_distance: need m >= 16 segments");
  ActionResult res;
  res.x = x;
  res.y = y;
  res.t = t;
  res.form = form;

  std::vector<double> lifts{y};
  if (dom.periodic) {
    lifts.push_back(y + dom.period());
    lifts.push_back(y - dom.period());
  }
  ActionFunctional F{dom, f, form, t / m};
  OptimOutcome best;
  for (double ylift : lifts) {
    std::vector<std::vector<double>> inits;
    inits.push_back(straight_path(x, ylift, m));
    inits.push_back(flow_path(dom, f, x, ylift, t, m, +1.0));
    inits.push_back(flow_path(dom, f, x, ylift, t, m, -1.0));
    for (auto& init : inits) {
      auto o = optimize_path(F, std::move(init), 4000);
      if (o.value < best.value) best = std::move(o);
    }
  }
  res.value = best.value;
  res.path = std::move(best.path);
  res.converged = best.converged;
  res.iterations = best.iterations;
  return res;
}

// ---------------------------------------------------------------------------
// Hopf-Lax / Bellman table

HopfLaxTable hopf_lax_table(const PathDomain& dom, const Profile& f,
                            std::span<const double> grid, double t, int m) {
  if (m < 8) throw std::invalid_argument("hopf_lax_table: need m >= 8 slices");
  if (t <= 0) throw std::invalid_argument("hopf_lax_table: t must be positive");
  HopfLaxTable tab;
  tab.grid.assign(grid.begin(), grid.end());
  tab.slices = m;
  tab.t_total = t;
  tab.dt = t / m;
  tab.periodic = dom.periodic;
  tab.period = dom.period();
  const std::size_t N = grid.size();
  if (tab.dt <= 0 || !std::isfinite(tab.dt)) throw std::invalid_argument("dt underflow");

  std::vector<double> gradsq(N);
  for (std::size_t i = 0; i < N; ++i) gradsq[i] = sq(f.fp(dom.wrap(grid[i])));

  auto local = [&](std::size_t i, std::size_t j) {
    double d = dom.dist(grid[i], grid[j]);
    return d * d / (4.0 * tab.dt) + tab.dt / 8.0 * (gradsq[i] + gradsq[j]);
  };

  std::vector<double> one(N * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) one[i * N + j] = local(i, j);

  tab.tables.reserve(m);
  tab.tables.push_back(one);
  for (int r = 1; r < m; ++r) {
    const auto& prev = tab.tables.back();
    std::vector<double> next(N * N, kInf);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        double bestv = kInf;
        for (std::size_t kk = 0; kk < N; ++kk) {
          double cand = prev[i * N + kk] + one[kk * N + j];
          if (cand < bestv) bestv = cand;  // ties keep the smaller index
        }
        next[i * N + j] = bestv;
      }
    tab.tables.push_back(std::move(next));
  }
  return tab;
}

ReparamReport reparametrization_check(const PathDomain& dom, const Profile& f, double x,
                                      double y, int samples) {
  ReparamReport rep;
  // d3: length form on the straight path (exact in 1D)
  auto sqrtV = [&](double s) { return 0.5 * std::abs(f.fp(dom.wrap(s))); };
  double direct = std::abs(adaptive_simpson(sqrtV, std::min(x, y), std::max(x, y), 1e-10));
  if (dom.periodic) {
    double other = adaptive_simpson(sqrtV, dom.lo, dom.hi, 1e-10) - direct;
    direct = std::min(direct, std::abs(other));
  }
  rep.d3 = direct;

  // d1 and d2: minimize over time horizons on a log grid
  rep.d1 = kInf;
  rep.d2 = kInf;
  for (int q = 0; q < samples; ++q) {
    double t = 1e-2 * std::pow(1e4, static_cast<double>(q) / (samples - 1));
    auto r = action_distance(dom, f, x, y, t, ActionForm::Rho, 96);
    rep.d1 = std::min(rep.d1, r.value);
    // length form along the energy-optimal path (parametrization free)
    double len = 0;
    for (std::size_t j = 0; j + 1 < r.path.size(); ++j) {
      double mid = 0.5 * (r.path[j] + r.path[j + 1]);
      len += std::abs(r.path[j + 1] - r.path[j]) * sqrtV(mid);
    }
    rep.d2 = std::min(rep.d2, len);
  }
  double scale = std::max({std::abs(rep.d1), std::abs(rep.d2), std::abs(rep.d3), 1e-12});
  rep.max_rel_gap = (std::max({rep.d1, rep.d2, rep.d3}) - std::min({rep.d1, rep.d2, rep.d3})) /
                    scale;
  return rep;
}

SupInfResult dx_sup_inf(const PathDomain& dom, const Profile& f,
                        std::span<const double> y_grid, const Region1D& omega, double T,
                        int slices) {
  HopfLaxTable tab = hopf_lax_table(dom, f, y_grid, T, slices);
  const std::size_t N = y_grid.size();
  std::vector<char> in_omega(N);
  for (std::size_t i = 0; i < N; ++i) in_omega[i] = omega.contains(y_grid[i]);
  std::vector<double> fvals(N);
  for (std::size_t i = 0; i < N; ++i) fvals[i] = f.f(dom.wrap(y_grid[i]));

  std::vector<double> inner(N, kInf);
  parallel_for(static_cast<std::ptrdiff_t>(N), [&](std::ptrdiff_t jj) {
    std::size_t j = static_cast<std::size_t>(jj);  // y index
    double best = kInf;
    for (std::size_t i = 0; i < N; ++i) {
      if (!in_omega[i]) continue;
      double shift = 0.5 * (fvals[i] - fvals[j]);
      for (int r = 1; r <= tab.slices; ++r) {
        double d = tab.rho(static_cast<int>(i), static_cast<int>(j), r) + shift;
        if (d < best) best = d;
      }
    }
    inner[j] = best;
  });
  SupInfResult res;
  res.value = -kInf;
  for (std::size_t j = 0; j < N; ++j)
    if (inner[j] > res.value) {
      res.value = inner[j];
      res.argmax_y = y_grid[j];
    }
  return res;
}

// ---------------------------------------------------------------------------
// Kernel evolution

KernelEvolver::KernelEvolver(DiscreteOperator op, const Profile& f, int n_modes)
    : op_(std::move(op)), f_(f) {
  int keep = n_modes > 0 ? std::min(n_modes, op_.n()) : op_.n();
  auto pairs = lowest_eigenpairs(op_, keep);
  lambda_.resize(pairs.size());
  psi_.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    lambda_[i] = pairs[i].mu;
    psi_[i] = std::move(pairs[i].phi);
  }
  f_grid_.resize(op_.grid.size());
  for (std::size_t i = 0; i < op_.grid.size(); ++i) f_grid_[i] = f.f(op_.grid[i]);
}

std::vector<double> KernelEvolver::coeffs(std::span<const double> u0) const {
  const int n = op_.n();
  // v0 = e^{f/2eps} u0; c_m = <psi_m, v0>_M
  std::vector<double> v0(n);
  for (int i = 0; i < n; ++i)
    v0[i] = u0[i] * std::exp(f_grid_[i] / (2.0 * op_.eps));
  std::vector<double> c(lambda_.size());
  for (std::size_t m = 0; m < lambda_.size(); ++m) {
    double acc = 0;
    for (int i = 0; i < n; ++i) acc += psi_[m][i] * v0[i] * op_.mass[i];
    c[m] = acc;
  }
  return c;
}

std::vector<double> KernelEvolver::evolve(std::span<const double> u0, double t) const {
  const int n = op_.n();
  std::vector<double> c = coeffs(u0);
  std::vector<double> v(n, 0.0);
  for (std::size_t m = 0; m < lambda_.size(); ++m) {
    double amp = c[m] * std::exp(-lambda_[m] * t / op_.eps);
    if (amp == 0.0) continue;
    for (int i = 0; i < n; ++i) v[i] += amp * psi_[m][i];
  }
  for (int i = 0; i < n; ++i) v[i] *= std::exp(-f_grid_[i] / (2.0 * op_.eps));
  return v;
}

KernelField KernelEvolver::column(double y, double t, double mollifier_cells) const {
  if (t <= 0) throw std::invalid_argument("kernel column: t must be positive");
  if (mollifier_cells < 2.0)
    throw std::invalid_argument("mollifier width must span at least 2 cells");
  const int n = op_.n();
  const double width = mollifier_cells * op_.dx;
  std::vector<double> u0(n);
  double mass = 0;
  for (int i = 0; i < n; ++i) {
    double d = op_.periodic ? std::min(std::abs(op_.grid[i] - y),
                                       (op_.s_hi - op_.s_lo) - std::abs(op_.grid[i] - y))
                            : std::abs(op_.grid[i] - y);
    u0[i] = std::exp(-0.5 * sq(d / width));
    mass += u0[i] * op_.mass[i];
  }
  for (int i = 0; i < n; ++i) u0[i] /= mass;  // unit mass in the volume weights

  KernelField field;
  field.y = y;
  field.t = t;
  field.eps = op_.eps;
  field.values = evolve(u0, t);
  for (int i = 0; i < n; ++i) {
    double& v = field.values[i];
    if (v < 0) {
      if (v < -1e-12) {
        field.negative_mass += -v * op_.mass[i];
        ++field.clamped;
      }
      v = 0;
    }
    field.mass += v * op_.mass[i];
  }
  field.excessive_negativity = field.negative_mass > 1e-8;
  return field;
}

double KernelEvolver::value_at(const KernelField& field, double x) const {
  // nearest-node sample
  const auto& g = op_.grid;
  auto it = std::lower_bound(g.begin(), g.end(), x);
  std::size_t i = it == g.begin() ? 0 : static_cast<std::size_t>(it - g.begin()) - 1;
  std::size_t j = std::min(i + 1, g.size() - 1);
  return std::abs(g[i] - x) <= std::abs(g[j] - x) ? field.values[i] : field.values[j];
}

double KernelEvolver::positive_family_log_cost(const Region1D& omega, double T,
                                               double warmup, int n_sources,
                                               double mollifier_cells) const {
  const int n = op_.n();
  const std::size_t M = lambda_.size();
  const double eps = op_.eps;

  // weighted overlap matrices with the common exp scale dropped
  double F = -kInf;
  for (int i = 0; i < n; ++i) F = std::max(F, -f_grid_[i] / eps);
  std::vector<double> w(n), w_omega(n, 0.0);
  for (int i = 0; i < n; ++i) {
    w[i] = std::exp(-f_grid_[i] / eps - F) * op_.mass[i];
    if (omega.contains(op_.grid[i])) w_omega[i] = w[i];
  }
  std::vector<double> A(M * M), G(M * M);
  for (std::size_t a = 0; a < M; ++a)
    for (std::size_t b = a; b < M; ++b) {
      double sm = 0, so = 0;
      for (int i = 0; i < n; ++i) {
        double p = psi_[a][i] * psi_[b][i];
        sm += p * w[i];
        so += p * w_omega[i];
      }
      double mu_sum = lambda_[a] + lambda_[b];
      double va = std::exp(-mu_sum * T / eps) * sm;
      double ti = mu_sum == 0.0
                      ? T
                      : eps / mu_sum * (1.0 - std::exp(-mu_sum * T / eps));
      A[a * M + b] = A[b * M + a] = va;
      G[a * M + b] = G[b * M + a] = so * ti;
    }

  double best = -kInf;
  std::vector<double> logs(static_cast<std::size_t>(n_sources), -kInf);
  parallel_for(n_sources, [&](std::ptrdiff_t qi) {
    double y = op_.grid.front() +
               (op_.grid.back() - op_.grid.front()) *
                   (static_cast<double>(qi) + 0.5) / n_sources;
    const double width = mollifier_cells * op_.dx;
    std::vector<double> u0(n);
    double mass = 0;
    for (int i = 0; i < n; ++i) {
      double d = op_.periodic
                     ? std::min(std::abs(op_.grid[i] - y),
                                (op_.s_hi - op_.s_lo) - std::abs(op_.grid[i] - y))
                     : std::abs(op_.grid[i] - y);
      u0[i] = std::exp(-0.5 * sq(d / width));
      mass += u0[i] * op_.mass[i];
    }
    for (int i = 0; i < n; ++i) u0[i] /= mass;
    std::vector<double> c = coeffs(u0);
    for (std::size_t m = 0; m < M; ++m) c[m] *= std::exp(-lambda_[m] * warmup / eps);
    double num = 0, den = 0;
    for (std::size_t a = 0; a < M; ++a) {
      double ca = c[a];
      if (ca == 0) continue;
      for (std::size_t b = 0; b < M; ++b) {
        num += ca * c[b] * A[a * M + b];
        den += ca * c[b] * G[a * M + b];
      }
    }
    if (num > 0 && den > 0)
      logs[static_cast<std::size_t>(qi)] = 0.5 * (std::log(num) - std::log(den));
  });
  for (double v : logs) best = std::max(best, v);
  return best;
}

// ---------------------------------------------------------------------------

LiYauReport liyau_check(const std::function<KernelEvolver(double)>& make_evolver,
                        const PathDomain& dom, const Profile& f,
                        std::span<const std::array<double, 3>> pairs,
                        std::span<const double> eps_list, double tol) {
  if (eps_list.size() < 4)
    throw std::invalid_argument("liyau_check: need at least 4 viscosities");
  LiYauReport rep;
  std::vector<KernelEvolver> evs;
  evs.reserve(eps_list.size());
  for (double eps : eps_list) evs.push_back(make_evolver(eps));

  rep.pass = true;
  for (const auto& p : pairs) {
    LiYauPair out;
    out.x = p[0];
    out.y = p[1];
    out.t = p[2];
    std::vector<double> ys;
    for (std::size_t q = 0; q < eps_list.size(); ++q) {
      auto field = evs[q].column(out.y, out.t);
      double K = evs[q].value_at(field, out.x);
      if (K <= 0 || !std::isfinite(std::log(K))) continue;
      ys.push_back(-eps_list[q] * std::log(K));
    }
    if (ys.size() < 3) {
      out.skipped = true;
      rep.pairs.push_back(out);
      continue;
    }
    // constant-model fit, discarding the largest viscosity
    double mean = 0;
    for (std::size_t q = 1; q < ys.size(); ++q) mean += ys[q];
    mean /= static_cast<double>(ys.size() - 1);
    out.fitted = mean;
    out.expected =
        action_distance(dom, f, out.x, out.y, out.t, ActionForm::DXMinus, 192).value;
    out.ok = std::abs(out.fitted - out.expected) <= tol * (1.0 + out.expected);
    if (!out.ok) rep.pass = false;
    rep.pairs.push_back(out);
  }
  return rep;
}

L1ObsReport l1_kernel_observability(const KernelEvolver& evolver, const Region1D& omega,
                                    double T, double s, int n_sources, int n_times) {
  if (!(s > 0) || s > T) throw std::invalid_argument("need 0 < s <= T");
  const auto& op = evolver.op();
  const int n = op.n();
  L1ObsReport rep;
  rep.y_grid.resize(n_sources);
  rep.O_T.assign(n_sources, 0.0);
  rep.I_s.assign(n_sources, 0.0);

  // time nodes refined geometrically near 0
  std::vector<double> times(n_times);
  const double ratio = 0.7;
  for (int q = 0; q < n_times; ++q) times[q] = T * std::pow(ratio, n_times - 1 - q);

  std::vector<double> gronwall(static_cast<std::size_t>(n_sources), 0.0);
  parallel_for(n_sources, [&](std::ptrdiff_t qi) {
    double y = op.grid.front() + (op.grid.back() - op.grid.front()) *
                                     (static_cast<double>(qi) + 0.5) / n_sources;
    rep.y_grid[static_cast<std::size_t>(qi)] = y;
    std::vector<double> obs(times.size()), l1(times.size());
    for (std::size_t q = 0; q < times.size(); ++q) {
      auto field = evolver.column(y, times[q]);
      double o = 0, tot = 0;
      for (int i = 0; i < n; ++i) {
        double v = field.values[i] * op.mass[i];
        tot += v;
        if (omega.contains(op.grid[i])) o += v;
      }
      obs[q] = o;
      l1[q] = tot;
    }
    // trapezoid over [0, t_0] (kernel observation starts at 0) and the nodes
    double acc = 0.5 * times[0] * obs[0];
    for (std::size_t q = 0; q + 1 < times.size(); ++q)
      acc += 0.5 * (times[q + 1] - times[q]) * (obs[q] + obs[q + 1]);
    rep.O_T[static_cast<std::size_t>(qi)] = acc;
    auto field_s = evolver.column(y, s);
    double is = 0;
    for (int i = 0; i < n; ++i) is += field_s.values[i] * op.mass[i];
    rep.I_s[static_cast<std::size_t>(qi)] = is;
    double lT = l1.back();
    double worst = 0;
    for (double v : l1) worst = std::max(worst, v / lT);
    gronwall[static_cast<std::size_t>(qi)] = worst;
  });

  rep.C = 0;
  for (int q = 0; q < n_sources; ++q)
    rep.C = std::max(rep.C, rep.I_s[q] / std::max(rep.O_T[q], 1e-300));
  rep.eps_log_C = op.eps * std::log(std::max(rep.C, 1e-300));
  for (double g : gronwall) rep.gronwall_CT = std::max(rep.gronwall_CT, g);
  return rep;
}

}  // namespace viscobs
