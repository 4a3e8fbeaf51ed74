#include "viscobs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <lapacke.h>

#include "viscobs/numerics.hpp"

namespace viscobs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void lapack_fail(const char* routine, int info) {
  throw std::runtime_error(std::string(routine) + " failed with info = " +
                           std::to_string(info));
}

}  // namespace

void DiscreteOperator::apply_stiffness(std::span<const double> x,
                                       std::span<double> y) const {
  const int m = n();
  for (int i = 0; i < m; ++i) {
    double acc = diag[i] * x[i];
    if (i > 0) acc += off[i - 1] * x[i - 1];
    if (i + 1 < m) acc += off[i] * x[i + 1];
    y[i] = acc;
  }
  if (periodic && m > 2) {
    y[0] += corner * x[m - 1];
    y[m - 1] += corner * x[0];
  }
}

double DiscreteOperator::mass_norm(std::span<const double> x) const {
  double s = 0;
  for (int i = 0; i < n(); ++i) s += mass[i] * x[i] * x[i];
  return std::sqrt(s);
}

DiscreteOperator assemble_operator(const SurfaceSpec& spec, const Profile& f,
                                   const ScalarExpr& q, double eps, int k,
                                   bool include_qf) {
  if (!spec.is_1d()) throw std::invalid_argument("assemble_operator: 1D domains only");
  if (eps <= 0) throw std::invalid_argument("eps must be positive");
  if (k < 0) throw std::invalid_argument("mode index k must be nonnegative");
  if (k > 0 && !spec.is_revolution())
    throw std::invalid_argument("k > 0 requires a revolution geometry");

  DiscreteOperator op;
  op.eps = eps;
  op.k = k;
  op.grid = spec.grid;
  op.dx = spec.dx;
  op.periodic = spec.periodic;
  op.dirichlet_lo = spec.dirichlet_lo;
  op.dirichlet_hi = spec.dirichlet_hi;
  op.kind = spec.kind;
  op.s_lo = spec.s_lo;
  op.s_hi = spec.s_hi;

  const int n = spec.grid_n;
  op.diag.assign(n, 0.0);
  op.off.assign(n - 1, 0.0);
  op.mass.resize(n);
  op.Vk.resize(n);
  op.qf.resize(n);

  const double e2 = eps * eps;
  auto face_R = [&](double s) { return spec.radius(spec.wrap(s)); };

  for (int i = 0; i < n; ++i) {
    double s = spec.grid[i];
    double R = spec.radius(s);
    op.mass[i] = R * spec.dx;
    double fp = f.fp(s);
    double V = fp * fp / 4.0;
    if (k > 0) V += e2 * k * k / (R * R);
    op.Vk[i] = V;
    double qf = 0.0;
    if (include_qf) {
      // qf = (Laplace f)/2 - q with Laplace f = f'' + (R'/R) f'.
      double lap = f.fpp(s);
      if (spec.is_revolution()) lap += spec.radius_deriv(s) / R * fp;
      qf = 0.5 * lap - q(s);
    }
    op.qf[i] = qf;
    op.diag[i] = (V + eps * qf) * op.mass[i];
  }

  // Flux couplings through interior faces (energy form: eps^2 R u' v' ds).
  for (int i = 0; i + 1 < n; ++i) {
    double Rf = face_R(spec.s_lo + (i + 1) * spec.dx);
    double w = e2 * Rf / spec.dx;
    op.off[i] = -w;
    op.diag[i] += w;
    op.diag[i + 1] += w;
  }
  if (spec.periodic) {
    double Rf = face_R(spec.s_lo);
    double w = e2 * Rf / spec.dx;
    op.corner = -w;
    op.diag[0] += w;
    op.diag[n - 1] += w;
  } else {
    // Boundary faces: Dirichlet via the half-cell gradient; pole faces carry
    // R = 0 and vanish on their own.
    if (spec.dirichlet_lo) {
      double Rf = face_R(spec.s_lo);
      op.diag[0] += 2.0 * e2 * Rf / spec.dx;
    }
    if (spec.dirichlet_hi) {
      double Rf = face_R(spec.s_hi);
      op.diag[n - 1] += 2.0 * e2 * Rf / spec.dx;
    }
  }
  return op;
}

// ---------------------------------------------------------------------------
// Eigensolves.  The generalized problem K u = mu M u reduces by the diagonal
// mass square root to an ordinary symmetric one: T w = mu w with
// T = M^{-1/2} K M^{-1/2}, u = M^{-1/2} w.

namespace {

struct Reduced {
  std::vector<double> d, e;     // tridiagonal part
  double corner = 0.0;          // periodic corner of T
  std::vector<double> sqrt_m;
};

Reduced reduce(const DiscreteOperator& op) {
  Reduced r;
  const int n = op.n();
  r.d.resize(n);
  r.e.assign(std::max(n - 1, 0), 0.0);
  r.sqrt_m.resize(n);
  for (int i = 0; i < n; ++i) {
    if (op.mass[i] <= 0) throw std::runtime_error("nonpositive mass entry");
    r.sqrt_m[i] = std::sqrt(op.mass[i]);
  }
  for (int i = 0; i < n; ++i) r.d[i] = op.diag[i] / op.mass[i];
  for (int i = 0; i + 1 < n; ++i) r.e[i] = op.off[i] / (r.sqrt_m[i] * r.sqrt_m[i + 1]);
  if (op.periodic) r.corner = op.corner / (r.sqrt_m[0] * r.sqrt_m[n - 1]);
  return r;
}

std::vector<double> tridiag_eigenvalues(std::vector<double> d, std::vector<double> e) {
  int n = static_cast<int>(d.size());
  int info = LAPACKE_dsterf(n, d.data(), e.data());
  if (info != 0) lapack_fail("dsterf", info);
  return d;
}

// Eigenvalues of the dense symmetric matrix (row-major, n x n).
std::vector<double> dense_eigenvalues(std::vector<double> a, int n) {
  std::vector<double> w(n);
  int info = LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'N', 'L', n, a.data(), n, w.data());
  if (info != 0) lapack_fail("dsyev", info);
  return w;
}

std::vector<double> dense_matrix(const Reduced& r) {
  int n = static_cast<int>(r.d.size());
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * n + i] = r.d[i];
  for (int i = 0; i + 1 < n; ++i) {
    a[static_cast<std::size_t>(i) * n + i + 1] = r.e[i];
    a[static_cast<std::size_t>(i + 1) * n + i] = r.e[i];
  }
  if (r.corner != 0.0 && n > 2) {
    a[static_cast<std::size_t>(0) * n + (n - 1)] = r.corner;
    a[static_cast<std::size_t>(n - 1) * n + 0] = r.corner;
  }
  return a;
}

// Eigenpairs with 1-based index range [il, iu] of the reduced matrix.
// Returns eigenvalues and column-major eigenvectors (n x m).
void reduced_eigenpairs(const Reduced& r, int il, int iu, std::vector<double>& w,
                        std::vector<double>& z) {
  const int n = static_cast<int>(r.d.size());
  const int m = iu - il + 1;
  w.assign(n, 0.0);
  z.assign(static_cast<std::size_t>(n) * m, 0.0);
  if (r.corner == 0.0) {
    std::vector<double> d = r.d, e = r.e;
    e.resize(n, 0.0);
    std::vector<lapack_int> isuppz(2 * std::max(1, m));
    lapack_int found = 0;
    int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0, 0,
                              il, iu, 0.0, &found, w.data(), z.data(), n, isuppz.data());
    if (info != 0) lapack_fail("dstevr", info);
    if (found != m) throw std::runtime_error("dstevr returned fewer eigenpairs than asked");
  } else {
    if (n > 4096) throw std::invalid_argument("periodic eigensolve capped at n = 4096");
    std::vector<double> a = dense_matrix(r);
    std::vector<lapack_int> isuppz(2 * std::max(1, m));
    lapack_int found = 0;
    std::vector<double> zz(static_cast<std::size_t>(n) * m);
    int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0, 0, il,
                              iu, 0.0, &found, w.data(), zz.data(), n, isuppz.data());
    if (info != 0) lapack_fail("dsyevr", info);
    if (found != m) throw std::runtime_error("dsyevr returned fewer eigenpairs than asked");
    z = std::move(zz);
  }
  w.resize(m);
}

std::vector<EigenPair> make_pairs(const DiscreteOperator& op, const Reduced& r, int il,
                                  int iu) {
  std::vector<double> w, z;
  reduced_eigenpairs(r, il, iu, w, z);
  const int n = op.n();
  const int m = iu - il + 1;
  std::vector<EigenPair> out(m);
  for (int j = 0; j < m; ++j) {
    EigenPair& p = out[j];
    p.k = op.k;
    p.eps = op.eps;
    p.mu = w[j];
    p.index = il - 1 + j;
    p.phi.resize(n);
    double big = 0.0;
    int arg = 0;
    for (int i = 0; i < n; ++i) {
      p.phi[i] = z[static_cast<std::size_t>(j) * n + i] / r.sqrt_m[i];
      double a = std::abs(p.phi[i]);
      if (a > big) {
        big = a;
        arg = i;
      }
    }
    if (p.phi[arg] < 0)
      for (double& v : p.phi) v = -v;
    p.norm_check = std::abs(op.mass_norm(p.phi) - 1.0);
  }
  return out;
}

}  // namespace

std::vector<double> all_eigenvalues(const DiscreteOperator& op) {
  Reduced r = reduce(op);
  if (r.corner == 0.0) return tridiag_eigenvalues(r.d, r.e);
  if (op.n() > 4096) throw std::invalid_argument("periodic eigensolve capped at n = 4096");
  return dense_eigenvalues(dense_matrix(r), op.n());
}

std::vector<EigenPair> nearest_eigenpair(const DiscreteOperator& op, double E_target,
                                         int count) {
  const int n = op.n();
  if (count < 1 || count > n)
    throw std::invalid_argument("nearest_eigenpair: count out of range");
  Reduced r = reduce(op);
  std::vector<double> w = r.corner == 0.0 ? tridiag_eigenvalues(r.d, r.e)
                                          : dense_eigenvalues(dense_matrix(r), n);
  // The `count` closest eigenvalues form a contiguous window in sorted order.
  int lo = static_cast<int>(std::lower_bound(w.begin(), w.end(), E_target) - w.begin());
  int il = std::min(std::max(lo - 1, 0), n - count);
  double best = kInf;
  int best_il = il;
  for (int start = std::max(0, lo - count); start <= std::min(lo, n - count); ++start) {
    double span = std::max(std::abs(w[start] - E_target),
                           std::abs(w[start + count - 1] - E_target));
    if (span < best) {
      best = span;
      best_il = start;
    }
  }
  auto pairs = make_pairs(op, r, best_il + 1, best_il + count);
  std::sort(pairs.begin(), pairs.end(), [&](const EigenPair& a, const EigenPair& b) {
    return std::abs(a.mu - E_target) < std::abs(b.mu - E_target);
  });
  return pairs;
}

std::vector<EigenPair> lowest_eigenpairs(const DiscreteOperator& op, int count) {
  const int n = op.n();
  if (count < 1 || count > n)
    throw std::invalid_argument("lowest_eigenpairs: count out of range");
  Reduced r = reduce(op);
  return make_pairs(op, r, 1, count);
}

// ---------------------------------------------------------------------------

ScaledField conjugate(std::span<const double> u, const Profile& f,
                      std::span<const double> grid, double eps, bool to_v) {
  if (u.size() != grid.size())
    throw std::invalid_argument("conjugate: size mismatch");
  const double sign = to_v ? 1.0 : -1.0;
  double emax = -kInf;
  std::vector<double> expo(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    expo[i] = sign * f.f(grid[i]) / (2.0 * eps);
    emax = std::max(emax, expo[i]);
  }
  ScaledField out;
  out.values.resize(u.size());
  if (emax > 700.0) {
    out.log_scale = emax - 700.0;
  }
  for (std::size_t i = 0; i < u.size(); ++i)
    out.values[i] = u[i] * std::exp(expo[i] - out.log_scale);
  return out;
}

EnergyDensity energy_densities(const EigenPair& pair, const DiscreteOperator& op) {
  const int n = op.n();
  if (static_cast<int>(pair.phi.size()) != n)
    throw std::invalid_argument("energy_densities: grid mismatch");
  EnergyDensity e;
  e.Ek.resize(n);
  e.Ek_plus.resize(n);
  for (int i = 0; i < n; ++i) {
    double dphi;
    if (i == 0)
      dphi = (pair.phi[1] - pair.phi[0]) / op.dx;
    else if (i == n - 1)
      dphi = (pair.phi[n - 1] - pair.phi[n - 2]) / op.dx;
    else
      dphi = (pair.phi[i + 1] - pair.phi[i - 1]) / (2.0 * op.dx);
    double kin = op.eps * op.eps * dphi * dphi;
    double pot = op.Vk[i] - pair.mu;
    e.Ek_plus[i] = kin + pot * pair.phi[i] * pair.phi[i];
    e.Ek[i] = e.Ek_plus[i] + pair.phi[i] * pair.phi[i];
  }
  return e;
}

DecayReport verify_decay_bounds(const EigenPair& pair, const AgmonField& agmon,
                                const DiscreteOperator& op,
                                const std::vector<std::pair<double, double>>& bands,
                                double delta, double V_min, double s_min,
                                double allowed_radius, double mu_gap_tol) {
  DecayReport rep;
  rep.mu_gap = std::abs(pair.mu - V_min);
  if (rep.mu_gap > mu_gap_tol) {
    rep.refused = true;
    return rep;
  }
  const double eps = pair.eps;
  std::vector<double> xs, ys;
  for (const auto& [lo, hi] : bands) {
    DecayReport::Band b;
    b.lo = lo;
    b.hi = hi;
    b.dA_inf = kInf;
    double mass2 = 0.0;
    for (std::size_t i = 0; i < op.grid.size(); ++i) {
      double s = op.grid[i];
      if (s < lo || s > hi) continue;
      mass2 += pair.phi[i] * pair.phi[i] * op.mass[i];
      b.dA_inf = std::min(b.dA_inf, agmon.d_A[i]);
    }
    b.dA_center = agmon.dA_at(0.5 * (lo + hi));
    b.mass = std::sqrt(mass2);
    b.minus_eps_log_mass = b.mass > 0 ? -eps * std::log(b.mass) : kInf;
    // lower envelope at the band center, upper at the band infimum
    b.lower_ok = b.mass >= std::exp(-(b.dA_center + delta) / eps);
    b.upper_ok = b.mass <= std::exp(-((1.0 - delta) * b.dA_inf - delta) / eps);
    rep.bands.push_back(b);
    if (std::isfinite(b.minus_eps_log_mass)) {
      xs.push_back(b.dA_center);
      ys.push_back(b.minus_eps_log_mass);
    }
  }
  if (xs.size() >= 2) rep.slope = linear_fit(xs, ys).second;
  double inside = 0.0;
  for (std::size_t i = 0; i < op.grid.size(); ++i)
    if (std::abs(op.grid[i] - s_min) <= allowed_radius ||
        (op.periodic &&
         (op.s_hi - op.s_lo) - std::abs(op.grid[i] - s_min) <= allowed_radius))
      inside += pair.phi[i] * pair.phi[i] * op.mass[i];
  rep.allowed_mass = inside;
  return rep;
}

BoundaryFluxReport boundary_flux(const EigenPair& pair, const DiscreteOperator& op) {
  if (!op.dirichlet_lo && !op.dirichlet_hi)
    throw std::invalid_argument("boundary_flux: operator has no Dirichlet boundary");
  BoundaryFluxReport rep;
  rep.eps = pair.eps;
  rep.h12_weight = std::sqrt(2.0 * M_PI) * std::pow(1.0 + double(pair.k) * pair.k, 0.25);
  const int n = op.n();
  // quadratic through (boundary, 0) and the two nearest cell centers
  if (op.dirichlet_lo)
    rep.has_lo = true, rep.dphi_lo = std::abs(9.0 * pair.phi[0] - pair.phi[1]) / (3.0 * op.dx);
  if (op.dirichlet_hi)
    rep.has_hi = true,
    rep.dphi_hi = std::abs(9.0 * pair.phi[n - 1] - pair.phi[n - 2]) / (3.0 * op.dx);
  return rep;
}

}  // namespace viscobs
