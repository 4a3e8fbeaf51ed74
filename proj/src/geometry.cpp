#include "viscobs/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "viscobs/numerics.hpp"

namespace viscobs {

const char* domain_case_name(DomainCase c) {
  switch (c) {
    case DomainCase::Sphere: return "sphere";
    case DomainCase::Disk: return "disk";
    case DomainCase::Cylinder: return "cylinder";
    case DomainCase::Torus: return "torus";
    case DomainCase::Interval: return "interval";
    case DomainCase::Circle: return "circle";
    case DomainCase::Box2d: return "box2d";
  }
  return "?";
}

std::optional<DomainCase> domain_case_from_name(const std::string& name) {
  for (DomainCase c : {DomainCase::Sphere, DomainCase::Disk, DomainCase::Cylinder,
                       DomainCase::Torus, DomainCase::Interval, DomainCase::Circle,
                       DomainCase::Box2d})
    if (name == domain_case_name(c)) return c;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Profile

Profile::Profile() {
  f_ = ScalarExpr::constant(0.0, {"s"});
  fp_ = ScalarExpr::constant(0.0, {"s"});
  fpp_ = ScalarExpr::constant(0.0, {"s"});
}

Profile Profile::from_expr(ScalarExpr f) {
  Profile p;
  p.symbolic_ = true;
  p.fp_ = f.derivative(f.variables().at(0));
  p.fpp_ = p.fp_.derivative(f.variables().at(0));
  p.f_ = std::move(f);
  return p;
}

Profile Profile::from_derivative(ScalarExpr fprime, double s_lo, double s_hi,
                                 double offset) {
  Profile p;
  p.symbolic_ = false;
  p.fpp_ = fprime.derivative(fprime.variables().at(0));
  p.fp_ = std::move(fprime);
  p.offset_ = offset;
  p.lo_ = s_lo;
  p.hi_ = s_hi;
  // Anchor the cumulative integral on a fine uniform grid; queries add a
  // short Simpson panel from the nearest anchor.
  const int n_anchor = 4096;
  auto anchors = std::make_shared<std::vector<double>>(n_anchor + 1, 0.0);
  p.anchor_dx_ = (s_hi - s_lo) / n_anchor;
  const ScalarExpr& fp = p.fp_;
  double acc = 0.0;
  for (int i = 0; i < n_anchor; ++i) {
    double a = s_lo + i * p.anchor_dx_;
    acc += adaptive_simpson([&](double s) { return fp(s); }, a, a + p.anchor_dx_, 1e-13);
    (*anchors)[i + 1] = acc;
  }
  p.anchors_ = std::move(anchors);
  return p;
}

double Profile::f(double s) const {
  if (symbolic_) return f_(s) + offset_;
  double sc = std::min(std::max(s, lo_), hi_);
  int i = static_cast<int>((sc - lo_) / anchor_dx_);
  i = std::min(std::max(i, 0), static_cast<int>(anchors_->size()) - 1);
  double a = lo_ + i * anchor_dx_;
  return offset_ + (*anchors_)[i] +
         adaptive_simpson([&](double t) { return fp_(t); }, a, sc, 1e-13);
}

double Profile::fp(double s) const { return fp_(s); }
double Profile::fpp(double s) const { return fpp_(s); }

Profile Profile::shifted(double C) const {
  Profile p = *this;
  p.offset_ += C;
  return p;
}

// ---------------------------------------------------------------------------
// Profile2D

Profile2D Profile2D::from_expr(ScalarExpr f) {
  Profile2D p;
  p.separable_ = false;
  p.fx_ = f.derivative("x1");
  p.fy_ = f.derivative("x2");
  p.f_ = std::move(f);
  return p;
}

Profile2D Profile2D::separable(Profile per_coordinate) {
  Profile2D p;
  p.separable_ = true;
  p.f1_ = std::move(per_coordinate);
  return p;
}

double Profile2D::f(double x, double y) const {
  if (separable_) return f1_.f(x) + f1_.f(y);
  double args[2] = {x, y};
  return f_.eval(args);
}

void Profile2D::grad(double x, double y, double& gx, double& gy) const {
  if (separable_) {
    gx = f1_.fp(x);
    gy = f1_.fp(y);
    return;
  }
  double args[2] = {x, y};
  gx = fx_.eval(args);
  gy = fy_.eval(args);
}

double Profile2D::grad_sq(double x, double y) const {
  double gx, gy;
  grad(x, y, gx, gy);
  return gx * gx + gy * gy;
}

// ---------------------------------------------------------------------------
// SurfaceSpec

double SurfaceSpec::radius(double s) const { return has_profile ? R(s) : 1.0; }
double SurfaceSpec::radius_deriv(double s) const { return has_profile ? Rp(s) : 0.0; }

double SurfaceSpec::wrap(double s) const {
  if (!periodic) return s;
  double L = length();
  double t = std::fmod(s - s_lo, L);
  if (t < 0) t += L;
  return s_lo + t;
}

double SurfaceSpec::dist(double a, double b) const {
  double d = std::abs(a - b);
  if (!periodic) return d;
  double L = length();
  d = std::fmod(d, L);
  return std::min(d, L - d);
}

namespace {

// Extrapolates R(s)/(s - pole) to the pole from the three nearest nodes.
double pole_slope(const ScalarExpr& R, double pole, double toward, double dx) {
  std::array<double, 3> h, r;
  for (int j = 0; j < 3; ++j) {
    h[j] = (0.5 + j) * dx;
    double s = pole + (toward > pole ? h[j] : -h[j]);
    r[j] = R(s) / (toward > pole ? h[j] : -h[j]);
  }
  return neville_to_zero(h, r);
}

[[noreturn]] void reject(const std::string& what, double measured) {
  throw std::invalid_argument("profile validation failed: " + what +
                              " (measured " + std::to_string(measured) + ")");
}

}  // namespace

SurfaceSpec build_surface(const GeometryConfig& cfg) {
  SurfaceSpec spec;
  spec.kind = cfg.kind;

  if (cfg.kind == DomainCase::Box2d) {
    if (cfg.box_n < 16) throw std::invalid_argument("box2d needs box_n >= 16");
    if (!(cfg.box_hi[0] > cfg.box_lo[0]) || !(cfg.box_hi[1] > cfg.box_lo[1]))
      throw std::invalid_argument("box2d needs a nonempty extent");
    double hx = (cfg.box_hi[0] - cfg.box_lo[0]) / (cfg.box_n - 1);
    double hy = (cfg.box_hi[1] - cfg.box_lo[1]) / (cfg.box_n - 1);
    if (std::abs(hx - hy) > 1e-12 * std::abs(hx))
      throw std::invalid_argument("box2d lattice must be square (equal spacing)");
    spec.lo2[0] = cfg.box_lo[0];
    spec.lo2[1] = cfg.box_lo[1];
    spec.hi2[0] = cfg.box_hi[0];
    spec.hi2[1] = cfg.box_hi[1];
    spec.n2[0] = spec.n2[1] = cfg.box_n;
    spec.h2 = hx;
    spec.dirichlet_lo = spec.dirichlet_hi = true;
    return spec;
  }

  if (cfg.grid_n < 64) throw std::invalid_argument("grid_n must be at least 64");
  spec.grid_n = cfg.grid_n;

  const bool revolution = cfg.kind == DomainCase::Sphere || cfg.kind == DomainCase::Disk ||
                          cfg.kind == DomainCase::Cylinder || cfg.kind == DomainCase::Torus;
  if (revolution) {
    if (cfg.L <= 0) throw std::invalid_argument("revolution cases need L > 0");
    if (cfg.R_text.empty()) throw std::invalid_argument("revolution cases need a profile R");
    spec.s_lo = 0.0;
    spec.s_hi = cfg.L;
    spec.R = ScalarExpr::parse(cfg.R_text, {"s"});
    spec.Rp = spec.R.derivative("s");
    spec.has_profile = true;
  } else {
    if (cfg.has_range) {
      spec.s_lo = cfg.s_lo;
      spec.s_hi = cfg.s_hi;
    } else {
      spec.s_lo = 0.0;
      spec.s_hi = cfg.L;
    }
    if (!(spec.s_hi > spec.s_lo)) throw std::invalid_argument("empty 1D range");
  }

  spec.dx = spec.length() / spec.grid_n;
  spec.grid.resize(spec.grid_n);
  for (int i = 0; i < spec.grid_n; ++i) spec.grid[i] = spec.s_lo + (i + 0.5) * spec.dx;

  switch (cfg.kind) {
    case DomainCase::Sphere:
      spec.pole_lo = spec.pole_hi = true;
      break;
    case DomainCase::Disk:
      spec.pole_lo = true;
      spec.dirichlet_hi = true;
      break;
    case DomainCase::Cylinder:
      spec.dirichlet_lo = spec.dirichlet_hi = true;
      break;
    case DomainCase::Torus:
    case DomainCase::Circle:
      spec.periodic = true;
      break;
    case DomainCase::Interval:
      spec.dirichlet_lo = spec.dirichlet_hi = true;
      break;
    default:
      break;
  }

  if (!revolution) return spec;

  const double L = cfg.L;
  const double tol = 1e-6;
  if (spec.pole_lo) {
    double R0 = spec.R(0.0);
    if (std::abs(R0) > tol) reject("R(0) = 0", R0);
    double slope = pole_slope(spec.R, 0.0, L, spec.dx);
    if (std::abs(slope - 1.0) > tol) reject("R'(0) = 1", slope);
  }
  if (spec.pole_hi) {
    double RL = spec.R(L);
    if (std::abs(RL) > tol) reject("R(L) = 0", RL);
    double slope = -pole_slope(spec.R, L, 0.0, spec.dx);
    if (std::abs(slope + 1.0) > tol) reject("R'(L) = -1", slope);
  }
  if (cfg.kind == DomainCase::Torus) {
    double gap = spec.R(0.0) - spec.R(L);
    if (std::abs(gap) > 1e-8) reject("R(0) = R(L)", gap);
    double dgap = spec.Rp(0.0) - spec.Rp(L);
    if (std::abs(dgap) > 1e-8) reject("R'(0) = R'(L)", dgap);
  }
  if (cfg.kind == DomainCase::Cylinder) {
    for (double s : {0.0, L})
      if (spec.R(s) <= 0) reject("R > 0 at the boundary", spec.R(s));
  }
  if (cfg.kind == DomainCase::Disk) {
    if (spec.R(L) <= 0) reject("R(L) > 0", spec.R(L));
  }
  for (double s : spec.grid)
    if (spec.R(s) <= 0)
      throw std::invalid_argument("profile R is nonpositive at interior node s = " +
                                  std::to_string(s));
  return spec;
}

// ---------------------------------------------------------------------------
// Regions

bool Region1D::contains(double s) const {
  for (const auto& [a, b] : intervals)
    if (s >= a && s <= b) return true;
  return false;
}

double Region1D::distance(double s) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : intervals) {
    if (s >= a && s <= b) return 0.0;
    d = std::min(d, std::min(std::abs(s - a), std::abs(s - b)));
  }
  return d;
}

std::vector<std::pair<double, double>> Region1D::complement(double lo, double hi,
                                                            bool periodic) const {
  auto sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> out;
  double cur = lo;
  for (const auto& [a, b] : sorted) {
    double ca = std::max(a, lo), cb = std::min(b, hi);
    if (cb < cur) continue;
    if (ca > cur) out.push_back({cur, ca});
    cur = std::max(cur, cb);
  }
  if (cur < hi) out.push_back({cur, hi});
  if (periodic && out.size() >= 2 && out.front().first == lo && out.back().second == hi) {
    // The wrap joins the first and last gaps into one arc.
    out.front().first = out.back().first - (hi - lo);
    out.pop_back();
  }
  return out;
}

bool Region2D::contains(double x, double y) const {
  for (const auto& b : boxes)
    if (x >= b[0] && x <= b[2] && y >= b[1] && y <= b[3]) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Effective potentials

PotentialField effective_potential(const SurfaceSpec& spec, const Profile& f, double c,
                                   EnergyChoice E) {
  if (!spec.is_1d()) throw std::invalid_argument("effective_potential: 1D domains only");
  if (c < 0) throw std::invalid_argument("rotation parameter c must be nonnegative");
  if (c > 0 && !spec.is_revolution())
    throw std::invalid_argument("c > 0 requires a revolution geometry");

  if (spec.is_revolution() && (spec.pole_lo || spec.pole_hi)) {
    // theta-invariant fields must be critical at the poles
    for (bool at_lo : {true, false}) {
      if ((at_lo && !spec.pole_lo) || (!at_lo && !spec.pole_hi)) continue;
      double fp_pole = f.fp(at_lo ? spec.s_lo : spec.s_hi);
      if (std::abs(fp_pole) > 1e-8)
        throw std::invalid_argument("f'(pole) must vanish; measured " +
                                    std::to_string(fp_pole));
    }
  }

  PotentialField pot;
  pot.grid = spec.grid;
  pot.c = c;
  pot.periodic = spec.periodic;
  pot.s_lo = spec.s_lo;
  pot.s_hi = spec.s_hi;

  ScalarExpr R = spec.R;
  const bool rev = spec.is_revolution();
  Profile fc = f;
  pot.eval = [R, fc, c, rev](double s) {
    double v = sq(fc.fp(s)) / 4.0;
    if (rev && c > 0) {
      double r = R(s);
      v += c * c / (r * r);
    }
    return v;
  };

  pot.values.resize(pot.grid.size());
  for (std::size_t i = 0; i < pot.grid.size(); ++i) pot.values[i] = pot.eval(pot.grid[i]);

  // Global scan, then golden-section refinement on the three-cell bracket.
  std::size_t imin = 0;
  for (std::size_t i = 1; i < pot.values.size(); ++i)
    if (pot.values[i] < pot.values[imin]) imin = i;

  auto eval_wrapped = [&](double s) {
    if (spec.periodic) {
      double L = spec.length();
      double t = std::fmod(s - spec.s_lo, L);
      if (t < 0) t += L;
      s = spec.s_lo + t;
    }
    return pot.eval(s);
  };
  double lo, hi;
  if (spec.periodic) {
    lo = pot.grid[imin] - spec.dx;
    hi = pot.grid[imin] + spec.dx;
  } else {
    lo = std::max(spec.s_lo + ((spec.pole_lo && c > 0) ? 0.5 * spec.dx * 1e-6 : 0.0),
                  pot.grid[imin] - spec.dx);
    hi = std::min(spec.s_hi - ((spec.pole_hi && c > 0) ? 0.5 * spec.dx * 1e-6 : 0.0),
                  pot.grid[imin] + spec.dx);
    // The boundary itself may carry the minimum.
    lo = std::max(lo, spec.s_lo + ((spec.pole_lo && c > 0) ? 1e-12 : 0.0));
    hi = std::min(hi, spec.s_hi);
    if (imin == 0 && !spec.pole_lo) lo = spec.s_lo;
    if (imin + 1 == pot.values.size() && !spec.pole_hi) hi = spec.s_hi;
  }
  double s_star = golden_section_min(eval_wrapped, lo, hi, 1e-12 * std::max(1.0, spec.length()));
  // Boundary minima: when the refined point hugs the bracket edge and the
  // edge is a domain endpoint, snap to it.
  for (double edge : {spec.s_lo, spec.s_hi}) {
    bool pole = (edge == spec.s_lo) ? spec.pole_lo : spec.pole_hi;
    if (!spec.periodic && !pole && std::abs(s_star - edge) < 2e-12 * std::max(1.0, spec.length()))
      s_star = edge;
  }
  pot.s_min = spec.periodic ? spec.s_lo + std::fmod(s_star - spec.s_lo + spec.length(),
                                                    spec.length())
                            : s_star;
  pot.V_min = eval_wrapped(s_star);

  // Uniqueness: any other local grid minimum within 1e-9 of V_min disproves it.
  int n = static_cast<int>(pot.values.size());
  int near_count = 0;
  auto val = [&](int i) {
    if (spec.periodic) return pot.values[(i % n + n) % n];
    return pot.values[std::clamp(i, 0, n - 1)];
  };
  std::vector<double> local_min_pos;
  for (int i = 0; i < n; ++i) {
    bool interior_min = val(i) <= val(i - 1) && val(i) <= val(i + 1);
    if (!spec.periodic && (i == 0 || i == n - 1)) interior_min = val(i) <= val(i == 0 ? 1 : n - 2);
    if (interior_min && pot.values[i] <= pot.V_min + 1e-9) {
      // cluster adjacent flat runs
      if (!local_min_pos.empty()) {
        double gap = spec.periodic
                         ? std::min(std::abs(pot.grid[i] - local_min_pos.back()),
                                    spec.length() - std::abs(pot.grid[i] - local_min_pos.back()))
                         : std::abs(pot.grid[i] - local_min_pos.back());
        if (gap <= 1.5 * spec.dx) {
          local_min_pos.back() = pot.grid[i];
          continue;
        }
      }
      local_min_pos.push_back(pot.grid[i]);
      ++near_count;
    }
  }
  if (spec.periodic && local_min_pos.size() >= 2) {
    double gap = spec.length() - std::abs(local_min_pos.back() - local_min_pos.front());
    if (gap <= 1.5 * spec.dx) --near_count;
  }
  pot.unique_min = near_count <= 1;

  pot.E_ref = E.bottom ? pot.V_min : E.value;
  return pot;
}

PotentialField2D effective_potential_2d(const SurfaceSpec& spec, const Profile2D& f,
                                        EnergyChoice E) {
  if (spec.kind != DomainCase::Box2d)
    throw std::invalid_argument("effective_potential_2d: box2d only");
  PotentialField2D pot;
  pot.nx = spec.n2[0];
  pot.ny = spec.n2[1];
  pot.lo[0] = spec.lo2[0];
  pot.lo[1] = spec.lo2[1];
  pot.h = spec.h2;
  Profile2D fc = f;
  pot.eval = [fc](double x, double y) { return fc.grad_sq(x, y) / 4.0; };
  pot.values.resize(static_cast<std::size_t>(pot.nx) * pot.ny);
  std::size_t imin = 0;
  for (int j = 0; j < pot.ny; ++j)
    for (int i = 0; i < pot.nx; ++i) {
      std::size_t id = static_cast<std::size_t>(j) * pot.nx + i;
      pot.values[id] = pot.eval(pot.x_at(i), pot.y_at(j));
      if (pot.values[id] < pot.values[imin]) imin = id;
    }
  pot.V_min = pot.values[imin];
  pot.x_min[0] = pot.x_at(static_cast<int>(imin) % pot.nx);
  pot.x_min[1] = pot.y_at(static_cast<int>(imin) / pot.nx);
  int near = 0;
  for (std::size_t id = 0; id < pot.values.size(); ++id)
    if (pot.values[id] <= pot.V_min + 1e-12) ++near;
  pot.unique_min = near == 1;
  pot.E_ref = E.bottom ? pot.V_min : E.value;
  return pot;
}

}  // namespace viscobs
