#include "viscobs/agmon.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "viscobs/numerics.hpp"

namespace viscobs {

namespace {

constexpr double kCellTol = 1e-10;  // quadrature tolerance per cell
constexpr double kInf = std::numeric_limits<double>::infinity();

// sqrt((V-E)_+), clamped before the root.
struct Metric {
  const std::function<double(double)>& V;
  double E;
  double operator()(double s) const {
    double g = V(s) - E;
    return g > 0 ? std::sqrt(g) : 0.0;
  }
};

// Integral of the metric over [a, b] (a <= b).  `special` lists interior
// points where the integrand loses smoothness (allowed-region boundaries and
// the potential minimum); pieces adjacent to a vanishing point use the
// substitution s = p +- u^2 to tame the square-root behavior.
double metric_integral(const Metric& g, double a, double b,
                       const std::vector<double>& special) {
  if (b <= a) return 0.0;
  std::vector<double> cuts{a, b};
  for (double p : special)
    if (p > a + 1e-15 && p < b - 1e-15) cuts.push_back(p);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i], hi = cuts[i + 1];
    bool sing_lo = g(lo) == 0.0, sing_hi = g(hi) == 0.0;
    if (sing_lo && !sing_hi) {
      double w = std::sqrt(hi - lo);
      total += adaptive_simpson([&](double u) { return 2.0 * u * g(lo + u * u); }, 0.0,
                                w, kCellTol);
    } else if (sing_hi && !sing_lo) {
      double w = std::sqrt(hi - lo);
      total += adaptive_simpson([&](double u) { return 2.0 * u * g(hi - u * u); }, 0.0,
                                w, kCellTol);
    } else if (sing_lo && sing_hi) {
      double mid = 0.5 * (lo + hi);
      double wl = std::sqrt(mid - lo), wh = std::sqrt(hi - mid);
      total += adaptive_simpson([&](double u) { return 2.0 * u * g(lo + u * u); }, 0.0,
                                wl, kCellTol);
      total += adaptive_simpson([&](double u) { return 2.0 * u * g(hi - u * u); }, 0.0,
                                wh, kCellTol);
    } else {
      total += adaptive_simpson(g, lo, hi, kCellTol);
    }
  }
  return total;
}

}  // namespace

AgmonField agmon_distance_1d(const PotentialField& pot, double E, AgmonTopology topology) {
  if (topology == AgmonTopology::Grid2d)
    throw std::invalid_argument("agmon_distance_1d: 1D topologies only");
  if (E < pot.V_min - 1e-12 * std::max(1.0, std::abs(pot.V_min)))
    throw std::invalid_argument("energy level below the potential minimum");

  AgmonField field;
  field.topology = topology;
  field.E = E;
  field.grid = pot.grid;
  field.s_lo = pot.s_lo;
  field.s_hi = pot.s_hi;
  const std::size_t n = pot.grid.size();
  const bool circle = topology == AgmonTopology::Circle;

  Metric g{pot.eval, E};

  // Allowed-region mask.  At the bottom energy with a unique minimum the
  // allowed region is the single cell containing s_min.
  field.allowed.assign(n, 0);
  const bool bottom = E <= pot.V_min + 1e-14 * std::max(1.0, std::abs(pot.V_min));
  std::vector<double> special;  // points where the integrand is nonsmooth
  std::vector<double> boundary_points;
  if (bottom) {
    std::size_t nearest = 0;
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      double d = circle ? std::min(std::abs(pot.grid[i] - pot.s_min),
                                   (pot.s_hi - pot.s_lo) -
                                       std::abs(pot.grid[i] - pot.s_min))
                        : std::abs(pot.grid[i] - pot.s_min);
      if (d < best) {
        best = d;
        nearest = i;
      }
    }
    field.allowed[nearest] = 1;
    boundary_points.push_back(pot.s_min);
    special.push_back(pot.s_min);
    // flat stretches at the bottom level (e.g. V identically E) stay allowed
    for (std::size_t i = 0; i < n; ++i)
      if (pot.values[i] <= E) field.allowed[i] = 1;
  } else {
    for (std::size_t i = 0; i < n; ++i) field.allowed[i] = pot.values[i] <= E;
    bool any = false;
    for (char m : field.allowed) any |= m;
    if (!any) {
      // E between V_min and the smallest node value: the allowed region is a
      // short interval around s_min not containing a node.
      std::size_t nearest = 0;
      double best = kInf;
      for (std::size_t i = 0; i < n; ++i) {
        double d = std::abs(pot.grid[i] - pot.s_min);
        if (d < best) {
          best = d;
          nearest = i;
        }
      }
      field.allowed[nearest] = 1;
    }
    // Locate continuous crossings V = E by bisection between sign changes.
    auto crossing = [&](double a, double b) {
      double fa = pot.eval(a) - E, fb = pot.eval(b) - E;
      if (fa == 0) return a;
      if (fb == 0) return b;
      for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a + b), fm = pot.eval(m) - E;
        if (fm == 0) return m;
        if ((fa < 0) != (fm < 0)) {
          b = m;
          fb = fm;
        } else {
          a = m;
          fa = fm;
        }
      }
      return 0.5 * (a + b);
    };
    std::size_t loops = circle ? n : n - 1;
    for (std::size_t i = 0; i < loops; ++i) {
      std::size_t j = (i + 1) % n;
      double vi = pot.values[i] - E, vj = pot.values[j] - E;
      if ((vi <= 0) != (vj <= 0)) {
        double a = pot.grid[i];
        double b = circle && j == 0 ? pot.grid[j] + (pot.s_hi - pot.s_lo) : pot.grid[j];
        double x = crossing(a, b);
        if (circle) {
          double L = pot.s_hi - pot.s_lo;
          x = pot.s_lo + std::fmod(x - pot.s_lo + L, L);
        }
        boundary_points.push_back(x);
        special.push_back(x);
      }
    }
    // Allowed region touching a domain endpoint needs that endpoint as a
    // source of zero distance.
    if (!circle) {
      if (pot.values.front() <= E) boundary_points.push_back(pot.s_lo);
      if (pot.values.back() <= E) boundary_points.push_back(pot.s_hi);
    }
    if (boundary_points.empty()) {
      boundary_points.push_back(pot.s_min);
      special.push_back(pot.s_min);
    }
  }
  std::sort(special.begin(), special.end());

  // Cumulative metric integral, anchored at the first grid node.
  field.phi.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    field.phi[i + 1] = field.phi[i] + metric_integral(g, pot.grid[i], pot.grid[i + 1], special);
  if (circle) {
    double wrap = metric_integral(g, pot.grid[n - 1], pot.s_hi, special) +
                  metric_integral(g, pot.s_lo, pot.grid[0], special);
    field.phi_total = field.phi[n - 1] + wrap;
  }

  auto phi_at = [&](double s) -> double {
    // nearest node at or below s
    if (s <= pot.grid.front())
      return field.phi.front() - metric_integral(g, s, pot.grid.front(), special);
    if (s >= pot.grid.back())
      return field.phi.back() + metric_integral(g, pot.grid.back(), s, special);
    auto it = std::upper_bound(pot.grid.begin(), pot.grid.end(), s);
    std::size_t i = static_cast<std::size_t>(it - pot.grid.begin()) - 1;
    return field.phi[i] + metric_integral(g, pot.grid[i], s, special);
  };

  field.boundary_phi.clear();
  for (double b : boundary_points) field.boundary_phi.push_back(phi_at(b));

  auto dist_from_phi = [&](double p) {
    double best = kInf;
    for (double b : field.boundary_phi) {
      double d = std::abs(p - b);
      if (circle) d = std::min(d, field.phi_total - d);
      best = std::min(best, d);
    }
    return best;
  };

  field.d_A.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    field.d_A[i] = field.allowed[i] ? 0.0 : dist_from_phi(field.phi[i]);

  // Endpoint values; a diverging metric (pole confinement) makes them +inf.
  if (!circle) {
    double probe = 1e-9 * std::max(1.0, pot.s_hi - pot.s_lo);
    field.d_A_lo = g(pot.s_lo + probe) > 1e8 ? kInf : dist_from_phi(phi_at(pot.s_lo));
    field.d_A_hi = g(pot.s_hi - probe) > 1e8 ? kInf : dist_from_phi(phi_at(pot.s_hi));
  }
  return field;
}

double AgmonField::dA_at(double s) const {
  if (topology == AgmonTopology::Grid2d)
    throw std::invalid_argument("dA_at: 1D topologies only");
  // interpolate phi linearly between nodes (second-order for the distance)
  const std::size_t n = grid.size();
  if (s <= grid.front()) {
    if (topology == AgmonTopology::Interval) {
      if (!std::isfinite(d_A_lo)) return d_A_lo;
      double t = (s - s_lo) / (grid.front() - s_lo + 1e-300);
      return d_A_lo + t * (d_A.front() - d_A_lo);
    }
    s = grid.front();
  }
  if (s >= grid.back()) {
    if (topology == AgmonTopology::Interval) {
      if (!std::isfinite(d_A_hi)) return d_A_hi;
      double t = (s_hi - s) / (s_hi - grid.back() + 1e-300);
      return d_A_hi + t * (d_A.back() - d_A_hi);
    }
    s = grid.back();
  }
  auto it = std::upper_bound(grid.begin(), grid.end(), s);
  std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
  std::size_t j = std::min(i + 1, n - 1);
  double t = j == i ? 0.0 : (s - grid[i]) / (grid[j] - grid[i]);
  return d_A[i] + t * (d_A[j] - d_A[i]);
}

double AgmonField::W_at(double s) const {
  if (!has_W) throw std::logic_error("W not filled; call weight_W first");
  const std::size_t n = grid.size();
  if (topology == AgmonTopology::Interval) {
    if (s <= grid.front()) {
      if (!std::isfinite(W_lo)) return W_lo;
      double t = (s - s_lo) / (grid.front() - s_lo + 1e-300);
      return W_lo + t * (W.front() - W_lo);
    }
    if (s >= grid.back()) {
      if (!std::isfinite(W_hi)) return W_hi;
      double t = (s_hi - s) / (s_hi - grid.back() + 1e-300);
      return W_hi + t * (W.back() - W_hi);
    }
  } else {
    s = std::min(std::max(s, grid.front()), grid.back());
  }
  auto it = std::upper_bound(grid.begin(), grid.end(), s);
  std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  std::size_t j = std::min(i + 1, n - 1);
  double t = j == i ? 0.0 : (s - grid[i]) / (grid[j] - grid[i]);
  return W[i] + t * (W[j] - W[i]);
}

double AgmonField::W_min_over(const Region1D& region) const {
  if (!has_W) throw std::logic_error("W not filled; call weight_W first");
  double best = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (region.contains(grid[i])) best = std::min(best, W[i]);
  for (const auto& [a, b] : region.intervals) {
    for (double s : {a, b}) {
      if (s < s_lo - 1e-12 || s > s_hi + 1e-12) continue;
      double w = W_at(std::min(std::max(s, s_lo), s_hi));
      if (std::isfinite(w)) best = std::min(best, w);
    }
  }
  return best;
}

void weight_W(AgmonField& field, const Profile& f) {
  if (field.topology == AgmonTopology::Grid2d)
    throw std::invalid_argument("weight_W: 1D topologies only");
  const std::size_t n = field.grid.size();
  field.W.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    field.W[i] = field.d_A[i] + 0.5 * f.f(field.grid[i]);
  field.W_lo = field.d_A_lo + 0.5 * f.f(field.s_lo);
  field.W_hi = field.d_A_hi + 0.5 * f.f(field.s_hi);
  field.has_W = true;
  field.W_min = kInf;
  for (std::size_t i = 0; i < n; ++i)
    if (field.W[i] < field.W_min) {
      field.W_min = field.W[i];
      field.W_argmin = field.grid[i];
    }
  if (field.topology == AgmonTopology::Interval) {
    if (field.W_lo < field.W_min) {
      field.W_min = field.W_lo;
      field.W_argmin = field.s_lo;
    }
    if (field.W_hi < field.W_min) {
      field.W_min = field.W_hi;
      field.W_argmin = field.s_hi;
    }
  }
}

// ---------------------------------------------------------------------------
// 2D fast marching

AgmonField agmon_distance_grid(const PotentialField2D& pot, double E) {
  if (E < pot.V_min - 1e-12 * std::max(1.0, std::abs(pot.V_min)))
    throw std::invalid_argument("energy level below the potential minimum");
  AgmonField field;
  field.topology = AgmonTopology::Grid2d;
  field.E = E;
  field.nx = pot.nx;
  field.ny = pot.ny;
  field.lo2[0] = pot.lo[0];
  field.lo2[1] = pot.lo[1];
  field.h2 = pot.h;

  const int nx = pot.nx, ny = pot.ny;
  const double h = pot.h;
  const std::size_t nn = static_cast<std::size_t>(nx) * ny;
  field.d_A.assign(nn, kInf);
  field.allowed.assign(nn, 0);
  std::vector<char> accepted(nn, 0);

  auto speed = [&](std::size_t id) {
    double g = pot.values[id] - E;
    return g > 0 ? std::sqrt(g) : 0.0;
  };

  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;

  bool any = false;
  for (std::size_t id = 0; id < nn; ++id) {
    if (pot.values[id] <= E) {
      field.d_A[id] = 0.0;
      field.allowed[id] = 1;
      heap.push({0.0, static_cast<int>(id)});
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("empty allowed region on the lattice");

  auto update = [&](int i, int j) {
    std::size_t id = static_cast<std::size_t>(j) * nx + i;
    if (accepted[id]) return;
    double a = kInf, b = kInf;
    if (i > 0) a = std::min(a, field.d_A[id - 1]);
    if (i + 1 < nx) a = std::min(a, field.d_A[id + 1]);
    if (j > 0) b = std::min(b, field.d_A[id - static_cast<std::size_t>(nx)]);
    if (j + 1 < ny) b = std::min(b, field.d_A[id + static_cast<std::size_t>(nx)]);
    double f = speed(id);
    double cand;
    if (!std::isfinite(a) && !std::isfinite(b)) return;
    double lo = std::min(a, b), hi = std::max(a, b);
    if (!std::isfinite(hi) || hi - lo >= f * h) {
      cand = lo + f * h;
    } else {
      double disc = 2.0 * f * f * h * h - (a - b) * (a - b);
      cand = 0.5 * (a + b + std::sqrt(std::max(disc, 0.0)));
    }
    if (cand < field.d_A[id] - 1e-15) {
      field.d_A[id] = cand;
      heap.push({cand, static_cast<int>(id)});
    }
  };

  while (!heap.empty()) {
    auto [val, idi] = heap.top();
    heap.pop();
    std::size_t id = static_cast<std::size_t>(idi);
    if (accepted[id] || val > field.d_A[id] + 1e-15) continue;
    accepted[id] = 1;
    int i = idi % nx, j = idi / nx;
    if (i > 0) update(i - 1, j);
    if (i + 1 < nx) update(i + 1, j);
    if (j > 0) update(i, j - 1);
    if (j + 1 < ny) update(i, j + 1);
  }
  return field;
}

}  // namespace viscobs
