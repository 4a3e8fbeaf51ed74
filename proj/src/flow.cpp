#include "viscobs/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "viscobs/numerics.hpp"
#include "viscobs/parallel.hpp"

namespace viscobs {

namespace {

constexpr double kStepTol = 1e-9;

struct Stepper1D {
  const Profile& f;
  double sign;  // +1 forward along grad f, -1 backward
  double rhs(double s) const { return sign * f.fp(s); }

  // One RK4 step.
  double rk4(double s, double h) const {
    double k1 = rhs(s);
    double k2 = rhs(s + 0.5 * h * k1);
    double k3 = rhs(s + 0.5 * h * k2);
    double k4 = rhs(s + h * k3);
    return s + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }

  // Step-doubled RK4: returns the fine value, and the error estimate.
  double step(double s, double h, double& err) const {
    double big = rk4(s, h);
    double half = rk4(rk4(s, 0.5 * h), 0.5 * h);
    err = std::abs(half - big) / 15.0;
    return half;
  }
};

// Cubic Hermite root: the time fraction in [0,1] at which the interpolant of
// (s0, v0) -> (s1, v1) over step h crosses `target`.
double hermite_crossing(double s0, double v0, double s1, double v1, double h,
                        double target) {
  auto value = [&](double th) {
    double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
    double h10 = th * (1 - th) * (1 - th);
    double h01 = th * th * (3 - 2 * th);
    double h11 = th * th * (th - 1);
    return h00 * s0 + h10 * h * v0 + h01 * s1 + h11 * h * v1 - target;
  };
  double a = 0.0, b = 1.0, fa = value(a), fb = value(b);
  if (fa == 0) return 0;
  if (fb == 0) return 1;
  if (fa * fb > 0) {
    // no sign change of the interpolant; fall back to the chord
    return (target - s0) / (s1 - s0);
  }
  for (int it = 0; it < 60; ++it) {
    double m = 0.5 * (a + b), fm = value(m);
    if (fm == 0) return m;
    if (fa * fm < 0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Trajectory integrate_flow(const SurfaceSpec& spec, const Profile& f, double x0,
                          double t0, double t1, bool backward) {
  if (!spec.is_1d()) throw std::invalid_argument("integrate_flow: 1D domains only");
  Trajectory tr;
  Stepper1D st{f, backward ? -1.0 : 1.0};
  double t = t0, s = x0;
  double span = t1 - t0;
  double h = std::min(1e-3 * std::max(1.0, span), span);
  tr.t.push_back(t);
  tr.s.push_back(s);
  const bool bounded = !spec.periodic;
  while (t < t1) {
    h = std::min(h, t1 - t);
    double err;
    double s_new = st.step(s, h, err);
    if (err > kStepTol && h > 1e-14) {
      h *= std::max(0.1, 0.9 * std::pow(kStepTol / err, 0.2));
      if (h < 1e-14 * std::max(1.0, span)) {
        tr.stagnated = true;
        tr.s_stagnation = s;
        break;
      }
      continue;
    }
    double v0 = st.rhs(s), v1 = st.rhs(s_new);
    if (bounded && (s_new < spec.s_lo || s_new > spec.s_hi)) {
      double target = s_new < spec.s_lo ? spec.s_lo : spec.s_hi;
      double th = hermite_crossing(s, v0, s_new, v1, h, target);
      tr.exited = true;
      tr.t_exit = t + th * h;
      tr.s_exit = target;
      tr.t.push_back(tr.t_exit);
      tr.s.push_back(target);
      return tr;
    }
    t += h;
    s = spec.wrap(s_new);
    tr.t.push_back(t);
    tr.s.push_back(s);
    if (err > 0) h *= std::min(5.0, 0.9 * std::pow(kStepTol / err, 0.2));
    if (std::abs(v1) < 1e-15 && std::abs(v0) < 1e-15) {
      // stationary: nothing more happens
      tr.t.push_back(t1);
      tr.s.push_back(s);
      return tr;
    }
  }
  return tr;
}

namespace {

struct HitResult {
  double hit = std::numeric_limits<double>::infinity();
  double g = 0.0;  // time in omega over [0, g_horizon]
  bool stationary = false;
  double stat_at = 0.0;
};

// Backward integration from y until omega is entered (GCC) or the domain is
// left (FC also accepts exit).  Accumulates time-in-omega up to g_horizon.
HitResult hit_from(const SurfaceSpec& spec, const Profile& f, const Region1D& omega,
                   FlowCondition cond, double y, double T_cap, double g_horizon) {
  HitResult res;
  Stepper1D st{f, -1.0};
  double t = 0.0, s = y;
  double h = 1e-3 * std::max(1.0, T_cap);
  const double horizon = std::max(T_cap, g_horizon);
  bool inside = omega.contains(s);
  if (inside) res.hit = 0.0;
  const bool bounded = !spec.periodic;
  while (t < horizon) {
    h = std::min(h, horizon - t);
    double err;
    double s_new_raw = st.step(s, h, err);
    if (err > kStepTol && h > 1e-14) {
      h *= std::max(0.1, 0.9 * std::pow(kStepTol / err, 0.2));
      if (h < 1e-14 * std::max(1.0, horizon)) {
        res.stationary = true;
        res.stat_at = s;
        return res;
      }
      continue;
    }
    double v0 = st.rhs(s), v1 = st.rhs(s_new_raw);
    if (std::abs(v0) < 1e-14 && std::abs(v1) < 1e-14) {
      if (inside) res.g += std::min(g_horizon, horizon) - std::min(g_horizon, t);
      if (!inside && !std::isfinite(res.hit)) {
        res.stationary = true;
        res.stat_at = s;
      }
      return res;
    }

    // Collect boundary-crossing fractions within this step (and the domain
    // exit for bounded domains), then walk them in time order.
    double step_end = 1.0;
    bool exits = false;
    if (bounded && (s_new_raw < spec.s_lo || s_new_raw > spec.s_hi)) {
      double target = s_new_raw < spec.s_lo ? spec.s_lo : spec.s_hi;
      step_end = hermite_crossing(s, v0, s_new_raw, v1, h, target);
      exits = true;
    }
    std::vector<std::pair<double, double>> crossings;  // (fraction, boundary)
    double a = std::min(s, s_new_raw), b = std::max(s, s_new_raw);
    for (const auto& iv : omega.intervals) {
      for (double edge : {iv.first, iv.second}) {
        for (double shift : spec.periodic ? std::vector<double>{-spec.length(), 0.0,
                                                                spec.length()}
                                          : std::vector<double>{0.0}) {
          double e = edge + shift;
          if (e > a - 1e-15 && e < b + 1e-15) {
            double th = hermite_crossing(s, v0, s_new_raw, v1, h, e);
            if (th >= 0 && th <= step_end) crossings.push_back({th, e});
          }
        }
      }
    }
    std::sort(crossings.begin(), crossings.end());
    double prev = 0.0;
    bool cur_inside = inside;
    for (const auto& [th, edge] : crossings) {
      double seg_t0 = t + prev * h, seg_t1 = t + th * h;
      if (cur_inside && seg_t0 < g_horizon)
        res.g += std::min(g_horizon, seg_t1) - seg_t0;
      // state just after passing the edge:
      double s_after = s + (s_new_raw - s) * std::min(1.0, th + 1e-9);
      cur_inside = omega.contains(spec.wrap(s_after));
      if (cur_inside && !std::isfinite(res.hit)) res.hit = seg_t1;
      prev = th;
    }
    double seg_t0 = t + prev * h, seg_t1 = t + step_end * h;
    if (cur_inside && seg_t0 < g_horizon) res.g += std::min(g_horizon, seg_t1) - seg_t0;
    if (exits) {
      if (cond == FlowCondition::FC && !std::isfinite(res.hit)) res.hit = seg_t1;
      return res;
    }
    t += h;
    s = spec.wrap(s_new_raw);
    inside = omega.contains(s);
    if (inside && !std::isfinite(res.hit)) res.hit = t;  // safety net
    if (err > 0) h *= std::min(5.0, 0.9 * std::pow(kStepTol / err, 0.2));
    if (std::isfinite(res.hit) && t >= g_horizon) return res;
  }
  return res;
}

std::vector<double> make_eval_points(const SurfaceSpec& spec, const Region1D& omega) {
  std::vector<double> pts = spec.grid;
  // The sup of hitting times is approached at omega boundaries; add witnesses
  // just outside each edge so the reported T_min does not depend on grid phase.
  const double nudge = 1e-9 * std::max(1.0, spec.length());
  for (const auto& iv : omega.intervals) {
    for (double cand : {iv.first - nudge, iv.second + nudge}) {
      double w = spec.periodic ? spec.wrap(cand) : cand;
      if (w >= spec.s_lo && w <= spec.s_hi && !omega.contains(w)) pts.push_back(w);
    }
  }
  return pts;
}

template <typename ForEach>
std::vector<double> hitting_impl(const SurfaceSpec& spec, const Profile& f,
                                 const Region1D& omega, FlowCondition cond, double T_cap,
                                 std::vector<double>& points, ForEach&& for_each) {
  points = make_eval_points(spec, omega);
  std::vector<double> hit(points.size());
  for_each(static_cast<std::ptrdiff_t>(points.size()), [&](std::ptrdiff_t i) {
    hit[static_cast<std::size_t>(i)] =
        hit_from(spec, f, omega, cond, points[static_cast<std::size_t>(i)], T_cap, 0.0)
            .hit;
  });
  return hit;
}

}  // namespace

std::vector<double> hitting_times(const SurfaceSpec& spec, const Profile& f,
                                  const Region1D& omega, FlowCondition cond, double T_cap,
                                  std::vector<double>& points) {
  return hitting_impl(spec, f, omega, cond, T_cap, points,
                      [](std::ptrdiff_t n, auto&& fn) { parallel_for(n, fn); });
}

std::vector<double> hitting_times_serial(const SurfaceSpec& spec, const Profile& f,
                                         const Region1D& omega, FlowCondition cond,
                                         double T_cap, std::vector<double>& points) {
  return hitting_impl(spec, f, omega, cond, T_cap, points,
                      [](std::ptrdiff_t n, auto&& fn) { serial_for(n, fn); });
}

namespace {

FlowReport gcc_time_simulation(const SurfaceSpec& spec, const Profile& f,
                               const Region1D& omega, FlowCondition cond, double T_cap) {
  FlowReport rep;
  rep.condition = cond;
  rep.method = FlowMethod::Simulation;
  rep.hitting = hitting_times(spec, f, omega, cond, T_cap, rep.eval_points);

  double sup = 0.0;
  std::size_t worst = 0;
  bool censored = false;
  for (std::size_t i = 0; i < rep.hitting.size(); ++i) {
    if (!std::isfinite(rep.hitting[i])) {
      censored = true;
      worst = i;
      continue;
    }
    if (rep.hitting[i] > sup) {
      sup = rep.hitting[i];
      worst = i;
    }
  }
  rep.censored = censored;
  rep.satisfied = !censored;
  rep.T_min = censored ? std::numeric_limits<double>::infinity() : sup;
  rep.witness = rep.eval_points[worst];

  double g_horizon = censored ? T_cap : std::max(sup * 1.05, sup + 1e-6);
  rep.g_field.resize(rep.eval_points.size());
  parallel_for(static_cast<std::ptrdiff_t>(rep.eval_points.size()), [&](std::ptrdiff_t i) {
    auto r = hit_from(spec, f, omega, cond, rep.eval_points[static_cast<std::size_t>(i)],
                      g_horizon, g_horizon);
    rep.g_field[static_cast<std::size_t>(i)] = r.g;
  });
  return rep;
}

FlowReport gcc_time_closed_form(const SurfaceSpec& spec, const Profile& f,
                                const Region1D& omega, FlowCondition cond, double T_cap) {
  FlowReport rep;
  rep.condition = cond;
  rep.method = FlowMethod::ClosedForm;
  auto comps = omega.complement(spec.s_lo, spec.s_hi, spec.periodic);
  if (cond == FlowCondition::GCC && omega.empty()) {
    rep.satisfied = false;
    return rep;
  }
  double worst = 0.0, witness = spec.s_lo;
  for (const auto& [a, b] : comps) {
    // f' must keep one sign on the component (checked on a fine grid).
    const int probes = 4096;
    double sign = 0.0;
    for (int i = 0; i <= probes; ++i) {
      double s = spec.wrap(a + (b - a) * i / probes);
      double v = f.fp(s);
      if (std::abs(v) < 1e-12) {
        rep.satisfied = false;
        rep.stationary_outside = true;
        rep.stationary_at = s;
        return rep;
      }
      double sgn = v > 0 ? 1.0 : -1.0;
      if (sign == 0.0) sign = sgn;
      if (sign != sgn) {
        rep.satisfied = false;
        rep.stationary_outside = true;
        rep.stationary_at = s;
        return rep;
      }
    }
    double T = std::abs(adaptive_simpson(
        [&](double s) { return 1.0 / f.fp(spec.wrap(s)); }, a, b, 1e-10));
    if (T > worst) {
      worst = T;
      witness = sign > 0 ? b : a;
    }
  }
  rep.T_min = worst;
  rep.witness = spec.wrap(witness);
  rep.satisfied = worst <= T_cap;
  rep.censored = !rep.satisfied;
  return rep;
}

}  // namespace

FlowReport gcc_time(const SurfaceSpec& spec, const Profile& f, const Region1D& omega,
                    FlowCondition condition, FlowMethod method, double T_cap) {
  if (!spec.is_1d()) throw std::invalid_argument("gcc_time: 1D domains only (see fc_time_2d)");
  if (method == FlowMethod::Simulation)
    return gcc_time_simulation(spec, f, omega, condition, T_cap);
  return gcc_time_closed_form(spec, f, omega, condition, T_cap);
}

FlowReport2D fc_time_2d(const SurfaceSpec& spec, const Profile2D& f, const Region2D& omega,
                        double T_cap, int stride) {
  if (spec.kind != DomainCase::Box2d)
    throw std::invalid_argument("fc_time_2d: box2d only");
  FlowReport2D rep;
  int nx = (spec.n2[0] + stride - 1) / stride, ny = (spec.n2[1] + stride - 1) / stride;
  std::vector<double> times(static_cast<std::size_t>(nx) * ny,
                            std::numeric_limits<double>::infinity());
  parallel_for(static_cast<std::ptrdiff_t>(times.size()), [&](std::ptrdiff_t id) {
    int i = static_cast<int>(id) % nx, j = static_cast<int>(id) / nx;
    double x = spec.lo2[0] + i * stride * spec.h2;
    double y = spec.lo2[1] + j * stride * spec.h2;
    x = std::min(x, spec.hi2[0]);
    y = std::min(y, spec.hi2[1]);
    // backward flow: d/dt (x,y) = -grad f
    double t = 0, h = 1e-3 * std::max(1.0, T_cap);
    double px = x, py = y;
    while (t < T_cap) {
      h = std::min(h, T_cap - t);
      auto rhs = [&](double qx, double qy, double& gx, double& gy) {
        f.grad(qx, qy, gx, gy);
        gx = -gx;
        gy = -gy;
      };
      auto rk4 = [&](double qx, double qy, double hh, double& ox, double& oy) {
        double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
        rhs(qx, qy, k1x, k1y);
        rhs(qx + 0.5 * hh * k1x, qy + 0.5 * hh * k1y, k2x, k2y);
        rhs(qx + 0.5 * hh * k2x, qy + 0.5 * hh * k2y, k3x, k3y);
        rhs(qx + hh * k3x, qy + hh * k3y, k4x, k4y);
        ox = qx + hh / 6 * (k1x + 2 * k2x + 2 * k3x + k4x);
        oy = qy + hh / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
      };
      double bx, by, mx, my, fx, fy;
      rk4(px, py, h, bx, by);
      rk4(px, py, 0.5 * h, mx, my);
      rk4(mx, my, 0.5 * h, fx, fy);
      double err = std::hypot(fx - bx, fy - by) / 15.0;
      if (err > kStepTol && h > 1e-12) {
        h *= std::max(0.1, 0.9 * std::pow(kStepTol / err, 0.2));
        continue;
      }
      bool out = fx < spec.lo2[0] || fx > spec.hi2[0] || fy < spec.lo2[1] || fy > spec.hi2[1];
      bool in_omega = omega.contains(fx, fy);
      t += h;
      px = fx;
      py = fy;
      if (out || in_omega) {
        times[static_cast<std::size_t>(id)] = t;
        return;
      }
      if (err > 0) h *= std::min(5.0, 0.9 * std::pow(kStepTol / err, 0.2));
    }
  });
  double sup = 0;
  std::size_t worst = 0;
  bool censored = false;
  for (std::size_t id = 0; id < times.size(); ++id) {
    if (!std::isfinite(times[id])) {
      censored = true;
      worst = id;
    } else if (times[id] > sup) {
      sup = times[id];
      worst = id;
    }
  }
  rep.censored = censored;
  rep.satisfied = !censored;
  rep.T_min = censored ? std::numeric_limits<double>::infinity() : sup;
  rep.witness[0] = spec.lo2[0] + (static_cast<int>(worst) % nx) * stride * spec.h2;
  rep.witness[1] = spec.lo2[1] + (static_cast<int>(worst) / nx) * stride * spec.h2;
  return rep;
}

}  // namespace viscobs
