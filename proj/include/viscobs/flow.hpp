#ifndef VISCOBS_FLOW_HPP
#define VISCOBS_FLOW_HPP

#include <limits>
#include <vector>

#include "viscobs/geometry.hpp"

namespace viscobs {

enum class FlowCondition { GCC, FC };
enum class FlowMethod { Simulation, ClosedForm };

struct Trajectory {
  std::vector<double> t;
  std::vector<double> s;
  bool exited = false;      // left the domain (FC bookkeeping)
  double t_exit = 0.0;
  double s_exit = 0.0;
  bool stagnated = false;   // step underflow near a stationary point
  double s_stagnation = 0.0;
};

// Integrates ds/dt = +f'(s) (forward) or -f'(s) (backward) with adaptive RK4
// (step doubling, per-step error <= 1e-9).  On bounded domains integration
// stops at the boundary crossing.
Trajectory integrate_flow(const SurfaceSpec& spec, const Profile& f, double x0,
                          double t0, double t1, bool backward);

struct FlowReport {
  FlowCondition condition = FlowCondition::GCC;
  bool satisfied = false;
  double T_min = std::numeric_limits<double>::infinity();
  double witness = 0.0;              // point achieving the sup of hitting times
  std::vector<double> eval_points;   // where hitting times / g were sampled
  std::vector<double> hitting;       // per-point first entry (or exit) times
  std::vector<double> g_field;       // time spent in omega up to T_min*1.05
  FlowMethod method = FlowMethod::Simulation;
  bool censored = false;             // T_cap exceeded somewhere
  bool stationary_outside = false;   // f' vanishes off omega
  double stationary_at = 0.0;
};

// Decides (GCC)/(FC) and the minimal time, by per-grid-point backward
// integration or by the 1D closed-form time integrals.
FlowReport gcc_time(const SurfaceSpec& spec, const Profile& f, const Region1D& omega,
                    FlowCondition condition, FlowMethod method, double T_cap);

// The per-point backward hitting-time kernel behind the simulation method.
// `hitting_times` fans out with OpenMP; the serial variant is the reference
// implementation and must produce identical results.
std::vector<double> hitting_times(const SurfaceSpec& spec, const Profile& f,
                                  const Region1D& omega, FlowCondition condition,
                                  double T_cap, std::vector<double>& points);
std::vector<double> hitting_times_serial(const SurfaceSpec& spec, const Profile& f,
                                         const Region1D& omega, FlowCondition condition,
                                         double T_cap, std::vector<double>& points);

// 2D backward-flow exit times on a box lattice (flushing condition).
struct FlowReport2D {
  bool satisfied = false;
  double T_min = std::numeric_limits<double>::infinity();
  double witness[2] = {0, 0};
  bool censored = false;
};
FlowReport2D fc_time_2d(const SurfaceSpec& spec, const Profile2D& f,
                        const Region2D& omega, double T_cap, int stride = 8);

}  // namespace viscobs

#endif
