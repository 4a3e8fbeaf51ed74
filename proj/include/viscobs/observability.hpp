#ifndef VISCOBS_OBSERVABILITY_HPP
#define VISCOBS_OBSERVABILITY_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "viscobs/agmon.hpp"
#include "viscobs/spectral.hpp"

namespace viscobs {

enum class RateMode { General, Revolution, Boundary };
enum class ObsTarget { Interior, Boundary };

// Exponential lower-bound rate for the observability cost at horizon T, and
// the induced lower bound on the uniform-observability time.
struct RateReport {
  double rate = 0.0;            // rate(T): C0 >= exp(rate/eps) asymptotically
  double t_unif_lower = 0.0;    // lower bound on T_unif (inf when never)
  bool never_observable = false;
  double W_omega = 0.0;         // min of W over the observation region
  double W_ref = 0.0;           // W_m (revolution) or max_{K_E} W_E (general)
  double E0 = 0.0;              // energy multiplying T
};

RateReport theoretical_rate(const AgmonField& W, const PotentialField& pot,
                            const Region1D& omega, double T, RateMode mode);

// Certified lower bound on C0(T, eps) from a single localized eigenmode
// solution; all norms are evaluated in log space.
struct WitnessCost {
  double log_C0 = 0.0;
  bool infinite = false;        // the mode carries no numerical mass on omega
  double omega_mass = 0.0;      // weighted L2 mass on omega (diagnostic)
};

WitnessCost witness_cost(const EigenPair& pair, const DiscreteOperator& op,
                         const Profile& f, const Region1D& omega, double T,
                         ObsTarget target = ObsTarget::Interior);

// Observability constant from the truncated-eigenbasis Gramian pair (A, G):
// C0^2 is the top generalized eigenvalue.
struct GramianCost {
  double log_C0 = 0.0;
  bool refused = false;         // G numerically singular at this viscosity
  double cond_estimate = 0.0;
};

GramianCost gramian_cost(const DiscreteOperator& op, const Profile& f,
                         const Region1D& omega, double T, int n_modes);

// Rotationally invariant omega: the constant is the sup over the swept
// Fourier modes of the per-mode constants.
GramianCost gramian_cost_rotational(const SurfaceSpec& spec, const Profile& f,
                                    const ScalarExpr& q, const Region1D& omega,
                                    double T, double eps, int k_max, int n_modes,
                                    bool include_qf = true);

// Least-squares constant-model fit of eps*log C0 over a decreasing eps list
// (the largest eps is discarded as pre-asymptotic).
struct SweepPoint {
  double eps = 0.0;
  double log_C0 = 0.0;
  bool ok = false;
};
struct SweepFit {
  double rate = 0.0;
  double residual = 0.0;
  bool pass = false;            // rate >= theory_rate - delta_fit
  bool partial = false;         // some evaluations were refused
  std::vector<SweepPoint> points;
};

SweepFit slope_sweep(std::span<const double> eps_list,
                     const std::function<std::optional<double>(double)>& log_cost,
                     double theory_rate, double delta_fit);

// Bracket for the uniform-observability time: T_lo certifies blow-up below
// it; T_hi is the smallest horizon with no detected blow-up (heuristic, not a
// certificate).
struct TBracket {
  double T_lo = 0.0;
  double T_hi = 0.0;
  bool has_lo = false;
  bool has_hi = false;
  std::vector<std::pair<double, double>> rates;  // (T, fitted rate)
};

TBracket t_unif_bracket(std::span<const double> T_grid,
                        const std::function<std::optional<double>(double)>& fitted_rate,
                        double delta_fit);

}  // namespace viscobs

#endif
