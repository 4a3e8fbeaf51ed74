#ifndef VISCOBS_SPECTRAL_HPP
#define VISCOBS_SPECTRAL_HPP

#include <span>
#include <vector>

#include "viscobs/agmon.hpp"
#include "viscobs/geometry.hpp"

namespace viscobs {

// Flux-form discretization of the conjugated operator restricted to a Fourier
// mode: -eps^2 (1/R) d/ds(R d/ds) + eps^2 k^2/R^2 + |f'|^2/4 + eps*qf,
// assembled as a symmetric generalized problem  K u = mu M u  with diagonal
// mass M_ii = R(s_i) ds.  Periodic domains carry one corner coupling.
struct DiscreteOperator {
  std::vector<double> diag, off;   // stiffness: diagonal and super-diagonal
  double corner = 0.0;             // coupling (0, n-1) on periodic domains
  std::vector<double> mass;
  std::vector<double> grid;
  std::vector<double> Vk;          // potential samples incl. the mode term
  std::vector<double> qf;          // qf = (Laplace f)/2 - q samples
  double eps = 0.0;
  int k = 0;
  double dx = 0.0;
  bool periodic = false;
  bool dirichlet_lo = false, dirichlet_hi = false;
  DomainCase kind = DomainCase::Interval;
  double s_lo = 0.0, s_hi = 0.0;

  int n() const { return static_cast<int>(diag.size()); }
  void apply_stiffness(std::span<const double> x, std::span<double> y) const;
  double mass_norm(std::span<const double> x) const;  // ||x||_M
};

DiscreteOperator assemble_operator(const SurfaceSpec& spec, const Profile& f,
                                   const ScalarExpr& q, double eps, int k,
                                   bool include_qf = true);

struct EigenPair {
  int k = 0;
  double eps = 0.0;
  double mu = 0.0;
  std::vector<double> phi;     // mass-normalized, largest-|entry| positive
  double norm_check = 0.0;     // | ||phi||_M - 1 |
  int index = 0;               // position in the spectrum (0-based)
};

// Full spectrum (eigenvalues only).
std::vector<double> all_eigenvalues(const DiscreteOperator& op);

// The `count` eigenpairs closest to E_target, sorted by |mu - E_target|.
std::vector<EigenPair> nearest_eigenpair(const DiscreteOperator& op, double E_target,
                                         int count);

// The lowest `count` eigenpairs, sorted by eigenvalue.
std::vector<EigenPair> lowest_eigenpairs(const DiscreteOperator& op, int count);

// Pointwise multiplication by e^{+-f/2eps}.  When the exponent would overflow
// a plain double the common scale is factored out into log_scale.
struct ScaledField {
  std::vector<double> values;
  double log_scale = 0.0;
};
ScaledField conjugate(std::span<const double> u, const Profile& f,
                      std::span<const double> grid, double eps, bool to_v);

// Semiclassical energy densities of an eigenfunction.
struct EnergyDensity {
  std::vector<double> Ek;       // eps^2|phi'|^2 + (V - mu + 1)|phi|^2
  std::vector<double> Ek_plus;  // eps^2|phi'|^2 + (V - mu)|phi|^2
};
EnergyDensity energy_densities(const EigenPair& pair, const DiscreteOperator& op);

// Two-sided localization check: band masses against the Agmon-distance decay
// envelope, and the least-squares slope of -eps log m against d_A.
struct DecayReport {
  bool refused = false;
  double mu_gap = 0.0;          // |mu - V_min|, always reported
  struct Band {
    double lo = 0, hi = 0;
    double dA_inf = 0, dA_center = 0;
    double mass = 0;            // L2(band, R ds) norm of phi
    double minus_eps_log_mass = 0;
    bool lower_ok = false, upper_ok = false;
  };
  std::vector<Band> bands;
  double slope = 0.0;
  double allowed_mass = 0.0;    // ||phi||^2 on the neighborhood of s_min
};
DecayReport verify_decay_bounds(const EigenPair& pair, const AgmonField& agmon,
                                const DiscreteOperator& op,
                                const std::vector<std::pair<double, double>>& bands,
                                double delta, double V_min, double s_min,
                                double allowed_radius, double mu_gap_tol);

// |d_s phi| at the Dirichlet endpoints by one-sided second-order differences,
// with the single-mode H^{1/2}(S^1) weight sqrt(2pi)(1+k^2)^{1/4}.
struct BoundaryFluxReport {
  bool has_lo = false, has_hi = false;
  double dphi_lo = 0.0, dphi_hi = 0.0;
  double h12_weight = 0.0;
  double eps = 0.0;
};
BoundaryFluxReport boundary_flux(const EigenPair& pair, const DiscreteOperator& op);

}  // namespace viscobs

#endif
