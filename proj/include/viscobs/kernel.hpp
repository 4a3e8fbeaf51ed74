#ifndef VISCOBS_KERNEL_HPP
#define VISCOBS_KERNEL_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "viscobs/observability.hpp"
#include "viscobs/spectral.hpp"

namespace viscobs {

// 1D stage for path problems: an interval or a circle.
struct PathDomain {
  bool periodic = false;
  double lo = 0.0, hi = 0.0;
  static PathDomain from(const SurfaceSpec& spec);
  double period() const { return hi - lo; }
  double wrap(double s) const;
  double dist(double a, double b) const;
};

enum class ActionForm { Rho, DXPlus, DXMinus };

struct ActionResult {
  double x = 0, y = 0, t = 0;
  double value = 0;
  ActionForm form = ActionForm::Rho;
  std::vector<double> path;  // m+1 nodes (unwrapped coordinates)
  bool converged = false;
  int iterations = 0;
};

// Variational action over discrete paths: trapezoidal action on m segments,
// minimized by preconditioned descent with backtracking line search from the
// straight-path and flow-trajectory initializations.
ActionResult action_distance(const PathDomain& dom, const Profile& f, double x,
                             double y, double t, ActionForm form, int m = 128);

// rho at all grid pairs and all intermediate slice times by the Bellman
// recursion (single-threaded per table).
struct HopfLaxTable {
  std::vector<double> grid;
  int slices = 0;
  double t_total = 0, dt = 0;
  bool periodic = false;
  double period = 0;
  // tables[r-1][i*N + j] = rho(x_i, x_j, r*dt)
  std::vector<std::vector<double>> tables;
  double rho(int i, int j, int r) const {
    return tables[static_cast<std::size_t>(r) - 1]
                 [static_cast<std::size_t>(i) * grid.size() + static_cast<std::size_t>(j)];
  }
};
HopfLaxTable hopf_lax_table(const PathDomain& dom, const Profile& f,
                            std::span<const double> grid, double t, int m);

// The three equivalent forms of the degenerate distance: energy over free
// time, length over free time, length at fixed parametrization.
struct ReparamReport {
  double d1 = 0, d2 = 0, d3 = 0;
  double max_rel_gap = 0;
};
ReparamReport reparametrization_check(const PathDomain& dom, const Profile& f, double x,
                                      double y, int samples = 25);

// d over ([0,T] x omega-bar): sup over y of inf over (x, t) of d_{grad f}.
struct SupInfResult {
  double value = 0;
  double argmax_y = 0;
};
SupInfResult dx_sup_inf(const PathDomain& dom, const Profile& f,
                        std::span<const double> y_grid, const Region1D& omega, double T,
                        int slices = 64);

struct KernelField {
  double y = 0, t = 0, eps = 0;
  std::vector<double> values;     // transport-picture kernel column on the grid
  double negative_mass = 0;       // clipped below -1e-12 (diagnostic)
  int clamped = 0;
  double mass = 0;                // integral against the volume weights
  bool excessive_negativity = false;
};

// Eigen-expansion evolution of the viscous transport equation: the symmetric
// conjugated operator is diagonalized once; columns and weighted costs come
// from mode sums.
class KernelEvolver {
 public:
  // n_modes = 0 keeps the full spectrum; a positive cap truncates the
  // expansion (admissible once the evolution time exceeds a few grid scales).
  KernelEvolver(DiscreteOperator op, const Profile& f, int n_modes = 0);

  const DiscreteOperator& op() const { return op_; }

  // mollified-delta kernel column started at y, evolved to time t > 0
  KernelField column(double y, double t, double mollifier_cells = 2.0) const;
  // evolve an arbitrary initial state in the transport picture
  std::vector<double> evolve(std::span<const double> u0, double t) const;

  // max over the kernel-column family {K(.,y,warmup)} of the log witness
  // ratio ||u(T)|| / (int_0^T ||u||_omega^2)^{1/2}; the cost certificate used
  // for positive data.
  double positive_family_log_cost(const Region1D& omega, double T, double warmup,
                                  int n_sources, double mollifier_cells = 2.0) const;

  std::span<const double> grid() const { return op_.grid; }
  double value_at(const KernelField& field, double x) const;

 private:
  DiscreteOperator op_;
  Profile f_;
  std::vector<double> lambda_;
  std::vector<std::vector<double>> psi_;   // mass-orthonormal modes
  std::vector<double> f_grid_;             // f(s_i)
  std::vector<double> coeffs(std::span<const double> u0) const;
};

struct LiYauPair {
  double x = 0, y = 0, t = 0;
  double fitted = 0;       // constant fit of -eps log K
  double expected = 0;     // d_{grad f}(x, y, t) from the action module
  bool skipped = false;    // kernel underflow
  bool ok = false;
};
struct LiYauReport {
  std::vector<LiYauPair> pairs;
  bool pass = false;
};

// Compares the kernel decay exponent with the action distance over a
// viscosity sweep.  `make_evolver` supplies the per-eps evolution.
LiYauReport liyau_check(const std::function<KernelEvolver(double)>& make_evolver,
                        const PathDomain& dom, const Profile& f,
                        std::span<const std::array<double, 3>> pairs,
                        std::span<const double> eps_list, double tol = 0.1);

struct L1ObsReport {
  std::vector<double> y_grid;
  std::vector<double> O_T;     // observed kernel mass over (0,T) x omega
  std::vector<double> I_s;     // kernel mass at time s
  double C = 0;                // max I_s / O_T
  double eps_log_C = 0;
  double gronwall_CT = 0;      // max_t ||u(t)||_1 / ||u(T)||_1 over the family
};

L1ObsReport l1_kernel_observability(const KernelEvolver& evolver, const Region1D& omega,
                                    double T, double s, int n_sources = 64,
                                    int n_times = 16);

}  // namespace viscobs

#endif
