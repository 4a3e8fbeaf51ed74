#ifndef VISCOBS_GEOMETRY_HPP
#define VISCOBS_GEOMETRY_HPP

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "viscobs/expr.hpp"

namespace viscobs {

enum class DomainCase { Sphere, Disk, Cylinder, Torus, Interval, Circle, Box2d };

const char* domain_case_name(DomainCase c);
std::optional<DomainCase> domain_case_from_name(const std::string& name);

// A scalar function of arclength with first and second derivatives.  Either
// fully symbolic, or given by its derivative with values recovered by
// cumulative quadrature (profiles whose antiderivative has no closed form).
class Profile {
 public:
  Profile();  // the zero function
  static Profile from_expr(ScalarExpr f);
  static Profile from_derivative(ScalarExpr fprime, double s_lo, double s_hi,
                                 double offset = 0.0);

  double f(double s) const;
  double fp(double s) const;
  double fpp(double s) const;

  // Same function shifted by a constant: f + C.
  Profile shifted(double C) const;

  bool symbolic() const { return symbolic_; }
  const ScalarExpr& fprime_expr() const { return fp_; }

 private:
  bool symbolic_ = true;
  ScalarExpr f_, fp_, fpp_;
  double offset_ = 0.0;
  // Cumulative-integral anchors for the derivative-given case.
  double lo_ = 0.0, hi_ = 0.0;
  std::shared_ptr<const std::vector<double>> anchors_;
  double anchor_dx_ = 0.0;
};

// Additively separable function on a 2D box: f(x1,x2) = f1(x1) + f1(x2),
// or fully symbolic in (x1, x2).
class Profile2D {
 public:
  static Profile2D from_expr(ScalarExpr f);            // variables x1, x2
  static Profile2D separable(Profile per_coordinate);
  double f(double x, double y) const;
  void grad(double x, double y, double& gx, double& gy) const;
  double grad_sq(double x, double y) const;

 private:
  bool separable_ = false;
  Profile f1_;
  ScalarExpr f_, fx_, fy_;
};

struct GeometryConfig {
  DomainCase kind = DomainCase::Interval;
  double L = 0.0;                    // meridian length (revolution cases)
  double s_lo = 0.0, s_hi = 0.0;     // explicit range (flat 1D cases)
  bool has_range = false;
  std::string R_text;                // profile expression in s
  int grid_n = 0;                    // number of cells
  double box_lo[2] = {0, 0}, box_hi[2] = {0, 0};
  int box_n = 0;                     // nodes per side (2D)
};

struct SurfaceSpec {
  DomainCase kind = DomainCase::Interval;
  double s_lo = 0.0, s_hi = 0.0;
  int grid_n = 0;
  double dx = 0.0;
  std::vector<double> grid;          // cell centers, poles excluded
  ScalarExpr R, Rp;                  // revolution profile and derivative
  bool has_profile = false;
  bool pole_lo = false, pole_hi = false;
  bool dirichlet_lo = false, dirichlet_hi = false;
  bool periodic = false;
  // 2D box lattice (node-centered, boundary included)
  double lo2[2] = {0, 0}, hi2[2] = {0, 0};
  int n2[2] = {0, 0};
  double h2 = 0.0;

  double length() const { return s_hi - s_lo; }
  bool is_revolution() const { return has_profile; }
  bool is_1d() const { return kind != DomainCase::Box2d; }
  double radius(double s) const;       // R(s); 1 on flat domains
  double radius_deriv(double s) const;
  // Wraps s into [s_lo, s_hi) on periodic domains.
  double wrap(double s) const;
  // Distance between two abscissas (period-aware).
  double dist(double a, double b) const;
};

// Validates the case invariants (pole behavior of R, positivity, torus
// periodicity) by sampled Richardson extrapolation and builds the grid.
SurfaceSpec build_surface(const GeometryConfig& config);

// Union of closed s-intervals (1D observation regions).
struct Region1D {
  std::vector<std::pair<double, double>> intervals;
  bool contains(double s) const;
  double distance(double s) const;   // 0 inside
  bool empty() const { return intervals.empty(); }
  // Complement within [lo, hi] (or of the circle of that extent if periodic).
  std::vector<std::pair<double, double>> complement(double lo, double hi,
                                                    bool periodic) const;
};

// Union of axis-aligned boxes [x0,x1]x[y0,y1] (2D observation regions).
struct Region2D {
  std::vector<std::array<double, 4>> boxes;
  bool contains(double x, double y) const;
};

struct PotentialField {
  std::vector<double> grid;
  std::vector<double> values;
  double c = 0.0;
  double E_ref = 0.0;
  double s_min = 0.0;
  double V_min = 0.0;
  bool unique_min = false;
  bool periodic = false;
  double s_lo = 0.0, s_hi = 0.0;
  std::function<double(double)> eval;  // V as a continuous function
};

struct EnergyChoice {
  bool bottom = true;
  double value = 0.0;
  static EnergyChoice Bottom() { return {true, 0.0}; }
  static EnergyChoice Value(double E) { return {false, E}; }
};

// V_c(s) = c^2/R(s)^2 + |f'(s)|^2/4 on revolution cases, |f'|^2/4 on flat
// 1D domains.  Locates the minimum by global scan plus golden-section
// refinement and decides whether it is unique.
PotentialField effective_potential(const SurfaceSpec& spec, const Profile& f,
                                   double c, EnergyChoice E = EnergyChoice::Bottom());

struct PotentialField2D {
  int nx = 0, ny = 0;
  double lo[2] = {0, 0};
  double h = 0.0;
  std::vector<double> values;  // row-major: j*nx + i
  double x_min[2] = {0, 0};
  double V_min = 0.0;
  double E_ref = 0.0;
  bool unique_min = false;
  std::function<double(double, double)> eval;
  double x_at(int i) const { return lo[0] + i * h; }
  double y_at(int j) const { return lo[1] + j * h; }
};

PotentialField2D effective_potential_2d(const SurfaceSpec& spec, const Profile2D& f,
                                        EnergyChoice E = EnergyChoice::Bottom());

}  // namespace viscobs

#endif
