#ifndef VISCOBS_AGMON_HPP
#define VISCOBS_AGMON_HPP

#include <vector>

#include "viscobs/geometry.hpp"

namespace viscobs {

enum class AgmonTopology { Interval, Circle, Grid2d };

// Distance to the classically allowed region {V <= E} in the degenerate
// metric sqrt((V-E)_+) ds, plus the weight W = d_A + f/2.
struct AgmonField {
  AgmonTopology topology = AgmonTopology::Interval;
  double E = 0.0;
  std::vector<double> grid;        // matches the potential grid (1D)
  std::vector<double> d_A;
  std::vector<double> W;           // filled by weight_W
  std::vector<char> allowed;       // K_E mask on the grid
  bool has_W = false;

  // 1D bookkeeping for off-grid queries
  double s_lo = 0.0, s_hi = 0.0;
  std::vector<double> phi;         // cumulative metric integral at grid nodes
  std::vector<double> boundary_phi;  // phi at K_E component boundaries
  double phi_total = 0.0;          // full-circle integral (Circle topology)
  double d_A_lo = 0.0, d_A_hi = 0.0;  // endpoint values (may be +inf at poles)
  double W_lo = 0.0, W_hi = 0.0;

  double W_min = 0.0;              // global min of W over grid and endpoints
  double W_argmin = 0.0;

  // 2D lattice (Grid2d topology)
  int nx = 0, ny = 0;
  double lo2[2] = {0, 0};
  double h2 = 0.0;

  // Evaluates d_A at an arbitrary abscissa (1D topologies).
  double dA_at(double s) const;
  double W_at(double s) const;     // requires has_W
  // min of W over the closed region (1D); uses endpoint interpolation.
  double W_min_over(const Region1D& region) const;
};

// Cumulative adaptive Simpson quadrature of sqrt((V-E)_+) outward from each
// connected component of K_E; Circle topology takes the min over the two arc
// directions.
AgmonField agmon_distance_1d(const PotentialField& pot, double E, AgmonTopology topology);

// First-order upwind fast marching for |grad d| = sqrt((V-E)_+), d = 0 on K_E.
// Heap ties break by lexicographic cell index.
AgmonField agmon_distance_grid(const PotentialField2D& pot, double E);

// Fills W = d_A + f/2 pointwise (bitwise W - d_A == f/2 on the shared grid)
// and the recorded minima.
void weight_W(AgmonField& field, const Profile& f);

}  // namespace viscobs

#endif
