#ifndef VISCOBS_SCENARIO_HPP
#define VISCOBS_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "viscobs/geometry.hpp"

namespace viscobs {

// A scenario file: bracketed sections of key = value lines.  Values are
// numbers, quoted expression strings, or bracketed numeric lists.  Unknown
// sections or keys are rejected with the offending line number.
struct Scenario {
  std::string name = "scenario";

  GeometryConfig geometry;

  // fields
  std::string f_text;        // exactly one of f_text / fprime_text is set
  std::string fprime_text;
  std::string q_text = "0";
  double c = 0.0;
  bool drop_qf = false;

  // observation
  std::vector<double> omega_intervals;  // flattened [a0,b0, a1,b1, ...]
  std::vector<double> omega_boxes;      // flattened [x0,y0,x1,y1, ...]
  std::string boundary_obs = "none";    // none | lo | hi | both

  // sweep
  std::vector<double> epsilons;  // explicit viscosity list, or
  std::vector<int> ks;           // mode list with eps_k = c/k
  std::vector<double> Ts;
  double delta_fit = 0.1;
  int n_modes = 64;

  // flow
  double T_cap = 50.0;
  std::string flow_condition = "auto";  // auto | gcc | fc

  // kernel
  std::vector<double> kernel_t_factors;   // multiples of the reference time
  std::vector<double> liyau_pairs;        // flattened (x, y, t) triples
  int kernel_sources = 48;

  // run
  std::vector<std::string> analyses;
  std::uint64_t seed = 12345;

  struct Prediction {
    std::string key;           // name of a report scalar
    std::string kind;          // abs | ge | le
    double expected = 0.0;
    double tol = 0.0;
  };
  std::vector<Prediction> predictions;

  // derived helpers
  SurfaceSpec make_surface() const;
  Profile make_f() const;                    // meridian/1D field
  Profile2D make_f2d() const;                // box2d field
  ScalarExpr make_q() const;
  Region1D omega_region() const;
  Region2D omega_region_2d() const;
  std::vector<double> eps_list() const;      // from epsilons or c/k
};

Scenario parse_scenario_text(const std::string& text, const std::string& origin = "");
Scenario load_scenario_file(const std::string& path);
std::string scenario_to_text(const Scenario& s);

// Built-in scenario constructions (profiles with the documented parameter
// ranges baked in).  Throws on unknown names or out-of-range parameters.
Scenario named_scenario(const std::string& name,
                        const std::map<std::string, double>& params = {});
std::vector<std::string> builtin_scenario_names();

}  // namespace viscobs

#endif
