#include "viscobs/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace viscobs {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Value {
  enum Kind { Number, String, List, Word } kind;
  double number = 0;
  std::string text;
  std::vector<double> list;
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw std::runtime_error((origin.empty() ? "scenario" : origin) + ":" +
                           std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

Value parse_value(const std::string& origin, int line, const std::string& raw) {
  Value v;
  std::string s = trim(raw);
  if (s.empty()) fail(origin, line, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(origin, line, "unterminated string");
    v.kind = Value::String;
    v.text = s.substr(1, s.size() - 2);
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']') fail(origin, line, "unterminated list");
    v.kind = Value::List;
    std::string body = s.substr(1, s.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        std::size_t used = 0;
        v.list.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (...) {
        fail(origin, line, "malformed list item '" + item + "'");
      }
    }
    return v;
  }
  // number?
  try {
    std::size_t used = 0;
    v.number = std::stod(s, &used);
    if (used == s.size()) {
      v.kind = Value::Number;
      return v;
    }
  } catch (...) {
  }
  v.kind = Value::Word;
  v.text = s;
  return v;
}

std::vector<std::string> word_list(const std::string& origin, int line,
                                   const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty() || s.front() != '[' || s.back() != ']')
    fail(origin, line, "expected a bracketed list");
  std::vector<std::string> out;
  std::stringstream ss(s.substr(1, s.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
  Scenario sc;
  sc.analyses.clear();
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  bool have_grid_n = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(origin, line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      const char* known[] = {"geometry", "fields", "observation", "sweep",
                             "flow",     "kernel", "run",         "predictions"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok) fail(origin, line, "unknown section [" + section + "]");
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail(origin, line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string rhs = trim(s.substr(eq + 1));
    if (section.empty()) fail(origin, line, "key outside of any section");

    if (section == "predictions") {
      // name = kind expected tol
      std::stringstream ss(rhs);
      Scenario::Prediction p;
      p.key = key;
      ss >> p.kind >> p.expected >> p.tol;
      if (ss.fail() || (p.kind != "abs" && p.kind != "ge" && p.kind != "le"))
        fail(origin, line, "prediction must be '<name> = abs|ge|le <expected> <tol>'");
      sc.predictions.push_back(p);
      continue;
    }

    Value v = parse_value(origin, line, rhs);
    auto need_number = [&]() -> double {
      if (v.kind != Value::Number) fail(origin, line, "'" + key + "' expects a number");
      return v.number;
    };
    auto need_string = [&]() -> std::string {
      if (v.kind != Value::String)
        fail(origin, line, "'" + key + "' expects a quoted expression");
      return v.text;
    };
    auto need_list = [&]() -> std::vector<double> {
      if (v.kind != Value::List) fail(origin, line, "'" + key + "' expects a list");
      return v.list;
    };

    if (section == "geometry") {
      if (key == "case") {
        if (v.kind != Value::Word) fail(origin, line, "'case' expects a name");
        auto c = domain_case_from_name(v.text);
        if (!c) fail(origin, line, "unknown case '" + v.text + "'");
        sc.geometry.kind = *c;
      } else if (key == "L") {
        sc.geometry.L = need_number();
      } else if (key == "range") {
        auto r = need_list();
        if (r.size() != 2) fail(origin, line, "'range' expects [lo, hi]");
        sc.geometry.s_lo = r[0];
        sc.geometry.s_hi = r[1];
        sc.geometry.has_range = true;
        sc.geometry.L = r[1] - r[0];
      } else if (key == "R") {
        sc.geometry.R_text = need_string();
      } else if (key == "grid_n") {
        sc.geometry.grid_n = static_cast<int>(need_number());
        have_grid_n = true;
      } else if (key == "box") {
        auto b = need_list();
        if (b.size() != 4) fail(origin, line, "'box' expects [x0, y0, x1, y1]");
        sc.geometry.box_lo[0] = b[0];
        sc.geometry.box_lo[1] = b[1];
        sc.geometry.box_hi[0] = b[2];
        sc.geometry.box_hi[1] = b[3];
      } else if (key == "box_n") {
        sc.geometry.box_n = static_cast<int>(need_number());
      } else {
        fail(origin, line, "unknown geometry key '" + key + "'");
      }
    } else if (section == "fields") {
      if (key == "f") sc.f_text = need_string();
      else if (key == "fprime") sc.fprime_text = need_string();
      else if (key == "q") sc.q_text = need_string();
      else if (key == "c") sc.c = need_number();
      else if (key == "drop_qf") sc.drop_qf = need_number() != 0;
      else fail(origin, line, "unknown fields key '" + key + "'");
    } else if (section == "observation") {
      if (key == "omega") {
        sc.omega_intervals = need_list();
        if (sc.omega_intervals.size() % 2 != 0)
          fail(origin, line, "'omega' expects interval pairs");
      } else if (key == "omega_boxes") {
        sc.omega_boxes = need_list();
        if (sc.omega_boxes.size() % 4 != 0)
          fail(origin, line, "'omega_boxes' expects quadruples");
      } else if (key == "boundary") {
        if (v.kind != Value::Word ||
            (v.text != "none" && v.text != "lo" && v.text != "hi" && v.text != "both"))
          fail(origin, line, "'boundary' expects none|lo|hi|both");
        sc.boundary_obs = v.text;
      } else {
        fail(origin, line, "unknown observation key '" + key + "'");
      }
    } else if (section == "sweep") {
      if (key == "epsilons") sc.epsilons = need_list();
      else if (key == "ks") {
        sc.ks.clear();
        for (double x : need_list()) sc.ks.push_back(static_cast<int>(x));
      } else if (key == "Ts") sc.Ts = need_list();
      else if (key == "delta_fit") sc.delta_fit = need_number();
      else if (key == "n_modes") sc.n_modes = static_cast<int>(need_number());
      else fail(origin, line, "unknown sweep key '" + key + "'");
    } else if (section == "flow") {
      if (key == "T_cap") sc.T_cap = need_number();
      else if (key == "condition") {
        if (v.kind != Value::Word ||
            (v.text != "auto" && v.text != "gcc" && v.text != "fc"))
          fail(origin, line, "'condition' expects auto|gcc|fc");
        sc.flow_condition = v.text;
      } else fail(origin, line, "unknown flow key '" + key + "'");
    } else if (section == "kernel") {
      if (key == "t_factors") sc.kernel_t_factors = need_list();
      else if (key == "liyau_pairs") sc.liyau_pairs = need_list();
      else if (key == "sources") sc.kernel_sources = static_cast<int>(need_number());
      else fail(origin, line, "unknown kernel key '" + key + "'");
    } else if (section == "run") {
      if (key == "analyses") {
        sc.analyses.clear();
        for (const auto& w : word_list(origin, line, rhs)) {
          if (w != "flow" && w != "agmon" && w != "spectral" && w != "observability" &&
              w != "kernel")
            fail(origin, line, "unknown analysis '" + w + "'");
          sc.analyses.push_back(w);
        }
      } else if (key == "name") {
        if (v.kind != Value::Word && v.kind != Value::String)
          fail(origin, line, "'name' expects a word");
        sc.name = v.kind == Value::Word ? v.text : v.text;
      } else if (key == "seed") {
        sc.seed = static_cast<std::uint64_t>(need_number());
      } else {
        fail(origin, line, "unknown run key '" + key + "'");
      }
    }
  }

  // global validation
  if (sc.geometry.kind != DomainCase::Box2d && !have_grid_n)
    fail(origin, line, "missing grid_n");
  if (sc.geometry.kind != DomainCase::Box2d && sc.geometry.grid_n < 64)
    fail(origin, line, "grid_n must be at least 64");
  if (sc.f_text.empty() && sc.fprime_text.empty())
    fail(origin, line, "fields must set f or fprime");
  if (!sc.f_text.empty() && !sc.fprime_text.empty())
    fail(origin, line, "set only one of f and fprime");
  for (double e : sc.epsilons)
    if (e < 0.02) fail(origin, line, "viscosities below the 0.02 floor");
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Scenario sc = parse_scenario_text(ss.str(), path);
  if (sc.name == "scenario") {
    // default the name to the file stem
    std::string stem = path;
    auto slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    auto dot = stem.find_last_of('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    sc.name = stem;
  }
  return sc;
}

std::string scenario_to_text(const Scenario& s) {
  std::ostringstream out;
  out << "[geometry]\n";
  out << "case = " << domain_case_name(s.geometry.kind) << "\n";
  if (s.geometry.kind == DomainCase::Box2d) {
    out << "box = [" << fmt(s.geometry.box_lo[0]) << ", " << fmt(s.geometry.box_lo[1])
        << ", " << fmt(s.geometry.box_hi[0]) << ", " << fmt(s.geometry.box_hi[1])
        << "]\n";
    out << "box_n = " << s.geometry.box_n << "\n";
  } else {
    if (s.geometry.has_range)
      out << "range = [" << fmt(s.geometry.s_lo) << ", " << fmt(s.geometry.s_hi) << "]\n";
    else
      out << "L = " << fmt(s.geometry.L) << "\n";
    if (!s.geometry.R_text.empty()) out << "R = \"" << s.geometry.R_text << "\"\n";
    out << "grid_n = " << s.geometry.grid_n << "\n";
  }
  out << "\n[fields]\n";
  if (!s.f_text.empty()) out << "f = \"" << s.f_text << "\"\n";
  if (!s.fprime_text.empty()) out << "fprime = \"" << s.fprime_text << "\"\n";
  out << "q = \"" << s.q_text << "\"\n";
  out << "c = " << fmt(s.c) << "\n";
  if (s.drop_qf) out << "drop_qf = 1\n";
  out << "\n[observation]\n";
  auto print_list = [&](const char* key, const std::vector<double>& v) {
    out << key << " = [";
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << fmt(v[i]);
    out << "]\n";
  };
  if (!s.omega_intervals.empty()) print_list("omega", s.omega_intervals);
  if (!s.omega_boxes.empty()) print_list("omega_boxes", s.omega_boxes);
  out << "boundary = " << s.boundary_obs << "\n";
  out << "\n[sweep]\n";
  if (!s.epsilons.empty()) print_list("epsilons", s.epsilons);
  if (!s.ks.empty()) {
    out << "ks = [";
    for (std::size_t i = 0; i < s.ks.size(); ++i) out << (i ? ", " : "") << s.ks[i];
    out << "]\n";
  }
  if (!s.Ts.empty()) print_list("Ts", s.Ts);
  out << "delta_fit = " << fmt(s.delta_fit) << "\n";
  out << "n_modes = " << s.n_modes << "\n";
  out << "\n[flow]\n";
  out << "T_cap = " << fmt(s.T_cap) << "\n";
  out << "condition = " << s.flow_condition << "\n";
  if (!s.kernel_t_factors.empty() || !s.liyau_pairs.empty()) {
    out << "\n[kernel]\n";
    if (!s.kernel_t_factors.empty()) print_list("t_factors", s.kernel_t_factors);
    if (!s.liyau_pairs.empty()) print_list("liyau_pairs", s.liyau_pairs);
    out << "sources = " << s.kernel_sources << "\n";
  }
  out << "\n[run]\n";
  out << "name = " << s.name << "\n";
  out << "analyses = [";
  for (std::size_t i = 0; i < s.analyses.size(); ++i)
    out << (i ? ", " : "") << s.analyses[i];
  out << "]\n";
  out << "seed = " << s.seed << "\n";
  if (!s.predictions.empty()) {
    out << "\n[predictions]\n";
    for (const auto& p : s.predictions)
      out << p.key << " = " << p.kind << " " << fmt(p.expected) << " " << fmt(p.tol)
          << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// derived helpers

SurfaceSpec Scenario::make_surface() const { return build_surface(geometry); }

Profile Scenario::make_f() const {
  if (!f_text.empty()) return Profile::from_expr(ScalarExpr::parse(f_text, {"s"}));
  double lo = geometry.has_range ? geometry.s_lo : 0.0;
  double hi = geometry.has_range ? geometry.s_hi : geometry.L;
  return Profile::from_derivative(ScalarExpr::parse(fprime_text, {"s"}), lo, hi);
}

Profile2D Scenario::make_f2d() const {
  if (geometry.kind != DomainCase::Box2d)
    throw std::logic_error("make_f2d on a non-2D scenario");
  if (!f_text.empty())
    return Profile2D::from_expr(ScalarExpr::parse(f_text, {"x1", "x2"}));
  // separable: fprime is the per-coordinate derivative
  double lo = geometry.box_lo[0], hi = geometry.box_hi[0];
  return Profile2D::separable(
      Profile::from_derivative(ScalarExpr::parse(fprime_text, {"s"}), lo, hi));
}

ScalarExpr Scenario::make_q() const { return ScalarExpr::parse(q_text, {"s"}); }

Region1D Scenario::omega_region() const {
  Region1D r;
  for (std::size_t i = 0; i + 1 < omega_intervals.size(); i += 2)
    r.intervals.push_back({omega_intervals[i], omega_intervals[i + 1]});
  return r;
}

Region2D Scenario::omega_region_2d() const {
  Region2D r;
  for (std::size_t i = 0; i + 3 < omega_boxes.size(); i += 4)
    r.boxes.push_back({omega_boxes[i], omega_boxes[i + 1], omega_boxes[i + 2],
                       omega_boxes[i + 3]});
  return r;
}

std::vector<double> Scenario::eps_list() const {
  if (!epsilons.empty()) return epsilons;
  std::vector<double> out;
  double cc = c > 0 ? c : 1.0;
  for (int k : ks) out.push_back(cc / k);
  return out;
}

}  // namespace viscobs
