#include "viscobs/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace viscobs {

namespace {

bool is_int(double x) { return std::floor(x) == x && std::abs(x) < 1e15; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int ScalarExpr::push(Node n) {
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size()) - 1;
}

int ScalarExpr::mk_const(double v) {
  Node n;
  n.op = Op::Const;
  n.value = v;
  return push(n);
}

int ScalarExpr::mk_var(int idx) {
  Node n;
  n.op = Op::Var;
  n.var = idx;
  return push(n);
}

int ScalarExpr::mk_un(Op op, int a) {
  const Node& na = nodes_[a];
  if (na.op == Op::Const) {
    switch (op) {
      case Op::Neg: return mk_const(-na.value);
      case Op::Sin: return mk_const(std::sin(na.value));
      case Op::Cos: return mk_const(std::cos(na.value));
      case Op::Exp: return mk_const(std::exp(na.value));
      case Op::Tanh: return mk_const(std::tanh(na.value));
      default: break;  // log/sqrt/tan/abs folded only when in-domain below
    }
    if (op == Op::Abs) return mk_const(std::abs(na.value));
    if (op == Op::Sqrt && na.value >= 0) return mk_const(std::sqrt(na.value));
    if (op == Op::Log && na.value > 0) return mk_const(std::log(na.value));
    if (op == Op::Tan) return mk_const(std::tan(na.value));
  }
  if (op == Op::Neg && na.op == Op::Neg) return na.a;
  Node n;
  n.op = op;
  n.a = a;
  return push(n);
}

int ScalarExpr::mk_bin(Op op, int a, int b) {
  const Node& na = nodes_[a];
  const Node& nb = nodes_[b];
  const bool ca = na.op == Op::Const, cb = nb.op == Op::Const;
  switch (op) {
    case Op::Add:
      if (ca && na.value == 0) return b;
      if (cb && nb.value == 0) return a;
      if (ca && cb) return mk_const(na.value + nb.value);
      break;
    case Op::Sub:
      if (cb && nb.value == 0) return a;
      if (ca && na.value == 0) return mk_un(Op::Neg, b);
      if (ca && cb) return mk_const(na.value - nb.value);
      break;
    case Op::Mul:
      if ((ca && na.value == 0) || (cb && nb.value == 0)) return mk_const(0.0);
      if (ca && na.value == 1) return b;
      if (cb && nb.value == 1) return a;
      if (ca && cb) return mk_const(na.value * nb.value);
      break;
    case Op::Div:
      if (ca && na.value == 0) return mk_const(0.0);
      if (cb && nb.value == 1) return a;
      if (ca && cb && nb.value != 0) return mk_const(na.value / nb.value);
      break;
    case Op::Pow:
      if (cb && nb.value == 1) return a;
      if (cb && nb.value == 0) return mk_const(1.0);
      if (ca && cb && (na.value > 0 || is_int(nb.value)))
        return mk_const(std::pow(na.value, nb.value));
      break;
    default:
      if (ca && cb) {
        if (op == Op::Min) return mk_const(std::min(na.value, nb.value));
        if (op == Op::Max) return mk_const(std::max(na.value, nb.value));
      }
      break;
  }
  Node n;
  n.op = op;
  n.a = a;
  n.b = b;
  return push(n);
}

int ScalarExpr::mk_smoothstep(int a, int b, int c) {
  Node n;
  n.op = Op::Smoothstep;
  n.a = a;
  n.b = b;
  n.c = c;
  return push(n);
}

// ---------------------------------------------------------------------------
// Parser: recursive descent.  Precedence ^ over * / over + -, ^ right
// associative and binding tighter than unary minus.

class ExprParser {
 public:
  ExprParser(std::string_view text, ScalarExpr& out)
      : text_(text), pos_(0), e_(out) {}

  int run() {
    int id = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input", pos_);
    return id;
  }

 private:
  std::string_view text_;
  std::size_t pos_;
  ScalarExpr& e_;

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, at);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'", pos_);
  }

  int parse_sum() {
    int lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = e_.mk_bin(ScalarExpr::Op::Add, lhs, parse_term());
      else if (accept('-'))
        lhs = e_.mk_bin(ScalarExpr::Op::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_factor();
    for (;;) {
      if (accept('*'))
        lhs = e_.mk_bin(ScalarExpr::Op::Mul, lhs, parse_factor());
      else if (accept('/'))
        lhs = e_.mk_bin(ScalarExpr::Op::Div, lhs, parse_factor());
      else
        return lhs;
    }
  }

  // factor := '-' factor | power;  power := primary ['^' factor]
  int parse_factor() {
    if (accept('-')) return e_.mk_un(ScalarExpr::Op::Neg, parse_factor());
    int base = parse_primary();
    if (accept('^')) return e_.mk_bin(ScalarExpr::Op::Pow, base, parse_factor());
    return base;
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (accept('(')) {
      int id = parse_sum();
      expect(')');
      return id;
    }
    fail("unexpected character", pos_);
  }

  int parse_number() {
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number", pos_);
    pos_ += static_cast<std::size_t>(end - begin);
    return e_.mk_const(v);
  }

  int parse_ident() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));

    if (peek('(')) return parse_call(name, start);

    if (name == "pi") return e_.mk_const(M_PI);
    if (name == "e") return e_.mk_const(M_E);
    for (std::size_t i = 0; i < e_.vars_.size(); ++i)
      if (e_.vars_[i] == name) return e_.mk_var(static_cast<int>(i));
    fail("unknown identifier '" + name + "'", start);
  }

  int parse_call(const std::string& name, std::size_t start) {
    using Op = ScalarExpr::Op;
    struct Fn { const char* name; Op op; int arity; };
    static const Fn table[] = {
        {"sin", Op::Sin, 1},   {"cos", Op::Cos, 1},   {"tan", Op::Tan, 1},
        {"exp", Op::Exp, 1},   {"log", Op::Log, 1},   {"sqrt", Op::Sqrt, 1},
        {"abs", Op::Abs, 1},   {"tanh", Op::Tanh, 1}, {"min", Op::Min, 2},
        {"max", Op::Max, 2},   {"smoothstep", Op::Smoothstep, 3},
    };
    const Fn* fn = nullptr;
    for (const Fn& f : table)
      if (name == f.name) fn = &f;
    if (!fn) fail("unknown function '" + name + "'", start);

    expect('(');
    std::vector<int> args;
    if (!peek(')')) {
      args.push_back(parse_sum());
      while (accept(',')) args.push_back(parse_sum());
    }
    expect(')');
    if (static_cast<int>(args.size()) != fn->arity)
      fail("function '" + name + "' expects " + std::to_string(fn->arity) +
               " argument(s), got " + std::to_string(args.size()),
           start);
    if (fn->arity == 1) return e_.mk_un(fn->op, args[0]);
    if (fn->arity == 2) return e_.mk_bin(fn->op, args[0], args[1]);
    return e_.mk_smoothstep(args[0], args[1], args[2]);
  }
};

ScalarExpr ScalarExpr::parse(std::string_view text, std::vector<std::string> variables) {
  if (text.empty()) throw ParseError("empty expression", 0);
  ScalarExpr e;
  e.vars_ = std::move(variables);
  e.source_ = std::string(text);
  ExprParser p(text, e);
  e.root_ = p.run();
  return e;
}

ScalarExpr ScalarExpr::constant(double value, std::vector<std::string> variables) {
  ScalarExpr e;
  e.vars_ = std::move(variables);
  e.root_ = e.mk_const(value);
  e.source_ = fmt(value);
  return e;
}

// ---------------------------------------------------------------------------
// Evaluation.  Nodes are in topological order (children precede parents), so
// a single forward sweep suffices.

double ScalarExpr::eval_impl(std::span<const double> args) const {
  double stack_buf[96];
  std::vector<double> heap_buf;
  double* v;
  if (nodes_.size() <= 96) {
    v = stack_buf;
  } else {
    heap_buf.resize(nodes_.size());
    v = heap_buf.data();
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    double r;
    switch (n.op) {
      case Op::Const: r = n.value; break;
      case Op::Var: r = args[static_cast<std::size_t>(n.var)]; break;
      case Op::Neg: r = -v[n.a]; break;
      case Op::Add: r = v[n.a] + v[n.b]; break;
      case Op::Sub: r = v[n.a] - v[n.b]; break;
      case Op::Mul: r = v[n.a] * v[n.b]; break;
      case Op::Div:
        if (v[n.b] == 0) throw DomainError("division by zero");
        r = v[n.a] / v[n.b];
        break;
      case Op::Pow: {
        double base = v[n.a], ex = v[n.b];
        if (base == 0 && ex < 0) throw DomainError("zero raised to a negative power");
        if (base < 0 && !is_int(ex)) throw DomainError("negative base with non-integer exponent");
        r = std::pow(base, ex);
        break;
      }
      case Op::Sin: r = std::sin(v[n.a]); break;
      case Op::Cos: r = std::cos(v[n.a]); break;
      case Op::Tan: r = std::tan(v[n.a]); break;
      case Op::Exp: r = std::exp(v[n.a]); break;
      case Op::Log:
        if (v[n.a] <= 0) throw DomainError("log of a nonpositive number");
        r = std::log(v[n.a]);
        break;
      case Op::Sqrt:
        if (v[n.a] < 0) throw DomainError("sqrt of a negative number");
        r = std::sqrt(v[n.a]);
        break;
      case Op::Abs: r = std::abs(v[n.a]); break;
      case Op::Tanh: r = std::tanh(v[n.a]); break;
      case Op::Min: r = std::min(v[n.a], v[n.b]); break;
      case Op::Max: r = std::max(v[n.a], v[n.b]); break;
      case Op::Smoothstep: {
        double a = v[n.a], b = v[n.b], s = v[n.c];
        if (b == a) throw DomainError("smoothstep with equal edges");
        double u = (s - a) / (b - a);
        u = std::min(std::max(u, 0.0), 1.0);
        r = u * u * (3.0 - 2.0 * u);
        break;
      }
    }
    if (!std::isfinite(r)) throw DomainError("non-finite value in evaluation");
    v[i] = r;
  }
  return v[static_cast<std::size_t>(root_)];
}

double ScalarExpr::eval(std::span<const double> args) const {
  if (args.size() != vars_.size())
    throw std::invalid_argument("eval: expected " + std::to_string(vars_.size()) +
                                " argument(s)");
  return eval_impl(args);
}

double ScalarExpr::eval(const std::map<std::string, double>& bindings) const {
  std::vector<double> args(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = bindings.find(vars_[i]);
    if (it == bindings.end()) throw std::invalid_argument("missing binding for '" + vars_[i] + "'");
    args[i] = it->second;
  }
  return eval_impl(args);
}

double ScalarExpr::operator()(double x) const {
  if (vars_.size() != 1)
    throw std::invalid_argument("operator(): expression is not single-variable");
  return eval_impl(std::span<const double>(&x, 1));
}

bool ScalarExpr::uses(std::string_view var) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i] == var) return node_uses(root_, static_cast<int>(i));
  return false;
}

int ScalarExpr::node_uses(int id, int var) const {
  if (id < 0) return 0;
  const Node& n = nodes_[id];
  if (n.op == Op::Var) return n.var == var;
  return node_uses(n.a, var) || node_uses(n.b, var) || node_uses(n.c, var);
}

// ---------------------------------------------------------------------------
// Symbolic differentiation.

int ScalarExpr::diff(int id, int var) {
  const Node n = nodes_[id];  // copy: nodes_ may reallocate
  switch (n.op) {
    case Op::Const: return mk_const(0.0);
    case Op::Var: return mk_const(n.var == var ? 1.0 : 0.0);
    case Op::Neg: return mk_un(Op::Neg, diff(n.a, var));
    case Op::Add: return mk_bin(Op::Add, diff(n.a, var), diff(n.b, var));
    case Op::Sub: return mk_bin(Op::Sub, diff(n.a, var), diff(n.b, var));
    case Op::Mul: {
      int da = diff(n.a, var), db = diff(n.b, var);
      return mk_bin(Op::Add, mk_bin(Op::Mul, da, n.b), mk_bin(Op::Mul, n.a, db));
    }
    case Op::Div: {
      int da = diff(n.a, var), db = diff(n.b, var);
      int num = mk_bin(Op::Sub, mk_bin(Op::Mul, da, n.b), mk_bin(Op::Mul, n.a, db));
      return mk_bin(Op::Div, num, mk_bin(Op::Mul, n.b, n.b));
    }
    case Op::Pow: {
      if (nodes_[n.b].op == Op::Const) {
        double p = nodes_[n.b].value;
        int inner = mk_bin(Op::Pow, n.a, mk_const(p - 1.0));
        return mk_bin(Op::Mul, mk_bin(Op::Mul, mk_const(p), inner), diff(n.a, var));
      }
      // u^v = exp(v log u):  (u^v)' = u^v (v' log u + v u'/u)
      int da = diff(n.a, var), db = diff(n.b, var);
      int t1 = mk_bin(Op::Mul, db, mk_un(Op::Log, n.a));
      int t2 = mk_bin(Op::Div, mk_bin(Op::Mul, n.b, da), n.a);
      return mk_bin(Op::Mul, id, mk_bin(Op::Add, t1, t2));
    }
    case Op::Sin: return mk_bin(Op::Mul, mk_un(Op::Cos, n.a), diff(n.a, var));
    case Op::Cos:
      return mk_bin(Op::Mul, mk_un(Op::Neg, mk_un(Op::Sin, n.a)), diff(n.a, var));
    case Op::Tan: {
      int c = mk_un(Op::Cos, n.a);
      return mk_bin(Op::Div, diff(n.a, var), mk_bin(Op::Mul, c, c));
    }
    case Op::Exp: return mk_bin(Op::Mul, id, diff(n.a, var));
    case Op::Log: return mk_bin(Op::Div, diff(n.a, var), n.a);
    case Op::Sqrt:
      return mk_bin(Op::Div, diff(n.a, var), mk_bin(Op::Mul, mk_const(2.0), id));
    case Op::Tanh: {
      int t2 = mk_bin(Op::Mul, id, id);
      return mk_bin(Op::Mul, mk_bin(Op::Sub, mk_const(1.0), t2), diff(n.a, var));
    }
    case Op::Abs:
      // |u|' = u' * u/|u|; domain error exactly at the kink.
      return mk_bin(Op::Mul, diff(n.a, var), mk_bin(Op::Div, n.a, id));
    case Op::Min:
    case Op::Max: {
      // min(u,v) = (u+v-|u-v|)/2, so
      // min' = (u'+v')/2 -+ sgn(u-v)(u'-v')/2 with sgn(w)=w/|w|.
      int da = diff(n.a, var), db = diff(n.b, var);
      int w = mk_bin(Op::Sub, n.a, n.b);
      int sgn = mk_bin(Op::Div, w, mk_un(Op::Abs, w));
      int sym = mk_bin(Op::Div, mk_bin(Op::Add, da, db), mk_const(2.0));
      int asym = mk_bin(Op::Div, mk_bin(Op::Mul, sgn, mk_bin(Op::Sub, da, db)), mk_const(2.0));
      return mk_bin(n.op == Op::Min ? Op::Sub : Op::Add, sym, asym);
    }
    case Op::Smoothstep: {
      if (node_uses(n.a, var) || node_uses(n.b, var))
        throw std::invalid_argument("smoothstep edges must not depend on the differentiation variable");
      // d/ds [u^2(3-2u)] = 6 u (1-u) u',  u = clamp((s-a)/(b-a), 0, 1).
      int t = mk_bin(Op::Div, mk_bin(Op::Sub, n.c, n.a), mk_bin(Op::Sub, n.b, n.a));
      int u = mk_bin(Op::Min, mk_bin(Op::Max, t, mk_const(0.0)), mk_const(1.0));
      int du = mk_bin(Op::Div, diff(n.c, var), mk_bin(Op::Sub, n.b, n.a));
      int fac = mk_bin(Op::Mul, mk_const(6.0), mk_bin(Op::Mul, u, mk_bin(Op::Sub, mk_const(1.0), u)));
      return mk_bin(Op::Mul, fac, du);
    }
  }
  throw std::logic_error("unreachable");
}

ScalarExpr ScalarExpr::derivative(std::string_view var) const {
  int vi = -1;
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i] == var) vi = static_cast<int>(i);
  if (vi < 0) throw std::invalid_argument("derivative: undeclared variable");
  ScalarExpr d = *this;
  d.root_ = d.diff(root_, vi);
  d.source_.clear();
  d.source_ = d.str();
  return d;
}

// ---------------------------------------------------------------------------
// Printing.  Parenthesization follows the parser's precedence so that
// parse(str()) reproduces an evaluation-equivalent tree.

void ScalarExpr::print(int id, std::string& out, int parent_prec, bool rhs) const {
  const Node& n = nodes_[id];
  auto call1 = [&](const char* name) {
    out += name;
    out += '(';
    print(n.a, out, 0, false);
    out += ')';
  };
  switch (n.op) {
    case Op::Const: {
      if (n.value < 0) {
        out += '(';
        out += fmt(n.value);
        out += ')';
      } else {
        out += fmt(n.value);
      }
      return;
    }
    case Op::Var: out += vars_[static_cast<std::size_t>(n.var)]; return;
    case Op::Neg: {
      bool need = parent_prec > 1;
      if (need) out += '(';
      out += '-';
      print(n.a, out, 3, true);  // operand binds like a power operand
      if (need) out += ')';
      return;
    }
    case Op::Add: case Op::Sub: {
      int prec = 1;
      bool need = parent_prec > prec || (parent_prec == prec && rhs);
      if (need) out += '(';
      print(n.a, out, prec, false);
      out += (n.op == Op::Add ? " + " : " - ");
      print(n.b, out, prec + (n.op == Op::Sub ? 1 : 0), true);
      if (need) out += ')';
      return;
    }
    case Op::Mul: case Op::Div: {
      int prec = 2;
      bool need = parent_prec > prec || (parent_prec == prec && rhs);
      if (need) out += '(';
      print(n.a, out, prec, false);
      out += (n.op == Op::Mul ? "*" : "/");
      print(n.b, out, prec + (n.op == Op::Div ? 1 : 0), true);
      if (need) out += ')';
      return;
    }
    case Op::Pow: {
      int prec = 3;
      bool need = parent_prec >= prec && !rhs;
      if (parent_prec > prec) need = true;
      if (need) out += '(';
      print(n.a, out, prec + 1, false);
      out += '^';
      print(n.b, out, prec, true);
      if (need) out += ')';
      return;
    }
    case Op::Sin: call1("sin"); return;
    case Op::Cos: call1("cos"); return;
    case Op::Tan: call1("tan"); return;
    case Op::Exp: call1("exp"); return;
    case Op::Log: call1("log"); return;
    case Op::Sqrt: call1("sqrt"); return;
    case Op::Abs: call1("abs"); return;
    case Op::Tanh: call1("tanh"); return;
    case Op::Min: case Op::Max: {
      out += (n.op == Op::Min ? "min(" : "max(");
      print(n.a, out, 0, false);
      out += ", ";
      print(n.b, out, 0, false);
      out += ')';
      return;
    }
    case Op::Smoothstep: {
      out += "smoothstep(";
      print(n.a, out, 0, false);
      out += ", ";
      print(n.b, out, 0, false);
      out += ", ";
      print(n.c, out, 0, false);
      out += ')';
      return;
    }
  }
}

std::string ScalarExpr::str() const {
  std::string out;
  print(root_, out, 0, false);
  return out;
}

}  // namespace viscobs
