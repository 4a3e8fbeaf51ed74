#ifndef VISCOBS_EXPR_HPP
#define VISCOBS_EXPR_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace viscobs {

// Thrown by the parser: carries the byte offset into the source text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset_)
      : std::runtime_error(msg + " (at offset " + std::to_string(offset_) + ")"),
        offset(offset_) {}
  std::size_t offset;
};

// Thrown at evaluation time when a value leaves the real domain
// (division by zero, log/sqrt of an invalid argument, non-finite result).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// A parsed closed-form expression over a declared list of real variables.
// Immutable after construction; eval() is pure and thread-safe.
class ScalarExpr {
 public:
  ScalarExpr() = default;

  // Grammar: numeric literals, declared variables, + - * / ^ (right-assoc),
  // unary -, parentheses, constants pi and e, and the functions
  // sin cos tan exp log sqrt abs tanh min max smoothstep.
  static ScalarExpr parse(std::string_view text,
                          std::vector<std::string> variables);

  // Builds the constant expression `value` over the given variable list.
  static ScalarExpr constant(double value, std::vector<std::string> variables);

  double eval(std::span<const double> args) const;
  double eval(const std::map<std::string, double>& bindings) const;
  // Single-variable convenience.
  double operator()(double x) const;

  // Exact symbolic derivative, structurally simplified.
  ScalarExpr derivative(std::string_view var) const;

  std::string str() const;
  const std::vector<std::string>& variables() const { return vars_; }
  const std::string& source() const { return source_; }
  bool uses(std::string_view var) const;
  bool empty() const { return nodes_.empty(); }

 private:
  enum class Op : std::uint8_t {
    Const, Var, Neg, Add, Sub, Mul, Div, Pow,
    Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Tanh,
    Min, Max, Smoothstep
  };
  struct Node {
    Op op;
    double value = 0.0;  // Const payload
    int a = -1, b = -1, c = -1;
    int var = -1;        // Var payload: index into vars_
  };

  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<std::string> vars_;
  std::string source_;

  int push(Node n);
  int mk_const(double v);
  int mk_var(int idx);
  int mk_un(Op op, int a);
  int mk_bin(Op op, int a, int b);
  int mk_smoothstep(int a, int b, int c);
  int node_uses(int id, int var) const;
  int diff(int id, int var);
  double eval_impl(std::span<const double> args) const;
  void print(int id, std::string& out, int parent_prec, bool rhs) const;

  friend class ExprParser;
};

}  // namespace viscobs

#endif
