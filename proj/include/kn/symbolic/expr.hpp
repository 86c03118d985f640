#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kn::sym {

using Complex = std::complex<double>;

// Variable ids: 0..n-1 are x1..xn, kRho is the auxiliary integration variable.
inline constexpr int kRho = -1;

enum class Kind { Const, Var, Add, Mul, Pow, Func, Bump };
enum class Fn { Exp, Log, Sin, Cos };

class Node;
using Expr = std::shared_ptr<const Node>;

// Immutable expression node. Build through the factory functions below.
class Node {
 public:
  Kind kind = Kind::Const;
  Complex value{};       // Const
  int var = 0;           // Var
  double exponent = 0;   // Pow (base is args[0])
  Fn fn = Fn::Exp;       // Func
  double sigma = 0;      // Bump: profile parameter
  int order = 0;         // Bump: derivative order
  std::vector<Expr> args;
};

// Raw factories. They flatten nested sums/products and fold constant
// operands, but do not collect like terms (see simplify).
Expr constant(Complex c);
Expr variable(int id);
Expr rho();
Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr power(Expr base, double exponent);
Expr func(Fn fn, Expr arg);
// k-th derivative of the Gevrey profile h(s) = exp(1 - (1-s)^(-1/(sigma-1))), 0 for s >= 1.
Expr bump(double sigma, int order, Expr arg);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);

bool is_const(const Expr& e);
bool is_zero(const Expr& e);
// Structural total order; 0 means structurally equal.
int compare(const Expr& a, const Expr& b);
bool same(const Expr& a, const Expr& b);

// Largest x-variable index + 1 (0 for expressions without x variables).
int dimension(const Expr& e);
bool depends_on(const Expr& e, int var);
std::size_t node_count(const Expr& e);
// Number of top-level summands.
std::size_t term_count(const Expr& e);

std::string to_string(const Expr& e);
std::string format_number(double v);

struct SimplifyOptions {
  bool expand = true;
  std::size_t term_budget = 1'000'000;
};

Expr simplify(const Expr& e, const SimplifyOptions& opts = {});
// Exact derivative, returned simplified.
Expr differentiate(const Expr& e, int var, const SimplifyOptions& opts = {});
Expr substitute(const Expr& e, int var, const Expr& value);

// Coefficients of a polynomial in one variable: result[p] multiplies var^p.
// Throws ParameterError if e is not polynomial in var with nonnegative integer powers.
std::vector<Expr> polynomial_coefficients(const Expr& e, int var);

struct Point {
  std::span<const double> x;
  double rho = 0.0;
};

Complex eval(const Expr& e, const Point& p);
Complex eval(const Expr& e, std::span<const double> x);

// h^(k)(s) for the Gevrey profile used by `bump`.
double gevrey_profile(double sigma, int order, double s);

// Flattened evaluator for repeated evaluation of one expression (shared
// subtrees are evaluated once).
class Compiled {
 public:
  explicit Compiled(const Expr& e);
  Complex operator()(const Point& p) const;
  Complex operator()(const Point& p, std::vector<Complex>& scratch) const;
  std::size_t size() const { return code_.size(); }

 private:
  struct Instr {
    Kind kind;
    Fn fn;
    int var;
    double real;
    int order;
    Complex value;
    std::vector<int> in;
    const Node* node;
  };
  Expr root_;
  std::vector<Instr> code_;
};

}  // namespace kn::sym
