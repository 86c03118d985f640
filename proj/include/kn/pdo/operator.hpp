#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kn/box.hpp"
#include "kn/symbolic/expr.hpp"
#include "kn/symbolic/multi_index.hpp"

namespace kn::pdo {

using sym::Complex;
using sym::Expr;
using sym::MultiIndex;
using Coefficients = std::map<MultiIndex, Expr, sym::GradedDescending>;

// Sum of a_alpha(x) d^alpha, stored with plain partial derivatives. The
// D = -i d form is only used for input and output.
class LinearPDO {
 public:
  LinearPDO() = default;
  // Coefficients are simplified; zero ones are dropped.
  LinearPDO(int n, const Coefficients& partial, const sym::SimplifyOptions& opts = {});

  static LinearPDO identity(int n);
  static LinearPDO from_d_form(int n, const Coefficients& d_coefficients);
  // `coef*D[a1,...,an] + ...`; d[...] terms are read as plain partials.
  static LinearPDO parse(std::string_view text, int n);

  int dimension() const { return n_; }
  int order() const { return order_; }
  bool is_zero() const { return coef_.empty(); }
  bool is_constant_coefficient() const;
  const Coefficients& partial_coefficients() const { return coef_; }
  Coefficients d_coefficients() const;
  // d-form coefficient of alpha, zero if absent.
  Expr coefficient(const MultiIndex& alpha) const;
  // Total number of summands over all coefficients.
  std::size_t term_count() const;
  // Parseable text, D-form by default.
  std::string to_string(bool d_form = true) const;

 private:
  int n_ = 0;
  int order_ = 0;
  Coefficients coef_;
};

bool same(const LinearPDO& a, const LinearPDO& b);

Expr apply(const LinearPDO& p, const Expr& f, const sym::SimplifyOptions& opts = {});
LinearPDO compose(const LinearPDO& p, const LinearPDO& q, const sym::SimplifyOptions& opts = {});
// p^q by repeated composition; ResourceError("term_budget") when a step exceeds the budget.
LinearPDO iterate(const LinearPDO& p, int q, const sym::SimplifyOptions& opts = {});

// Order-m part of p.
LinearPDO principal_part(const LinearPDO& p);

struct SymbolValue {
  std::vector<double> x, xi;
  Complex value;
};

// sum_{|alpha|=m} a^D_alpha(x) xi^alpha.
Complex principal_symbol(const LinearPDO& p, std::span<const double> x, std::span<const double> xi);
SymbolValue symbol_at(const LinearPDO& p, std::span<const double> x, std::span<const double> xi);

// Directions used for sampling the unit sphere; coordinate axes are always included.
std::vector<std::vector<double>> sphere_directions(int n, int count, std::uint64_t seed = 1);
int minimum_sphere_samples(int n);

struct EllipticityOptions {
  int x_samples = 5;       // per axis, at least 5
  int sphere_samples = 0;  // 0 selects the minimum for the dimension
  double threshold = 1e-9; // relative to the largest sampled |P_m|
  std::uint64_t seed = 1;
};

// Sampled verdict, not a proof.
struct EllipticityVerdict {
  bool elliptic = false;
  double c_min = 0;
  double max_symbol = 0;
  double threshold = 0;  // absolute threshold used
  std::vector<double> witness_x, witness_xi;
  std::size_t samples = 0;
};

EllipticityVerdict ellipticity_check(const LinearPDO& p, const Box& k, const EllipticityOptions& opts = {});

}  // namespace kn::pdo
