#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "kn/symbolic/expr.hpp"
#include "kn/symbolic/multi_index.hpp"

namespace kn::sym {

// Parses an infix expression in variables x1..xn (grammar in docs/grammar.md).
Expr parse(std::string_view text, int n);

// One summand `coef * D[a1,...,an]` (or `d[...]`) of an operator text.
struct OperatorTerm {
  MultiIndex alpha;
  Expr coefficient;
  bool d_form = true;  // true for D = -i d, false for plain partials
};

std::vector<OperatorTerm> parse_operator_terms(std::string_view text, int n);

}  // namespace kn::sym
