#pragma once

#include <map>

#include "kn/symbolic/expr.hpp"
#include "kn/symbolic/multi_index.hpp"

namespace kn::sym {

// d^alpha f for many alpha, each built from a cached lower derivative.
class DerivativeCache {
 public:
  DerivativeCache(Expr f, SimplifyOptions opts = {}) : root_(std::move(f)), opts_(opts) {}

  const Expr& get(const MultiIndex& alpha) {
    if (auto it = cache_.find(alpha); it != cache_.end()) return it->second;
    if (alpha.order() == 0) return cache_.emplace(alpha, root_).first->second;
    std::size_t axis = 0;
    while (alpha[axis] == 0) ++axis;
    MultiIndex lower = alpha;
    --lower[axis];
    Expr d = differentiate(get(lower), static_cast<int>(axis), opts_);
    return cache_.emplace(alpha, std::move(d)).first->second;
  }

 private:
  Expr root_;
  SimplifyOptions opts_;
  std::map<MultiIndex, Expr> cache_;
};

}  // namespace kn::sym
