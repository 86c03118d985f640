#pragma once

#include <vector>

#include "kn/box.hpp"
#include "kn/kernels/kernels.hpp"
#include "kn/symbolic/expr.hpp"

namespace kn::analysis {

// Composite Simpson rule with an odd node count per axis.
struct QuadratureGrid {
  std::vector<int> nodes;
  int level = 0;

  static QuadratureGrid uniform(std::size_t n, int count = 65);
  // Doubles the number of intervals on every axis.
  QuadratureGrid refined() const;
  kernels::TensorGrid tensor(const Box& box) const;
};

// Uniform points (weights 1) for sup-norm sampling.
kernels::TensorGrid sample_grid(const Box& box, int points_per_axis);

// (int_K |f|^2)^(1/2); 0 on an empty box.
double l2_norm(const sym::Expr& f, const Box& k, const QuadratureGrid& grid,
               kernels::Exec exec = kernels::Exec::Parallel);
double l2_norm(const sym::Compiled& f, const Box& k, const QuadratureGrid& grid,
               kernels::Exec exec = kernels::Exec::Parallel);

}  // namespace kn::analysis
