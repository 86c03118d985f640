#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "kn/symbolic/expr.hpp"

// Data-parallel loops with a serial reference for each. Both variants sum in
// the same fixed order (per-row partial sums, rows combined ascending), so
// results are bit-identical.
namespace kn::kernels {

enum class Exec { Serial, Parallel };

struct GridMax {
  double value;
  std::size_t index;
};

// max_k f(k*h) for k = 0..n; ties resolved to the smallest k.
GridMax grid_max(const std::function<double(double)>& f, double h, std::size_t n, Exec exec);

// Tensor-product grid: nodes[a] and weights[a] per axis.
struct TensorGrid {
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> weights;
  std::size_t points() const;
};

// sum_k w_k |f(x_k)|^2 over the tensor grid.
double weighted_abs2_sum(const sym::Compiled& f, const TensorGrid& g, Exec exec);
// max_k |f(x_k)| over the tensor grid nodes.
double max_abs(const sym::Compiled& f, const TensorGrid& g, Exec exec);

// out[i][p] = sum_k w_k rho_k^p exp(i rho_k t_i), p = 0..degree.
std::vector<std::vector<std::complex<double>>> oscillatory_moments(std::span<const double> t,
                                                                   std::span<const double> rho,
                                                                   std::span<const double> w, int degree,
                                                                   Exec exec);

}  // namespace kn::kernels
