#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kn/analysis/quadrature.hpp"
#include "kn/pdo/operator.hpp"

namespace kn::analysis {

// 32 geometric points in [1e-3, 1].
std::vector<double> default_delta_grid(int count = 32, double lo = 1e-3, double hi = 1.0);

// sum_{|alpha|=q} ||d^alpha f||_{L2(G_delta)}.
double nabla_norm(const sym::Expr& f, int q, double delta, const Box& g, const QuadratureGrid& grid,
                  const sym::SimplifyOptions& opts = {}, kernels::Exec exec = kernels::Exec::Parallel);
// The same for every delta in the list, sharing the derivatives.
std::vector<double> nabla_norms(const sym::Expr& f, int q, const std::vector<double>& deltas, const Box& g,
                                const QuadratureGrid& grid, const sym::SimplifyOptions& opts = {},
                                kernels::Exec exec = kernels::Exec::Parallel);

// max over the delta grid of delta^(pm) nabla_norm(u, pm, delta, G).
double npm_seminorm(const sym::Expr& u, int p, int m, const Box& g, const std::vector<double>& deltas,
                    const QuadratureGrid& grid, const sym::SimplifyOptions& opts = {},
                    kernels::Exec exec = kernels::Exec::Parallel);

struct NormTable {
  std::vector<double> norms;  // row j
  bool truncated = false;     // the term budget stopped the table early
  std::string truncation_reason;
};

// j -> ||P^j u||_{L2(K)} for j = 0..J by repeated application.
NormTable iterate_norms(const pdo::LinearPDO& p, const sym::Expr& u, const Box& k, int J,
                        const QuadratureGrid& grid, const sym::SimplifyOptions& opts = {},
                        kernels::Exec exec = kernels::Exec::Parallel);

// q -> max_{|alpha|=q} sup_K |d^alpha u| on a sample grid, q = 0..N.
NormTable derivative_sup_norms(const sym::Expr& u, const Box& k, int N, int points_per_axis = 33,
                               const sym::SimplifyOptions& opts = {}, kernels::Exec exec = kernels::Exec::Parallel);

}  // namespace kn::analysis
