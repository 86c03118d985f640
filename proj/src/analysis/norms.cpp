#include "kn/analysis/norms.hpp"

#include <cmath>

#include "kn/error.hpp"
#include "kn/symbolic/derivatives.hpp"

namespace kn::analysis {

std::vector<double> default_delta_grid(int count, double lo, double hi) {
  if (count < 1 || !(lo > 0.0) || !(hi <= 1.0) || !(lo <= hi)) throw ParameterError("delta grid must lie in (0,1]");
  std::vector<double> d(count);
  if (count == 1) return {hi};
  for (int i = 0; i < count; ++i) d[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  d.back() = hi;
  return d;
}

std::vector<double> nabla_norms(const sym::Expr& f, int q, const std::vector<double>& deltas, const Box& g,
                                const QuadratureGrid& grid, const sym::SimplifyOptions& opts, kernels::Exec exec) {
  if (q < 0) throw ParameterError("nabla_norm: q must be >= 0");
  const std::size_t n = g.dimension();
  if (sym::dimension(f) > static_cast<int>(n)) throw ParameterError("function uses more variables than the box dimension");
  sym::DerivativeCache cache(f, opts);
  std::vector<sym::Compiled> parts;
  for (const auto& alpha : sym::indices_of_order(n, q)) {
    const auto& d = cache.get(alpha);
    if (!sym::is_zero(d)) parts.emplace_back(d);
  }
  std::vector<double> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    if (!(delta >= 0.0)) throw ParameterError("nabla_norm: delta must be >= 0");
    const Box shrunk = g.shrink(delta);
    double sum = 0.0;
    if (!shrunk.empty())
      for (const auto& c : parts) sum += l2_norm(c, shrunk, grid, exec);
    out.push_back(sum);
  }
  return out;
}

double nabla_norm(const sym::Expr& f, int q, double delta, const Box& g, const QuadratureGrid& grid,
                  const sym::SimplifyOptions& opts, kernels::Exec exec) {
  return nabla_norms(f, q, {delta}, g, grid, opts, exec).front();
}

double npm_seminorm(const sym::Expr& u, int p, int m, const Box& g, const std::vector<double>& deltas,
                    const QuadratureGrid& grid, const sym::SimplifyOptions& opts, kernels::Exec exec) {
  if (p < 0 || m < 0) throw ParameterError("npm_seminorm: p and m must be >= 0");
  for (double d : deltas)
    if (!(d > 0.0 && d <= 1.0)) throw ParameterError("npm_seminorm: delta grid must lie in (0,1]");
  const int q = p * m;
  const auto norms = nabla_norms(u, q, deltas, g, grid, opts, exec);
  double best = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) best = std::max(best, std::pow(deltas[i], q) * norms[i]);
  return best;
}

NormTable iterate_norms(const pdo::LinearPDO& p, const sym::Expr& u, const Box& k, int J, const QuadratureGrid& grid,
                        const sym::SimplifyOptions& opts, kernels::Exec exec) {
  if (J < 0) throw ParameterError("iterate_norms: J must be >= 0");
  if (static_cast<int>(k.dimension()) != p.dimension()) throw ParameterError("box and operator dimensions differ");
  NormTable t;
  sym::Expr cur = sym::simplify(u, opts);
  t.norms.push_back(l2_norm(cur, k, grid, exec));
  for (int j = 1; j <= J; ++j) {
    try {
      cur = pdo::apply(p, cur, opts);
    } catch (const ResourceError& e) {
      t.truncated = true;
      t.truncation_reason = "row " + std::to_string(j) + ": " + e.what();
      break;
    }
    t.norms.push_back(l2_norm(cur, k, grid, exec));
  }
  return t;
}

NormTable derivative_sup_norms(const sym::Expr& u, const Box& k, int N, int points_per_axis,
                               const sym::SimplifyOptions& opts, kernels::Exec exec) {
  if (N < 0) throw ParameterError("derivative_sup_norms: N must be >= 0");
  const std::size_t n = k.dimension();
  if (sym::dimension(u) > static_cast<int>(n)) throw ParameterError("function uses more variables than the box dimension");
  const auto pts = sample_grid(k, points_per_axis);
  sym::DerivativeCache cache(u, opts);
  NormTable t;
  for (int q = 0; q <= N; ++q) {
    double row = 0.0;
    try {
      for (const auto& alpha : sym::indices_of_order(n, q)) {
        const auto& d = cache.get(alpha);
        if (sym::is_zero(d)) continue;
        row = std::max(row, kernels::max_abs(sym::Compiled(d), pts, exec));
      }
    } catch (const ResourceError& e) {
      t.truncated = true;
      t.truncation_reason = "row " + std::to_string(q) + ": " + e.what();
      break;
    }
    t.norms.push_back(row);
  }
  return t;
}

}  // namespace kn::analysis
