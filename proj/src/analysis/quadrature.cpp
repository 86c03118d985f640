#include "kn/analysis/quadrature.hpp"

#include <cmath>

#include "kn/error.hpp"

namespace kn::analysis {

QuadratureGrid QuadratureGrid::uniform(std::size_t n, int count) {
  if (count < 3 || count % 2 == 0) throw ParameterError("Simpson grids need an odd node count >= 3");
  return {std::vector<int>(n, count), 0};
}

QuadratureGrid QuadratureGrid::refined() const {
  QuadratureGrid g = *this;
  for (auto& c : g.nodes) c = 2 * (c - 1) + 1;
  ++g.level;
  return g;
}

kernels::TensorGrid QuadratureGrid::tensor(const Box& box) const {
  if (nodes.size() != box.dimension()) throw ParameterError("grid and box dimensions differ");
  kernels::TensorGrid t;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const int c = nodes[a];
    if (c < 3 || c % 2 == 0) throw ParameterError("Simpson grids need an odd node count >= 3");
    const double h = (box.hi[a] - box.lo[a]) / (c - 1);
    std::vector<double> x(c), w(c);
    for (int i = 0; i < c; ++i) {
      x[i] = box.lo[a] + h * i;
      w[i] = (i == 0 || i == c - 1 ? 1.0 : (i % 2 ? 4.0 : 2.0)) * h / 3.0;
    }
    x.back() = box.hi[a];
    t.nodes.push_back(std::move(x));
    t.weights.push_back(std::move(w));
  }
  return t;
}

kernels::TensorGrid sample_grid(const Box& box, int points_per_axis) {
  if (points_per_axis < 2) throw ParameterError("sample grids need at least 2 points per axis");
  kernels::TensorGrid t;
  for (std::size_t a = 0; a < box.dimension(); ++a) {
    std::vector<double> x(points_per_axis);
    for (int i = 0; i < points_per_axis; ++i)
      x[i] = box.lo[a] + (box.hi[a] - box.lo[a]) * i / (points_per_axis - 1);
    t.nodes.push_back(std::move(x));
    t.weights.emplace_back(points_per_axis, 1.0);
  }
  return t;
}

double l2_norm(const sym::Compiled& f, const Box& k, const QuadratureGrid& grid, kernels::Exec exec) {
  if (k.empty()) return 0.0;
  return std::sqrt(std::max(0.0, kernels::weighted_abs2_sum(f, grid.tensor(k), exec)));
}

double l2_norm(const sym::Expr& f, const Box& k, const QuadratureGrid& grid, kernels::Exec exec) {
  if (sym::dimension(f) > static_cast<int>(k.dimension()))
    throw ParameterError("function uses more variables than the box dimension");
  return l2_norm(sym::Compiled(f), k, grid, exec);
}

}  // namespace kn::analysis
