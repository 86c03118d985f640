#include "kn/kernels/kernels.hpp"

#include <cmath>
#include <numeric>

namespace kn::kernels {

std::size_t TensorGrid::points() const {
  std::size_t n = nodes.empty() ? 0 : 1;
  for (const auto& a : nodes) n *= a.size();
  return n;
}

GridMax grid_max(const std::function<double(double)>& f, double h, std::size_t n, Exec exec) {
  const std::size_t count = n + 1;
  const std::size_t block = 4096;
  const std::size_t blocks = (count + block - 1) / block;
  std::vector<GridMax> part(blocks, GridMax{-INFINITY, 0});
  auto run = [&](std::size_t b) {
    GridMax best{-INFINITY, b * block};
    const std::size_t end = std::min(count, (b + 1) * block);
    for (std::size_t k = b * block; k < end; ++k) {
      double v = f(static_cast<double>(k) * h);
      if (v > best.value) best = {v, k};
    }
    part[b] = best;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < blocks; ++b) run(b);
  } else {
    for (std::size_t b = 0; b < blocks; ++b) run(b);
  }
  GridMax best{-INFINITY, 0};
  for (const auto& p : part)
    if (p.value > best.value) best = p;
  return best;
}

namespace {

// Calls body(first-axis index, partial accumulator) for every row; rows are
// independent so they can be distributed across threads.
template <class RowFn>
std::vector<double> per_row(const TensorGrid& g, Exec exec, RowFn row) {
  const std::size_t rows = g.nodes.front().size();
  std::vector<double> part(rows, 0.0);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t r = 0; r < rows; ++r) part[r] = row(r);
  } else {
    for (std::size_t r = 0; r < rows; ++r) part[r] = row(r);
  }
  return part;
}

template <class PointFn>
double row_loop(const TensorGrid& g, std::size_t r, PointFn visit) {
  const std::size_t dim = g.nodes.size();
  std::vector<double> x(dim);
  std::vector<std::size_t> idx(dim, 0);
  idx[0] = r;
  double acc = 0.0;
  for (;;) {
    double w = 1.0;
    for (std::size_t a = 0; a < dim; ++a) {
      x[a] = g.nodes[a][idx[a]];
      w *= g.weights[a][idx[a]];
    }
    visit(x, w, acc);
    bool done = true;
    for (std::size_t a = dim; a > 1;) {
      --a;
      if (++idx[a] < g.nodes[a].size()) {
        done = false;
        break;
      }
      idx[a] = 0;
    }
    if (done) return acc;
  }
}

}  // namespace

double weighted_abs2_sum(const sym::Compiled& f, const TensorGrid& g, Exec exec) {
  if (g.points() == 0) return 0.0;
  auto part = per_row(g, exec, [&](std::size_t r) {
    std::vector<std::complex<double>> scratch;
    return row_loop(g, r, [&](const std::vector<double>& x, double w, double& acc) {
      if (w == 0.0) return;
      acc += w * std::norm(f(sym::Point{x, 0.0}, scratch));
    });
  });
  return std::accumulate(part.begin(), part.end(), 0.0);
}

double max_abs(const sym::Compiled& f, const TensorGrid& g, Exec exec) {
  if (g.points() == 0) return 0.0;
  auto part = per_row(g, exec, [&](std::size_t r) {
    std::vector<std::complex<double>> scratch;
    return row_loop(g, r, [&](const std::vector<double>& x, double, double& acc) {
      acc = std::max(acc, std::abs(f(sym::Point{x, 0.0}, scratch)));
    });
  });
  double m = 0.0;
  for (double p : part) m = std::max(m, p);
  return m;
}

std::vector<std::vector<std::complex<double>>> oscillatory_moments(std::span<const double> t,
                                                                   std::span<const double> rho,
                                                                   std::span<const double> w, int degree,
                                                                   Exec exec) {
  std::vector<std::vector<std::complex<double>>> out(t.size(), std::vector<std::complex<double>>(degree + 1));
  auto one = [&](std::size_t i) {
    auto& acc = out[i];
    for (std::size_t k = 0; k < rho.size(); ++k) {
      std::complex<double> e = std::polar(w[k], rho[k] * t[i]);
      for (int p = 0; p <= degree; ++p) {
        acc[p] += e;
        e *= rho[k];
      }
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < t.size(); ++i) one(i);
  } else {
    for (std::size_t i = 0; i < t.size(); ++i) one(i);
  }
  return out;
}

}  // namespace kn::kernels
