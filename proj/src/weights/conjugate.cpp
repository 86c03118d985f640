#include "kn/weights/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "kn/error.hpp"

namespace kn::weights {

struct YoungConjugate::Memo {
  std::mutex mu;
  std::unordered_map<double, Entry> values;
};

YoungConjugate::YoungConjugate(Weight w, double tol)
    : w_(std::move(w)), tol_(tol), memo_(std::make_shared<Memo>()) {
  if (!(tol > 0.0)) throw ParameterError("conjugate tolerance must be positive");
}

std::size_t YoungConjugate::cache_size() const {
  std::lock_guard lock(memo_->mu);
  return memo_->values.size();
}

double YoungConjugate::operator()(double y) const { return lookup(y).value; }

double YoungConjugate::argmax(double y) const { return lookup(y).argmax; }

YoungConjugate::Entry YoungConjugate::lookup(double y) const {
  if (!(y >= 0.0) || !std::isfinite(y)) throw ParameterError("conjugate needs finite y >= 0");
  {
    std::lock_guard lock(memo_->mu);
    if (auto it = memo_->values.find(y); it != memo_->values.end()) return it->second;
  }
  Entry e = solve(y);
  std::lock_guard lock(memo_->mu);
  memo_->values.emplace(y, e);
  return e;
}

YoungConjugate::Entry YoungConjugate::solve(double y) const {
  auto g = [&](double t) { return y * t - w_.phi(t); };
  if (y == 0.0) return {0.0, 0.0};

  // g is concave: double t until g stops increasing.
  constexpr double cap = 1073741824.0;  // 2^30
  double prev_t = 0.0, t = 1.0;
  double cur = g(t);
  double lo = 0.0, hi = 1.0;
  if (cur > g(0.0)) {
    for (;;) {
      const double next_t = 2.0 * t;
      const double next = g(next_t);
      if (next <= cur) {
        lo = prev_t;
        hi = next_t;
        break;
      }
      if (next_t >= cap)
        throw DivergenceError("conjugate bracket exceeded t = 2^30 at y = " + std::to_string(y) +
                              "; the weight may violate (gamma)");
      prev_t = t;
      t = next_t;
      cur = next;
    }
  }

  // Golden-section search on [lo, hi].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 400 && (b - a) > tol_ * (1.0 + std::abs(c)); ++it) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  Entry best{gc, c};
  for (double cand : {a, b, d}) {
    double v = g(cand);
    if (v > best.value) best = {v, cand};
  }
  if (!(best.value > 0.0)) return {0.0, 0.0};
  return best;
}

double young_conjugate(const Weight& w, double y, double tol) { return YoungConjugate(w, tol)(y); }

GridOracle conjugate_grid_oracle(const Weight& w, double y, double rel_tol, kernels::Exec exec) {
  if (!(y >= 0.0)) throw ParameterError("conjugate needs y >= 0");
  auto g = [&](double t) { return y * t - w.phi(t); };
  double window = 1.0;
  std::size_t n = 1024;
  // Grow the window until the discrete maximizer sits away from its right end.
  for (;;) {
    auto m = kernels::grid_max(g, window / static_cast<double>(n), n, exec);
    if (m.index < n - n / 8) break;
    window *= 2.0;
    n *= 2;
    if (window > 1073741824.0) throw DivergenceError("grid oracle window exceeded 2^30");
  }
  // Nested grids can keep an old node as the discrete maximizer for several
  // levels, so stability alone is not enough. For concave g the maximum lies in
  // [t-h, t+h] and is bounded above by the secant lines from either side.
  auto upper_bound = [&](std::size_t k, double h, double gk) {
    const double t = static_cast<double>(k) * h;
    const double right_at = t + h, right = g(t + h), sr = (g(t + 2.0 * h) - right) / h;
    auto right_line = [&](double x) { return right + sr * (x - right_at); };
    if (k < 2) return std::max(gk, right_line(std::max(0.0, t - h)));
    const double left_at = t - h, left = g(t - h), sl = (left - g(t - 2.0 * h)) / h;
    auto left_line = [&](double x) { return left + sl * (x - left_at); };
    if (!(sl > sr)) return std::max({gk, left, right});
    double x = (right - sr * right_at - left + sl * left_at) / (sl - sr);
    x = std::clamp(x, t - h, t + h);
    return std::max(gk, std::min(left_line(x), right_line(x)));
  };
  double prev = kernels::grid_max(g, window / static_cast<double>(n), n, exec).value;
  for (int level = 0; level < 40; ++level) {
    n *= 2;
    const double h = window / static_cast<double>(n);
    auto m = kernels::grid_max(g, h, n, exec);
    const double t = static_cast<double>(m.index) * h;
    // Values near zero (y at the threshold) get an absolute floor of rel_tol * 1e-3.
    const double scale = std::max(std::abs(m.value), 1e-3);
    const bool same_level = std::abs(m.value - prev) <= rel_tol * scale;
    const bool tight = upper_bound(m.index, h, m.value) - m.value <= rel_tol * scale;
    if (same_level && tight) return {std::max(0.0, m.value), t, h, window};
    prev = m.value;
  }
  throw AccuracyError("grid oracle did not stabilize", std::abs(prev));
}

double gevrey_conjugate(double s, double y) {
  const double sy = s * y;
  if (sy <= 1.0) return 0.0;
  return sy * (std::log(sy) - 1.0) + 1.0;
}

double scaled_conjugate(const YoungConjugate& conj, double y, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  return lambda * conj(y / lambda);
}

AssocSeqValue assoc_seq(const YoungConjugate& conj, int j, double lambda) {
  if (j < 0) throw ParameterError("j must be >= 0");
  return {j, lambda, scaled_conjugate(conj, j, lambda) - std::lgamma(j + 1.0)};
}

}  // namespace kn::weights
