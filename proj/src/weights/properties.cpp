#include "kn/weights/properties.hpp"

#include <algorithm>
#include <cmath>

#include "kn/error.hpp"

namespace kn::weights {

std::vector<double> dyadic_ladder(int lo, int hi) {
  std::vector<double> out;
  for (int k = lo; k <= hi; ++k) out.push_back(std::ldexp(1.0, k));
  return out;
}

std::string to_string(Quasianalyticity q) {
  switch (q) {
    case Quasianalyticity::Convergent: return "convergent";
    case Quasianalyticity::Divergent: return "divergent";
    case Quasianalyticity::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

// Composite Simpson for int_a^b f over n (even) intervals.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

// int_1^T omega(t)/t^2 dt = int_0^{log T} phi(tau) e^{-tau} dtau.
double weight_integral(const Weight& w, double T) {
  const double L = std::log(T);
  const int n = 2 * static_cast<int>(std::ceil(L * 2000.0));
  return simpson([&](double tau) { return w.phi(tau) * std::exp(-tau); }, 0.0, L, n);
}

}  // namespace

AxiomReport check_axioms(const Weight& w, const SampleSpec& spec) {
  if (!(spec.t_min > 0) || !(spec.t_max > spec.t_min) || spec.points < 8)
    throw ParameterError("invalid axiom sample grid");
  AxiomReport rep;
  std::vector<double> t(spec.points), om(spec.points);
  const double lmin = std::log(spec.t_min), lmax = std::log(spec.t_max);
  for (int k = 0; k < spec.points; ++k) {
    t[k] = std::exp(lmin + (lmax - lmin) * k / (spec.points - 1));
    om[k] = w(t[k]);
  }

  for (int k = 1; k < spec.points; ++k)
    if (om[k] < om[k - 1] - 1e-12 * std::abs(om[k - 1])) rep.monotone = false;
  for (double s = 0.0; s <= 1.0; s += 1.0 / 64) rep.vanishes_on_unit = rep.vanishes_on_unit && w(s) == 0.0;

  for (int k = 0; k < spec.points; ++k) {
    rep.alpha_L = std::max(rep.alpha_L, w(2.0 * t[k]) / (om[k] + 1.0));
    rep.shift_L = std::max(rep.shift_L, w(std::exp(1.0) * t[k]) / (om[k] + 1.0));
  }

  // (alpha0) from the first sample where omega >= 1, so the ratio is not
  // dominated by omega vanishing near t = 1.
  rep.alpha0_t0 = spec.t_max;
  for (int k = 0; k < spec.points; ++k)
    if (om[k] >= 1.0) {
      rep.alpha0_t0 = t[k];
      break;
    }
  for (int k = 0; k < spec.points; ++k) {
    if (t[k] < rep.alpha0_t0) continue;
    for (double lam : spec.lambdas) rep.alpha0_C = std::max(rep.alpha0_C, w(lam * t[k]) / (lam * om[k]));
  }

  // (gamma): log t / omega(t) at decades.
  for (double tt = 10.0; tt <= spec.t_max * 1.0000001; tt *= 10.0) {
    const double v = w(tt);
    if (v > 0) rep.gamma_ratios.emplace_back(tt, std::log(tt) / v);
  }
  if (rep.gamma_ratios.size() >= 2) {
    const std::size_t half = rep.gamma_ratios.size() / 2;
    bool dec = rep.gamma_ratios.back().second < rep.gamma_ratios.front().second;
    for (std::size_t k = half + 1; k < rep.gamma_ratios.size(); ++k)
      dec = dec && rep.gamma_ratios[k].second <= rep.gamma_ratios[k - 1].second;
    rep.gamma_decreasing = dec;
  }

  // (delta): second differences of phi on a uniform tau grid (geometric t grid).
  {
    const int n = 2000;
    const double a = 0.0, b = std::log(spec.t_max), h = (b - a) / n;
    double worst = 0.0;
    for (int k = 1; k < n; ++k) {
      const double p0 = w.phi(a + (k - 1) * h), p1 = w.phi(a + k * h), p2 = w.phi(a + (k + 1) * h);
      const double d2 = p0 - 2.0 * p1 + p2;
      const double scale = std::max({1.0, std::abs(p0), std::abs(p1), std::abs(p2)});
      worst = std::max(worst, -d2 / scale);
    }
    rep.convexity_residual = worst;
    rep.convex = worst <= 1e-9;
  }

  // (beta)/(beta'): integral to T plus a tail fit.
  const double T = spec.t_max;
  rep.integral = weight_integral(w, T);
  {
    const int n = 41;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int k = 0; k < n; ++k) {
      const double lt = std::log(T / 100.0) + std::log(100.0) * k / (n - 1);
      const double v = w.phi(lt);
      if (!(v > 0)) continue;
      const double ly = std::log(v);
      sx += lt;
      sy += ly;
      sxx += lt * lt;
      sxy += lt * ly;
      ++cnt;
    }
    rep.tail_exponent = cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;
  }
  {
    const double i4 = weight_integral(w, T / 1e4), i6 = weight_integral(w, T / 1e2);
    const double d1 = i6 - i4, d2 = rep.integral - i6;
    rep.increment_ratio = d1 > 0 ? d2 / d1 : 0.0;
  }
  if (rep.tail_exponent <= 0.9) {
    rep.quasianalyticity = Quasianalyticity::Convergent;
  } else if (rep.tail_exponent >= 1.1) {
    rep.quasianalyticity = Quasianalyticity::Divergent;
  } else if (rep.increment_ratio >= 0.95) {
    rep.quasianalyticity = Quasianalyticity::Divergent;
  } else if (rep.increment_ratio <= 0.6) {
    rep.quasianalyticity = Quasianalyticity::Convergent;
  } else {
    rep.quasianalyticity = Quasianalyticity::Inconclusive;
  }
  return rep;
}

namespace {

struct Tables {
  double lambda;
  std::vector<double> L;   // lambda phi*(i/lambda), i <= 2 jmax + 2
  std::vector<double> Lh;  // (lambda/2) phi*(i/(lambda/2))
  std::vector<double> la;  // L - log i!
  std::vector<double> lah;
};

Tables make_tables(const YoungConjugate& conj, double lambda, int jmax) {
  Tables t;
  t.lambda = lambda;
  const int top = 2 * jmax + 2;
  for (int i = 0; i <= top; ++i) {
    const double lf = std::lgamma(i + 1.0);
    t.L.push_back(scaled_conjugate(conj, i, lambda));
    t.Lh.push_back(scaled_conjugate(conj, i, lambda / 2.0));
    t.la.push_back(t.L.back() - lf);
    t.lah.push_back(t.Lh.back() - lf);
  }
  return t;
}

}  // namespace

PropertyReport check_prop21(const YoungConjugate& conj, int jmax, const std::vector<double>& ladder, double slack) {
  if (jmax < 0) throw ParameterError("jmax must be >= 0");
  if (!(slack >= 0)) throw ParameterError("slack must be >= 0");
  const double s = std::log1p(slack);
  PropertyReport rep;
  auto check = [&](const char* prop, bool ok_, int j, int h, int r, double lam, double lhs, double rhs) {
    ++rep.checks;
    if (!ok_) rep.violations.push_back({prop, j, h, r, lam, lhs, rhs});
  };
  std::vector<Tables> tabs;
  for (double lam : ladder) tabs.push_back(make_tables(conj, lam, jmax));

  for (const auto& T : tabs) {
    const double lam = T.lambda;
    for (int j = 0; j <= jmax; ++j) {
      for (int h = 0; h <= jmax; ++h) {
        const double lhs = T.la[j] + T.la[h];
        check("1", lhs <= T.la[j + h] + s, j, h, 0, lam, lhs, T.la[j + h]);
        // The weaker binomial form must hold without slack.
        const double lb = std::lgamma(j + h + 1.0) - std::lgamma(j + 1.0) - std::lgamma(h + 1.0);
        check("1-binomial", T.L[j] + T.L[h] <= T.L[j + h] + lb, j, h, 0, lam, T.L[j] + T.L[h], T.L[j + h] + lb);
        check("4", T.la[j + h] <= T.lah[j] + T.lah[h] + s, j, h, 0, lam, T.la[j + h], T.lah[j] + T.lah[h]);
      }
      check("2", T.la[j] <= T.la[j + 1] + s, j, 0, 0, lam, T.la[j], T.la[j + 1]);
    }
    for (int j = 0; j <= jmax; ++j)
      for (int h = 0; h <= j; ++h)
        for (int r = 0; r <= jmax; ++r) {
          const double lhs = std::lgamma(j + 1.0) - std::lgamma(h + 1.0) + T.la[j - h];
          const double rhs = T.L[j + r] - T.L[h + r];
          check("6", lhs <= rhs + s, j, h, r, lam, lhs, rhs);
        }
    for (int j = 0; j <= jmax; ++j)
      for (int h = 0; h <= jmax; ++h)
        for (int r = 0; r <= jmax; ++r) {
          const double lhs = T.L[j] + T.L[r + h];
          const double rhs = T.Lh[j + h] + T.Lh[r];
          check("7", lhs <= rhs + s, j, h, r, lam, lhs, rhs);
        }
    for (int q = 0; q <= jmax; ++q)
      for (int r = 0; r <= q; ++r) {
        const double lhs = T.L[r + 1] - T.L[r];
        const double rhs = T.L[q + 1] - T.L[q];
        check("8", lhs <= rhs + s, q, 0, r, lam, lhs, rhs);
      }
  }
  // (3): non-increasing in lambda along the ladder.
  std::vector<std::size_t> order(tabs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return tabs[a].lambda < tabs[b].lambda; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& lo = tabs[order[k - 1]];
    const auto& hi = tabs[order[k]];
    for (int j = 0; j <= jmax; ++j) check("3", hi.la[j] <= lo.la[j] + s, j, 0, 0, hi.lambda, hi.la[j], lo.la[j]);
  }
  return rep;
}

ShiftBound bound_shift(const YoungConjugate& conj, double rho, double lambda, double L, int jmax, double slack) {
  if (!(rho > 0) || !(lambda > 0) || !(L > 1)) throw ParameterError("bound_shift needs rho > 0, lambda > 0, L > 1");
  ShiftBound b;
  b.rho = rho;
  b.lambda = lambda;
  b.L = L;
  b.n_rho = static_cast<int>(std::floor(std::log(rho) + 1.0));
  b.lambda_prime = lambda / std::pow(L, b.n_rho);
  b.log_D = lambda * b.n_rho;
  const double s = std::log1p(slack);
  b.worst_gap = -INFINITY;
  for (int j = 0; j <= jmax; ++j) {
    const double lhs = j * std::log(rho) + scaled_conjugate(conj, j, lambda);
    const double rhs = b.log_D + scaled_conjugate(conj, j, b.lambda_prime);
    b.worst_gap = std::max(b.worst_gap, lhs - rhs);
    if (lhs > rhs + s && b.verified) {
      b.verified = false;
      b.witness_j = j;
    }
  }
  return b;
}

PropertyReport check_iterated_shift(const YoungConjugate& conj, int ymax, const std::vector<double>& ladder, double L,
                                    int n_max, double slack) {
  PropertyReport rep;
  const double s = std::log1p(slack);
  for (double lam : ladder)
    for (int n = 1; n <= n_max; ++n) {
      const double ln = lam * std::pow(L, n);
      double geo = 0.0;
      for (int h = 1; h <= n; ++h) geo += std::pow(L, h);
      for (int y = 0; y <= ymax; ++y) {
        const double lhs = scaled_conjugate(conj, y, ln) + n * static_cast<double>(y);
        const double rhs = scaled_conjugate(conj, y, lam) + lam * geo;
        ++rep.checks;
        if (!(lhs <= rhs + s)) rep.violations.push_back({"iterated-shift", y, n, 0, lam, lhs, rhs});
      }
    }
  return rep;
}

}  // namespace kn::weights
