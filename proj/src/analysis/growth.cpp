#include "kn/analysis/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kn/error.hpp"

namespace kn::analysis {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

// c_k under the relative 10% rule on log c_k.
bool stable_pair(double full, double half) {
  if (full == kNegInf && half == kNegInf) return true;
  if (!std::isfinite(full) || !std::isfinite(half)) return false;
  return std::abs(full - half) < 0.1 * std::max(1.0, std::abs(full));
}

template <class Exponent>
LadderRow ladder_row(const std::vector<double>& norms, int k, Exponent exponent) {
  LadderRow r{k, kNegInf, kNegInf, false};
  const std::size_t half_end = (norms.size() - 1) / 2;
  for (std::size_t j = 0; j < norms.size(); ++j) {
    if (!(norms[j] > 0.0)) continue;
    const double v = std::log(norms[j]) - exponent(static_cast<int>(j));
    r.log_c = std::max(r.log_c, v);
    if (j <= half_end) r.log_c_half = std::max(r.log_c_half, v);
  }
  // Round up so that log norm_j <= log_c + exponent(j) holds in floating point.
  for (std::size_t j = 0; j < norms.size(); ++j) {
    if (!(norms[j] > 0.0)) continue;
    const double lhs = std::log(norms[j]), e = exponent(static_cast<int>(j));
    while (lhs > r.log_c + e) r.log_c = std::nextafter(r.log_c, kInf);
  }
  r.stable = stable_pair(r.log_c, r.log_c_half);
  return r;
}

void check_ladder(const std::vector<int>& ladder) {
  if (ladder.empty()) throw ParameterError("k ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1) throw ParameterError("k ladder entries must be >= 1");
    if (i && ladder[i] <= ladder[i - 1]) throw ParameterError("k ladder must be increasing");
  }
}

double log_sum_exp(const std::vector<double>& v) {
  double top = kNegInf;
  for (double x : v) top = std::max(top, x);
  if (top == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - top);
  return top + std::log(s);
}

QuadratureGrid or_default(const QuadratureGrid& g, std::size_t n) {
  return g.nodes.empty() ? QuadratureGrid::uniform(n) : g;
}

}  // namespace

std::vector<int> default_k_ladder() { return {1, 2, 4, 8, 16, 32}; }

RoumieuFit fit_roumieu(const std::vector<double>& norms, const weights::YoungConjugate& conj, int m,
                       const std::vector<int>& ladder) {
  if (norms.empty()) throw ParameterError("fit_roumieu: empty norm table");
  if (m < 1) throw ParameterError("fit_roumieu: m must be >= 1");
  check_ladder(ladder);
  RoumieuFit fit;
  for (int k : ladder) {
    fit.roumieu.push_back(ladder_row(norms, k, [&](int j) { return conj(static_cast<double>(j) * m * k) / k; }));
    fit.beurling.push_back(
        ladder_row(norms, k, [&](int j) { return k * conj(static_cast<double>(j) * m / k); }));
  }
  const LadderRow* pick = nullptr;
  for (const auto& r : fit.roumieu)
    if (r.stable) {
      pick = &r;
      break;
    }
  fit.stable = pick != nullptr;
  if (!pick) pick = &fit.roumieu.back();
  fit.k_star = pick->k;
  fit.log_c_star = pick->log_c;
  fit.c_star = std::exp(pick->log_c);
  for (std::size_t j = 0; j < norms.size(); ++j) {
    const double bound = fit.log_c_star + conj(static_cast<double>(j) * m * fit.k_star) / fit.k_star;
    fit.residuals.push_back(norms[j] > 0.0 ? std::log(norms[j]) - bound : kNegInf);
  }
  return fit;
}

double comparison_slope(const std::vector<double>& norms, const weights::YoungConjugate& conj, int m, int k) {
  if (norms.empty()) return std::nan("");
  const std::size_t last = norms.size() - 1;
  std::vector<double> xs, ys;
  for (std::size_t j = (last + 1) / 2; j <= last; ++j) {
    if (!(norms[j] > 0.0)) continue;
    xs.push_back(conj(static_cast<double>(j) * m * k) / k);
    ys.push_back(std::log(norms[j]));
  }
  if (xs.size() < 2) return std::nan("");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) return std::nan("");
  return sxy / sxx;
}

GrowthReport derivative_growth(const sym::Expr& u, const Box& k, const weights::YoungConjugate& conj,
                               const MembershipOptions& opts) {
  GrowthReport r;
  r.weight = conj.weight().spec();
  r.m = 1;
  r.derivatives.table = derivative_sup_norms(u, k, opts.N, opts.sup_points, opts.simplify, opts.exec);
  r.derivatives.fit = fit_roumieu(r.derivatives.table.norms, conj, 1, opts.ladder);
  r.derivatives.slope = comparison_slope(r.derivatives.table.norms, conj, 1);
  return r;
}

GrowthReport membership_report(const sym::Expr& u, const pdo::LinearPDO& p, const Box& k,
                               const weights::YoungConjugate& conj, const MembershipOptions& opts) {
  if (p.order() < 1) throw PreconditionError("membership_report requires an operator of order m >= 1");
  GrowthReport r = derivative_growth(u, k, conj, opts);
  r.m = p.order();
  const auto grid = or_default(opts.grid, k.dimension());
  r.iterates.table = iterate_norms(p, u, k, opts.J, grid, opts.simplify, opts.exec);
  r.iterates.fit = fit_roumieu(r.iterates.table.norms, conj, r.m, opts.ladder);
  r.iterates.slope = comparison_slope(r.iterates.table.norms, conj, r.m);
  r.sides_agree = r.iterates.fit.stable == r.derivatives.fit.stable;
  return r;
}

std::string to_string(RecursionStatus s) {
  switch (s) {
    case RecursionStatus::Ok: return "ok";
    case RecursionStatus::Degenerate: return "degenerate";
    default: return "undefined";
  }
}

std::vector<RecursionRow> empirical_recursion_constant(const sym::Expr& u, const pdo::LinearPDO& p, int p_max, int k,
                                                       const Box& g, const weights::YoungConjugate& conj,
                                                       const RecursionOptions& opts) {
  if (p_max < 1) throw ParameterError("empirical_recursion_constant: p_max must be >= 1");
  if (k < 1) throw ParameterError("empirical_recursion_constant: k must be >= 1");
  if (p.order() < 1) throw PreconditionError("empirical_recursion_constant requires an operator of order m >= 1");
  const auto verdict = pdo::ellipticity_check(p, g, opts.ellipticity);
  if (!verdict.elliptic) {
    std::string at = "x=(";
    for (std::size_t i = 0; i < verdict.witness_x.size(); ++i) at += (i ? "," : "") + sym::format_number(verdict.witness_x[i]);
    at += ") xi=(";
    for (std::size_t i = 0; i < verdict.witness_xi.size(); ++i)
      at += (i ? "," : "") + sym::format_number(verdict.witness_xi[i]);
    throw PreconditionError("empirical_recursion_constant requires an elliptic operator; sampled symbol vanishes at " +
                            at + ")");
  }
  const int m = p.order();
  const auto grid = or_default(opts.grid, g.dimension());
  std::vector<double> n_u(p_max + 1), n_pu(p_max);
  for (int q = 0; q <= p_max; ++q) n_u[q] = npm_seminorm(u, q, m, g, opts.deltas, grid, opts.simplify, opts.exec);
  const sym::Expr pu = pdo::apply(p, u, opts.simplify);
  for (int q = 0; q < p_max; ++q) n_pu[q] = npm_seminorm(pu, q, m, g, opts.deltas, grid, opts.simplify, opts.exec);

  auto safe_log = [](double v) { return v > 0.0 ? std::log(v) : kNegInf; };
  std::vector<RecursionRow> rows;
  for (int pp = 1; pp <= p_max; ++pp) {
    RecursionRow r;
    r.p = pp;
    const double top = conj(static_cast<double>(pp) * m * k) / k;
    std::vector<double> logs{safe_log(n_pu[pp - 1])};
    for (int q = 0; q < pp; ++q) logs.push_back(top - conj(static_cast<double>(q) * m * k) / k + safe_log(n_u[q]));
    const double log_den = log_sum_exp(logs);
    r.numerator = n_u[pp];
    r.denominator = std::exp(log_den);
    if (r.numerator == 0.0 && log_den == kNegInf) {
      r.status = RecursionStatus::Undefined;
      r.c0 = std::nan("");
    } else if (r.numerator == 0.0) {
      r.status = RecursionStatus::Degenerate;
      r.c0 = 0.0;
    } else {
      r.c0 = std::exp(safe_log(r.numerator) - log_den);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace kn::analysis
