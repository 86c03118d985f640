#include "kn/metivier/metivier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Dense>

#include "kn/analysis/growth.hpp"
#include "kn/error.hpp"
#include "kn/symbolic/derivatives.hpp"
#include "kn/weights/conjugate.hpp"

namespace kn::metivier {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

std::vector<double> offset(std::span<const double> x, const std::vector<double>& x0) {
  if (x.size() != x0.size()) throw ParameterError("point dimension differs from x0");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - x0[i];
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Radial cutoff in n variables.
sym::Expr cutoff_in(const MetivierParams& p, int n) {
  std::vector<sym::Expr> squares;
  for (int i = 0; i < n; ++i) squares.push_back(sym::power(sym::variable(i), 2.0));
  const sym::Expr scaled = sym::constant(1.0 / (4.0 * p.delta() * p.delta())) * sym::add(std::move(squares));
  if (p.cutoff() == CutoffKind::Profile) return sym::simplify(sym::bump(p.sigma(), 0, scaled));
  // tau = (4/3)(1 - |y|^2/(4 delta^2)); phi = psi(tau) / (psi(tau) + psi(1 - tau)), psi(tau) = h(1 - tau).
  const sym::Expr tau = sym::constant(4.0 / 3.0) * (sym::constant(1.0) - scaled);
  const sym::Expr a = sym::bump(p.sigma(), 0, sym::constant(1.0) - tau);
  const sym::Expr b = sym::bump(p.sigma(), 0, tau);
  return sym::simplify(a * sym::power(a + b, -1.0), {false});
}

// sum_q ... polynomial product of coefficient vectors.
std::vector<Complex> poly_mul(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  std::vector<Complex> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// Coefficients in rho of P(rho xi0) for a constant-coefficient P.
std::vector<Complex> symbol_along(const pdo::LinearPDO& op, std::span<const double> xi0) {
  std::vector<Complex> c(op.order() + 1, 0.0);
  for (const auto& [alpha, a] : op.d_coefficients()) {
    double mono = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) mono *= std::pow(xi0[i], alpha[i]);
    c[alpha.order()] += sym::eval(a, std::span<const double>{}) * mono;
  }
  return c;
}

double tail_integral(double eta, double power, double rho_max) {
  return std::exp(log_gamma_upper((power + 1.0) / eta, std::pow(rho_max, eta)) - std::log(eta));
}

std::vector<double> cutoff_breaks(const MetivierParams& p, double r) {
  if (!(r > 0.0)) return {};
  return {std::pow(p.delta() / r, 1.0 / p.eps()), std::pow(2.0 * p.delta() / r, 1.0 / p.eps())};
}

}  // namespace

MetivierParams::MetivierParams(const MetivierConfig& c) : c_(c) {
  if (!(c.s > 1.0)) throw ParameterError("s must exceed 1");
  if (!(c.sigma > 1.0 && c.sigma < c.s)) throw ParameterError("sigma must lie in (1, s)");
  if (c.m < 1) throw ParameterError("m must be >= 1");
  if (!(c.delta > 0.0)) throw ParameterError("delta must be positive");
  const double bound = eps_bound();
  if (!(c.eps > 0.0 && c.eps < bound))
    throw ParameterError("eps = " + sym::format_number(c.eps) + " violates 0<ε<m(s−σ)/(2ms−σ) = " +
                         sym::format_number(bound));
  if (!(bound < 0.5)) throw ParameterError("m(s−σ)/(2ms−σ) must be below 1/2");
  const double eta_v = eta();
  if (!(eta_v > 0.0 && eta_v < 1.0) || !(1.0 / eta_v > c.s))
    throw ParameterError("η=(m−ε)/(ms) must lie in (0,1) with 1/η > s");
  if (c.x0.empty() || c.x0.size() != c.xi0.size()) throw ParameterError("x0 and xi0 need the same nonzero length");
  if (std::abs(std::sqrt(norm2(c.xi0)) - 1.0) > 1e-12) throw ParameterError("|ξ₀| = 1 required (within 1e-12)");
  const int n = static_cast<int>(c.x0.size());
  op_ = pdo::LinearPDO::parse(c.op, n);
  if (!op_.is_constant_coefficient()) throw ParameterError("the operator must have constant coefficients");
  if (op_.order() != c.m)
    throw ParameterError("operator order " + std::to_string(op_.order()) + " differs from m = " + std::to_string(c.m));
  double largest = 0.0;
  for (const auto& xi : pdo::sphere_directions(n, pdo::minimum_sphere_samples(n)))
    largest = std::max(largest, std::abs(pdo::principal_symbol(op_, c.x0, xi)));
  const double at_xi0 = std::abs(pdo::principal_symbol(op_, c.x0, c.xi0));
  if (!(at_xi0 < 1e-10 * largest))
    throw ParameterError("P_m(ξ₀) = " + sym::format_number(at_xi0) + " is not zero; the operator must be non-elliptic at ξ₀");
}

double MetivierParams::eta() const { return (c_.m - c_.eps) / (c_.m * c_.s); }

double MetivierParams::eps_bound() const { return c_.m * (c_.s - c_.sigma) / (2.0 * c_.m * c_.s - c_.sigma); }

sym::Expr bump_profile(double sigma, double delta, int n) {
  if (!(sigma > 1.0)) throw ParameterError("bump: sigma must exceed 1");
  if (!(delta > 0.0)) throw ParameterError("bump: delta must be positive");
  if (n < 1) throw ParameterError("bump: dimension must be >= 1");
  std::vector<sym::Expr> squares;
  for (int i = 0; i < n; ++i) squares.push_back(sym::power(sym::variable(i), 2.0));
  return sym::simplify(sym::bump(sigma, 0, sym::constant(1.0 / (4.0 * delta * delta)) * sym::add(std::move(squares))));
}

sym::Expr cutoff_expr(const MetivierParams& p) { return cutoff_in(p, p.dimension()); }

double cutoff_value(const MetivierParams& p, double r2) {
  const double scaled = r2 / (4.0 * p.delta() * p.delta());
  if (p.cutoff() == CutoffKind::Profile) return sym::gevrey_profile(p.sigma(), 0, scaled);
  const double tau = (4.0 / 3.0) * (1.0 - scaled);
  const double a = sym::gevrey_profile(p.sigma(), 0, 1.0 - tau);
  const double b = sym::gevrey_profile(p.sigma(), 0, tau);
  return a / (a + b);
}

Complex eval_u(const MetivierParams& p, std::span<const double> x, const QuadOptions& opts, QuadResult* detail) {
  const auto y = offset(x, p.x0());
  const double r2 = norm2(y), r = std::sqrt(r2);
  const double eta = p.eta();
  QuadResult res;
  if (r >= 2.0 * p.delta()) {
    if (detail) *detail = res;
    return 0.0;
  }
  const double t = dot(y, p.xi0());
  const double rho_max = truncation_radius(eta, 0.0, opts.tol);
  auto breaks = cutoff_breaks(p, r);
  const double hi = breaks.empty() ? rho_max : std::min(rho_max, breaks.back());
  if (hi <= 1.0) {
    if (detail) *detail = res;
    return 0.0;
  }
  const double width = t != 0.0 ? std::numbers::pi / std::abs(t) : INFINITY;
  auto f = [&](double rho) {
    const double c = cutoff_value(p, std::pow(rho, 2.0 * p.eps()) * r2);
    return std::polar(c * std::exp(-std::pow(rho, eta)), rho * t);
  };
  const double trunc = hi < rho_max ? 0.0 : tail_integral(eta, 0.0, rho_max);
  res = integrate_panels(f, panel_edges(1.0, hi, width, 0.25, breaks), trunc, opts);
  if (detail) *detail = res;
  return res.value;
}

double log_leading_term(double eta, double alpha) { return log_gamma_upper((alpha + 1.0) / eta, 1.0) - std::log(eta); }

DirectionalDerivative directional_derivative_u(const MetivierParams& p, int alpha, const QuadOptions& opts) {
  if (alpha < 0) throw ParameterError("alpha must be >= 0");
  const double eta = p.eta();
  // g(t) = phi(t xi0) is radial, so the one-variable cutoff gives its Taylor data at 0.
  std::vector<double> g(alpha + 1);
  sym::Expr d = cutoff_in(p, 1);
  const double zero[1] = {0.0};
  for (int k = 0; k <= alpha; ++k) {
    if (k) d = sym::differentiate(d, 0);
    g[k] = sym::eval(d, zero).real();
  }
  // D^alpha (phi e) at x0 = sum_k binom(alpha, k) (-i)^k g_k rho^{eps k} rho^{alpha - k}
  std::vector<std::pair<Complex, double>> terms;
  double binom = 1.0;
  Complex minus_i_pow = 1.0;
  for (int k = 0; k <= alpha; ++k) {
    if (g[k] != 0.0) terms.push_back({binom * minus_i_pow * g[k], alpha - k + p.eps() * k});
    binom = binom * (alpha - k) / (k + 1);
    minus_i_pow *= Complex(0.0, -1.0);
  }
  auto f = [&](double rho) {
    Complex s = 0.0;
    const double lr = std::log(rho), e = std::exp(-std::pow(rho, eta));
    for (const auto& [c, pw] : terms) s += c * std::exp(pw * lr);
    return s * e;
  };
  const double rho_max = truncation_radius(eta, alpha, opts.tol);
  double trunc = 0.0;
  for (const auto& [c, pw] : terms) trunc += std::abs(c) * tail_integral(eta, pw, rho_max);
  DirectionalDerivative out;
  out.alpha = alpha;
  out.quadrature = integrate_panels(f, panel_edges(1.0, rho_max, INFINITY), trunc, opts);
  out.log_closed_form = log_leading_term(eta, alpha);
  out.closed_form = std::exp(out.log_closed_form);
  return out;
}

pdo::LinearPDO shifted_operator(const pdo::LinearPDO& op, std::span<const double> xi0) {
  if (!op.is_constant_coefficient()) throw ParameterError("shifted_operator needs constant coefficients");
  if (static_cast<int>(xi0.size()) != op.dimension()) throw ParameterError("covector length differs from dimension");
  std::map<sym::MultiIndex, std::vector<sym::Expr>, sym::GradedDescending> sums;
  for (const auto& [alpha, a] : op.d_coefficients()) {
    for (const auto& beta : sym::indices_below(alpha)) {
      double c = sym::binomial(alpha, beta);
      for (std::size_t i = 0; i < alpha.size(); ++i) c *= std::pow(xi0[i], alpha[i] - beta[i]);
      if (c == 0.0) continue;
      sums[beta].push_back(sym::constant(c) * a * sym::power(sym::rho(), (alpha - beta).order()));
    }
  }
  pdo::Coefficients d_form;
  for (auto& [beta, terms] : sums) d_form.emplace(beta, sym::add(std::move(terms)));
  return pdo::LinearPDO::from_d_form(op.dimension(), d_form);
}

sym::Expr assembled_integrand(const MetivierParams& p, const pdo::LinearPDO& op, int q,
                              const sym::SimplifyOptions& opts) {
  const int n = p.dimension();
  const auto shifted = pdo::iterate(shifted_operator(op, p.xi0()), q, opts);
  sym::DerivativeCache phi(cutoff_expr(p), opts);
  const sym::Expr rho_eps = sym::power(sym::rho(), p.eps());
  std::vector<sym::Expr> args, phase;
  for (int i = 0; i < n; ++i) {
    const sym::Expr shifted_x = sym::variable(i) - sym::constant(p.x0()[i]);
    args.push_back(rho_eps * shifted_x);
    if (p.xi0()[i] != 0.0) phase.push_back(sym::constant(p.xi0()[i]) * shifted_x);
  }
  std::vector<sym::Expr> terms;
  for (const auto& [beta, c] : shifted.partial_coefficients()) {
    sym::Expr d = phi.get(beta);
    // Substitute through placeholders so a replacement never sees another one.
    for (int i = 0; i < n; ++i) d = sym::substitute(d, i, sym::variable(n + i));
    for (int i = 0; i < n; ++i) d = sym::substitute(d, n + i, args[i]);
    terms.push_back(c * sym::power(sym::rho(), p.eps() * beta.order()) * d);
  }
  const sym::Expr oscillation =
      sym::exp(sym::constant(Complex(0.0, 1.0)) * sym::rho() * (phase.empty() ? sym::constant(0.0) : sym::add(phase)));
  return sym::simplify(oscillation * sym::add(std::move(terms)), {false, opts.term_budget});
}

std::vector<std::pair<double, Complex>> rho_spectrum_at_center(const MetivierParams& p, const pdo::LinearPDO& op, int q,
                                                               const sym::SimplifyOptions& opts) {
  const auto shifted = pdo::iterate(shifted_operator(op, p.xi0()), q, opts);
  sym::DerivativeCache phi(cutoff_expr(p), opts);
  const std::vector<double> origin(p.dimension(), 0.0);
  std::map<long long, std::pair<double, Complex>> acc;
  for (const auto& [beta, c] : shifted.partial_coefficients()) {
    const Complex d = sym::eval(phi.get(beta), origin);
    if (d == 0.0) continue;
    const auto coeffs = sym::polynomial_coefficients(c, sym::kRho);
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      const Complex v = sym::eval(coeffs[j], origin) * d;
      if (v == 0.0) continue;
      const double pw = static_cast<double>(j) + p.eps() * beta.order();
      auto& slot = acc[std::llround(pw * 1e9)];
      slot.first = pw;
      slot.second += v;
    }
  }
  std::vector<std::pair<double, Complex>> out;
  for (const auto& kv : acc) out.push_back(kv.second);
  return out;
}

namespace {

QuadResult integrate_compiled(const MetivierParams& p, const sym::Compiled& integrand, int power,
                              std::span<const double> x, const QuadOptions& opts) {
  const auto y = offset(x, p.x0());
  const double r = std::sqrt(norm2(y));
  if (r >= 2.0 * p.delta()) return {};
  const double eta = p.eta();
  const double t = dot(y, p.xi0());
  const double rho_max = truncation_radius(eta, power, opts.tol);
  auto breaks = cutoff_breaks(p, r);
  const double hi = breaks.empty() ? rho_max : std::min(rho_max, breaks.back());
  if (hi <= 1.0) return {};
  std::vector<Complex> scratch;
  auto f = [&](double rho) { return integrand(sym::Point{x, rho}, scratch) * std::exp(-std::pow(rho, eta)); };
  double trunc = 0.0;
  if (hi >= rho_max) {
    // Scale the model tail rho^power e^{-rho^eta} by the integrand's size at the cut.
    const double model = std::pow(rho_max, power) * std::exp(-std::pow(rho_max, eta));
    const double ratio = model > 0.0 ? std::abs(f(rho_max)) / model : 0.0;
    trunc = ratio * tail_integral(eta, power, rho_max);
  }
  const double width = t != 0.0 ? std::numbers::pi / std::abs(t) : INFINITY;
  return integrate_panels(f, panel_edges(1.0, hi, width, 0.25, breaks), trunc, opts);
}

}  // namespace

QuadResult apply_iterate_under_integral(const MetivierParams& p, const pdo::LinearPDO& op, int q,
                                        std::span<const double> x, const QuadOptions& opts,
                                        const sym::SimplifyOptions& sopts) {
  if (q < 0) throw ParameterError("q must be >= 0");
  const sym::Compiled integrand(assembled_integrand(p, op, q, sopts));
  return integrate_compiled(p, integrand, q * op.order(), x, opts);
}

bool plateau_covers(const MetivierParams& p, const Box& k, double rho_max) {
  if (p.cutoff() != CutoffKind::Plateau) return false;
  double far2 = 0.0;
  for (std::size_t i = 0; i < k.dimension(); ++i) {
    const double a = std::abs(k.lo[i] - p.x0()[i]), b = std::abs(k.hi[i] - p.x0()[i]);
    far2 += std::max(a, b) * std::max(a, b);
  }
  return std::pow(rho_max, p.eps()) * std::sqrt(far2) < p.delta();
}

IterateNorms iterate_l2_norms(const MetivierParams& p, const pdo::LinearPDO& op, const Box& k, int J,
                              const analysis::QuadratureGrid& grid, const QuadOptions& opts, Route route,
                              kernels::Exec exec) {
  if (J < 0) throw ParameterError("J must be >= 0");
  if (op.dimension() != p.dimension() || static_cast<int>(k.dimension()) != p.dimension())
    throw ParameterError("operator, box and x0 dimensions differ");
  if (!op.is_constant_coefficient()) throw ParameterError("iterate_l2_norms needs a constant-coefficient operator");
  const int top = J * op.order();
  const double rho_max = truncation_radius(p.eta(), top, opts.tol);
  const bool covered = plateau_covers(p, k, rho_max);
  if (route == Route::Plateau && !covered)
    throw PreconditionError("the box is not inside the cutoff plateau up to the truncation radius");
  IterateNorms out;
  out.rho_max = rho_max;
  const auto tg = grid.tensor(k);
  const std::size_t n = tg.nodes.size();

  if (route != Route::Generic && covered) {
    out.route = "plateau";
    // Distinct phases t = <y - x0, xi0> over the grid.
    std::vector<double> ts;
    std::vector<std::size_t> which;
    std::vector<double> weight;
    std::map<double, std::size_t> seen;
    std::vector<std::size_t> idx(n, 0);
    for (bool more = true; more;) {
      double t = 0.0, w = 1.0;
      for (std::size_t a = 0; a < n; ++a) {
        t += p.xi0()[a] * (tg.nodes[a][idx[a]] - p.x0()[a]);
        w *= tg.weights[a][idx[a]];
      }
      auto [it, fresh] = seen.emplace(t, ts.size());
      if (fresh) ts.push_back(t);
      which.push_back(it->second);
      weight.push_back(w);
      more = false;
      for (std::size_t a = n; a-- > 0;) {
        if (++idx[a] < tg.nodes[a].size()) {
          more = true;
          break;
        }
        idx[a] = 0;
      }
    }
    double t_max = 0.0;
    for (double t : ts) t_max = std::max(t_max, std::abs(t));
    const double width = t_max > 0.0 ? std::numbers::pi / t_max : INFINITY;
    const auto rule = kronrod_rule(panel_edges(1.0, rho_max, width));
    std::vector<double> w(rule.nodes.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = rule.weights[i] * std::exp(-std::pow(rule.nodes[i], p.eta()));
    const auto moments = kernels::oscillatory_moments(ts, rule.nodes, w, top, exec);
    const auto sym1 = symbol_along(op, p.xi0());
    std::vector<Complex> poly{1.0};
    for (int q = 0; q <= J; ++q) {
      std::vector<Complex> f(ts.size(), 0.0);
      for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = 0; j < poly.size(); ++j) f[i] += poly[j] * moments[i][j];
      double sum = 0.0;
      for (std::size_t k2 = 0; k2 < which.size(); ++k2) sum += weight[k2] * std::norm(f[which[k2]]);
      out.norms.push_back(std::sqrt(sum));
      poly = poly_mul(poly, sym1);
    }
    return out;
  }

  out.route = "generic";
  for (int q = 0; q <= J; ++q) {
    const sym::Compiled integrand(assembled_integrand(p, op, q));
    std::vector<double> part(tg.nodes[0].size(), 0.0);
    auto row = [&](std::size_t r) {
      std::vector<std::size_t> idx(n, 0);
      idx[0] = r;
      std::vector<double> x(n);
      double acc = 0.0;
      for (bool more = true; more;) {
        double w = 1.0;
        for (std::size_t a = 0; a < n; ++a) {
          x[a] = tg.nodes[a][idx[a]];
          w *= tg.weights[a][idx[a]];
        }
        if (w != 0.0) acc += w * std::norm(integrate_compiled(p, integrand, q * op.order(), x, opts).value);
        more = false;
        for (std::size_t a = n; a-- > 1;) {
          if (++idx[a] < tg.nodes[a].size()) {
            more = true;
            break;
          }
          idx[a] = 0;
        }
      }
      part[r] = acc;
    };
    if (exec == kernels::Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::size_t r = 0; r < part.size(); ++r) row(r);
    } else {
      for (std::size_t r = 0; r < part.size(); ++r) row(r);
    }
    double sum = 0.0;
    for (double v : part) sum += v;
    out.norms.push_back(std::sqrt(sum));
  }
  return out;
}

Box default_box(const MetivierParams& p, double half_width) {
  std::vector<double> lo(p.x0()), hi(p.x0());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] -= half_width;
    hi[i] += half_width;
  }
  return Box(lo, hi);
}

analysis::QuadratureGrid default_grid(const MetivierParams& p) {
  analysis::QuadratureGrid g;
  for (double c : p.xi0()) g.nodes.push_back(c != 0.0 ? 2001 : 33);
  return g;
}

double stirling_exponent(const std::vector<double>& alpha, const std::vector<double>& y) {
  if (alpha.size() != y.size()) throw ParameterError("stirling_exponent: length mismatch");
  if (alpha.size() < 4) return std::nan("");
  Eigen::MatrixXd a(alpha.size(), 4);
  Eigen::VectorXd b(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] > 0.0)) throw ParameterError("stirling_exponent needs alpha > 0");
    const double l = std::log(alpha[i]);
    a(i, 0) = alpha[i] * l;
    a(i, 1) = alpha[i];
    a(i, 2) = l;
    a(i, 3) = 1.0;
    b(i) = y[i];
  }
  return a.colPivHouseholderQr().solve(b)(0);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Counterexample: return "counterexample";
    case Verdict::NoCounterexample: return "no counterexample";
    case Verdict::Inconclusive: return "inconclusive";
    default: return "none";
  }
}

Verdict classify(double derivative_exponent, double iterate_exponent, double s, double margin) {
  if (!std::isfinite(derivative_exponent) || !std::isfinite(iterate_exponent)) return Verdict::None;
  const double gap = derivative_exponent - iterate_exponent;
  if (derivative_exponent > s + margin && iterate_exponent <= s + margin && gap > margin) return Verdict::Counterexample;
  if (std::abs(gap) < margin) return Verdict::NoCounterexample;
  return Verdict::Inconclusive;
}

namespace {

std::vector<SideFit> fit_side(const RunSide& side, int m, const std::vector<weights::YoungConjugate>& conjs) {
  std::vector<SideFit> fits;
  if (side.log_norm.empty()) return fits;
  std::vector<double> norms;
  for (double l : side.log_norm) norms.push_back(std::exp(l));
  for (const auto& c : conjs) {
    const auto f = analysis::fit_roumieu(norms, c, m);
    fits.push_back({c.weight().spec(), f.k_star, f.log_c_star, f.stable});
  }
  return fits;
}

RunSide iterate_side(const MetivierParams& p, const pdo::LinearPDO& op, const Box& box,
                     const analysis::QuadratureGrid& grid, const CounterexampleOptions& opts, std::string& route) {
  RunSide side;
  const auto t = iterate_l2_norms(p, op, box, opts.J, grid, opts.quad, Route::Auto, opts.exec);
  route = t.route;
  std::vector<double> a, y;
  for (int q = 0; q <= opts.J; ++q) {
    side.index.push_back(static_cast<double>(q) * op.order());
    side.log_norm.push_back(std::log(t.norms[q]));
    if (q >= 1) {
      a.push_back(side.index.back());
      y.push_back(side.log_norm.back());
    }
  }
  side.exponent = stirling_exponent(a, y);
  return side;
}

}  // namespace

CounterexampleReport counterexample_report(const MetivierParams& p, const CounterexampleOptions& opts) {
  if (opts.J < 0 || opts.alpha_max < 0) throw ParameterError("J and alpha_max must be >= 0");
  CounterexampleReport r;
  r.eta = p.eta();
  r.inv_eta = 1.0 / r.eta;
  r.eps_bound = p.eps_bound();
  r.op = p.op().to_string();
  r.box = opts.box ? *opts.box : default_box(p);
  const auto grid = opts.grid ? *opts.grid : default_grid(p);
  r.caveats.push_back("finite window: exponents are least-squares fits over the computed indices");

  const std::string omega = opts.omega.empty() ? "logpower:s=" + sym::format_number(p.s()) : opts.omega;
  const std::string target =
      opts.target.empty() ? "gevrey:s=" + sym::format_number(0.5 * (p.s() + r.inv_eta)) : opts.target;
  const std::vector<weights::YoungConjugate> conjs{weights::YoungConjugate(weights::Weight::parse(omega)),
                                                   weights::YoungConjugate(weights::Weight::parse(target))};

  std::vector<double> a, y;
  for (int alpha = 0; alpha <= opts.alpha_max; ++alpha) {
    r.derivative.index.push_back(alpha);
    r.derivative.log_norm.push_back(log_leading_term(r.eta, alpha));
    if (alpha >= std::max(1, opts.alpha_min)) {
      a.push_back(alpha);
      y.push_back(r.derivative.log_norm.back());
    }
  }
  r.derivative.exponent = stirling_exponent(a, y);
  if (std::isnan(r.derivative.exponent)) r.caveats.push_back("derivative window has fewer than four indices");
  r.derivative.fits = fit_side(r.derivative, 1, conjs);

  r.iterate = iterate_side(p, p.op(), r.box, grid, opts, r.route);
  if (std::isnan(r.iterate.exponent)) r.caveats.push_back("iterate window has fewer than four indices");
  r.iterate.fits = fit_side(r.iterate, p.m(), conjs);

  r.gap = r.derivative.exponent - r.iterate.exponent;
  r.verdict = classify(r.derivative.exponent, r.iterate.exponent, p.s(), opts.margin);

  if (opts.control) {
    std::string route;
    r.control = iterate_side(p, *opts.control, r.box, grid, opts, route);
    r.control->fits = fit_side(*r.control, opts.control->order(), conjs);
    r.control_op = opts.control->to_string();
    r.control_gap = r.derivative.exponent - r.control->exponent;
    r.control_verdict = classify(r.derivative.exponent, r.control->exponent, p.s(), opts.margin);
  }
  return r;
}

}  // namespace kn::metivier
