#include "kn/pdo/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "kn/error.hpp"
#include "kn/symbolic/derivatives.hpp"
#include "kn/symbolic/parser.hpp"

namespace kn::pdo {

namespace {

// i^k
Complex i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

void check_budget(std::size_t terms, const sym::SimplifyOptions& opts) {
  if (terms > opts.term_budget) throw ResourceError("term_budget", opts.term_budget);
}

}  // namespace

LinearPDO::LinearPDO(int n, const Coefficients& partial, const sym::SimplifyOptions& opts) : n_(n) {
  if (n < 1) throw ParameterError("operator dimension must be >= 1");
  for (const auto& [alpha, c] : partial) {
    if (static_cast<int>(alpha.size()) != n) throw ParameterError("multi-index length differs from dimension");
    if (sym::dimension(c) > n)
      throw ParameterError("coefficient " + sym::to_string(c) + " uses variables beyond x" + std::to_string(n));
    Expr s = sym::simplify(c, opts);
    if (sym::is_zero(s)) continue;
    coef_.emplace(alpha, std::move(s));
    order_ = std::max(order_, alpha.order());
  }
}

LinearPDO LinearPDO::identity(int n) {
  return LinearPDO(n, Coefficients{{MultiIndex(static_cast<std::size_t>(n)), sym::constant(1.0)}});
}

LinearPDO LinearPDO::from_d_form(int n, const Coefficients& d_coefficients) {
  Coefficients partial;
  for (const auto& [alpha, c] : d_coefficients) partial.emplace(alpha, sym::constant(i_power(-alpha.order())) * c);
  return LinearPDO(n, partial);
}

LinearPDO LinearPDO::parse(std::string_view text, int n) {
  std::map<MultiIndex, std::vector<Expr>, sym::GradedDescending> sums;
  for (auto& t : sym::parse_operator_terms(text, n)) {
    Expr c = t.d_form ? sym::constant(i_power(-t.alpha.order())) * t.coefficient : t.coefficient;
    sums[t.alpha].push_back(std::move(c));
  }
  Coefficients partial;
  for (auto& [alpha, terms] : sums) partial.emplace(alpha, sym::add(std::move(terms)));
  return LinearPDO(n, partial);
}

bool LinearPDO::is_constant_coefficient() const {
  return std::all_of(coef_.begin(), coef_.end(), [](const auto& kv) { return sym::is_const(kv.second); });
}

Coefficients LinearPDO::d_coefficients() const {
  Coefficients out;
  for (const auto& [alpha, c] : coef_)
    out.emplace(alpha, sym::simplify(sym::constant(i_power(alpha.order())) * c));
  return out;
}

Expr LinearPDO::coefficient(const MultiIndex& alpha) const {
  auto it = coef_.find(alpha);
  if (it == coef_.end()) return sym::constant(0.0);
  return sym::simplify(sym::constant(i_power(alpha.order())) * it->second);
}

std::size_t LinearPDO::term_count() const {
  std::size_t n = 0;
  for (const auto& kv : coef_) n += sym::term_count(kv.second);
  return n;
}

std::string LinearPDO::to_string(bool d_form) const {
  if (coef_.empty()) return "0";
  const Coefficients shown = d_form ? d_coefficients() : coef_;
  std::string out;
  for (const auto& [alpha, c] : shown) {
    std::string text = sym::to_string(c);
    if (sym::term_count(c) > 1) text = "(" + text + ")";
    std::string index = alpha.to_string();
    if (out.empty()) {
      out = text;
    } else if (text.front() == '-') {
      out += " - " + text.substr(1);
    } else {
      out += " + " + text;
    }
    out += std::string("*") + (d_form ? "D" : "d") + index;
  }
  return out;
}

bool same(const LinearPDO& a, const LinearPDO& b) {
  if (a.dimension() != b.dimension()) return false;
  const auto& ca = a.partial_coefficients();
  const auto& cb = b.partial_coefficients();
  if (ca.size() != cb.size()) return false;
  for (auto ia = ca.begin(), ib = cb.begin(); ia != ca.end(); ++ia, ++ib)
    if (!(ia->first == ib->first) || !sym::same(ia->second, ib->second)) return false;
  return true;
}

Expr apply(const LinearPDO& p, const Expr& f, const sym::SimplifyOptions& opts) {
  if (sym::dimension(f) > p.dimension())
    throw ParameterError("function uses more variables than the operator dimension");
  sym::DerivativeCache d(f, opts);
  std::vector<Expr> terms;
  for (const auto& [alpha, c] : p.partial_coefficients()) terms.push_back(c * d.get(alpha));
  if (terms.empty()) return sym::constant(0.0);
  Expr out = sym::simplify(sym::add(std::move(terms)), opts);
  check_budget(sym::term_count(out), opts);
  return out;
}

LinearPDO compose(const LinearPDO& p, const LinearPDO& q, const sym::SimplifyOptions& opts) {
  if (p.dimension() != q.dimension()) throw ParameterError("compose: operator dimensions differ");
  // a_alpha d^alpha (b_beta d^beta f) = sum_{gamma <= alpha} binom(alpha, gamma) a_alpha (d^gamma b_beta) d^(alpha - gamma + beta) f
  std::map<MultiIndex, std::vector<Expr>, sym::GradedDescending> sums;
  std::size_t raw_terms = 0;
  for (const auto& [beta, b] : q.partial_coefficients()) {
    sym::DerivativeCache db(b, opts);
    for (const auto& [alpha, a] : p.partial_coefficients()) {
      for (const auto& gamma : sym::indices_below(alpha)) {
        Expr dg = db.get(gamma);
        if (sym::is_zero(dg)) continue;
        const double c = sym::binomial(alpha, gamma);
        sums[alpha - gamma + beta].push_back(sym::constant(c) * a * dg);
        check_budget(++raw_terms, opts);
      }
    }
  }
  Coefficients out;
  std::size_t total = 0;
  for (auto& [delta, terms] : sums) {
    Expr c = sym::simplify(sym::add(std::move(terms)), opts);
    total += sym::term_count(c);
    check_budget(total, opts);
    out.emplace(delta, std::move(c));
  }
  return LinearPDO(p.dimension(), out, opts);
}

LinearPDO iterate(const LinearPDO& p, int q, const sym::SimplifyOptions& opts) {
  if (q < 0) throw ParameterError("iterate: q must be >= 0");
  LinearPDO out = LinearPDO::identity(p.dimension());
  for (int k = 0; k < q; ++k) {
    out = compose(p, out, opts);
    check_budget(out.term_count(), opts);
  }
  return out;
}

LinearPDO principal_part(const LinearPDO& p) {
  Coefficients top;
  for (const auto& [alpha, c] : p.partial_coefficients())
    if (alpha.order() == p.order()) top.emplace(alpha, c);
  return LinearPDO(p.dimension(), top);
}

Complex principal_symbol(const LinearPDO& p, std::span<const double> x, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != p.dimension()) throw ParameterError("covector length differs from dimension");
  if (static_cast<int>(x.size()) != p.dimension()) throw ParameterError("point length differs from dimension");
  Complex sum = 0.0;
  for (const auto& [alpha, c] : p.partial_coefficients()) {
    if (alpha.order() != p.order()) continue;
    double mono = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) mono *= std::pow(xi[i], alpha[i]);
    sum += sym::eval(c, x) * i_power(alpha.order()) * mono;
  }
  return sum;
}

SymbolValue symbol_at(const LinearPDO& p, std::span<const double> x, std::span<const double> xi) {
  return {std::vector<double>(x.begin(), x.end()), std::vector<double>(xi.begin(), xi.end()),
          principal_symbol(p, x, xi)};
}

int minimum_sphere_samples(int n) {
  if (n <= 1) return 2;
  if (n == 2) return 64;
  return 256;
}

std::vector<std::vector<double>> sphere_directions(int n, int count, std::uint64_t seed) {
  if (n < 1) throw ParameterError("sphere dimension must be >= 1");
  std::vector<std::vector<double>> out;
  for (int i = 0; i < n; ++i)
    for (double sign : {1.0, -1.0}) {
      std::vector<double> e(n, 0.0);
      e[i] = sign;
      out.push_back(std::move(e));
    }
  if (n == 1) return out;
  if (n == 2) {
    // Multiple of 4 so the axes are part of the circle.
    const int m = ((count + 3) / 4) * 4;
    out.clear();
    for (int k = 0; k < m; ++k) {
      double a = 2.0 * std::numbers::pi * k / m;
      double c = std::cos(a), s = std::sin(a);
      if (k % (m / 4) == 0) {
        c = std::round(c);
        s = std::round(s);
      }
      out.push_back({c, s});
    }
    return out;
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      double z = 1.0 - (2.0 * k + 1.0) / count;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      out.push_back({r * std::cos(golden * k), r * std::sin(golden * k), z});
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int k = 0; k < count; ++k) {
    std::vector<double> v(n);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& c : v) {
        c = normal(rng);
        norm += c * c;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& c : v) c /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

EllipticityVerdict ellipticity_check(const LinearPDO& p, const Box& k, const EllipticityOptions& opts) {
  const int n = p.dimension();
  if (static_cast<int>(k.dimension()) != n) throw ParameterError("box dimension differs from operator dimension");
  if (opts.x_samples < 5) throw ParameterError("ellipticity_check needs at least 5 x samples per axis");
  const int sphere_count = opts.sphere_samples == 0 ? minimum_sphere_samples(n) : opts.sphere_samples;
  if (sphere_count < minimum_sphere_samples(n))
    throw ParameterError("ellipticity_check needs at least " + std::to_string(minimum_sphere_samples(n)) +
                         " sphere samples in dimension " + std::to_string(n));
  if (!(opts.threshold > 0.0)) throw ParameterError("ellipticity threshold must be positive");

  struct Term {
    MultiIndex alpha;
    sym::Compiled coef;
  };
  std::vector<Term> top;
  for (const auto& [alpha, c] : p.partial_coefficients())
    if (alpha.order() == p.order()) top.push_back({alpha, sym::Compiled(sym::constant(i_power(alpha.order())) * c)});

  const auto dirs = sphere_directions(n, sphere_count, opts.seed);
  std::vector<std::vector<double>> axes(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < opts.x_samples; ++j)
      axes[i].push_back(k.lo[i] + (k.hi[i] - k.lo[i]) * j / (opts.x_samples - 1));

  EllipticityVerdict v;
  v.c_min = INFINITY;
  std::vector<int> idx(n, 0);
  std::vector<double> x(n);
  std::vector<Complex> scratch;
  std::vector<Complex> coef(top.size());
  for (bool more = true; more;) {
    for (int i = 0; i < n; ++i) x[i] = axes[i][idx[i]];
    for (std::size_t t = 0; t < top.size(); ++t) coef[t] = top[t].coef(sym::Point{x, 0.0}, scratch);
    for (const auto& xi : dirs) {
      Complex sum = 0.0;
      for (std::size_t t = 0; t < top.size(); ++t) {
        double mono = 1.0;
        for (int i = 0; i < n; ++i) mono *= std::pow(xi[i], top[t].alpha[i]);
        sum += coef[t] * mono;
      }
      const double a = std::abs(sum);
      ++v.samples;
      v.max_symbol = std::max(v.max_symbol, a);
      if (a < v.c_min) {
        v.c_min = a;
        v.witness_x = x;
        v.witness_xi = xi;
      }
    }
    more = false;
    for (int i = n; i-- > 0;) {
      if (++idx[i] < opts.x_samples) {
        more = true;
        break;
      }
      idx[i] = 0;
    }
  }
  v.threshold = opts.threshold * v.max_symbol;
  v.elliptic = v.max_symbol > 0.0 && v.c_min >= v.threshold;
  return v;
}

}  // namespace kn::pdo
