#include <cmath>
#include <map>
#include <unordered_map>

#include "kn/error.hpp"
#include "kn/symbolic/expr.hpp"

namespace kn::sym {

namespace {

struct Factor {
  Expr atom;
  double exp;
};

using Monomial = std::vector<Factor>;

int compare_factor(const Factor& a, const Factor& b) {
  if (int c = compare(a.atom, b.atom)) return c;
  if (a.exp != b.exp) return a.exp > b.exp ? -1 : 1;
  return 0;
}

struct MonoLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
      if (int c = compare_factor(a[i], b[i])) return c < 0;
    return a.size() < b.size();
  }
};

using Poly = std::map<Monomial, Complex, MonoLess>;

bool is_integer(double p) { return std::floor(p) == p; }

Monomial merge(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c = i == a.size() ? 1 : j == b.size() ? -1 : compare(a[i].atom, b[j].atom);
    if (c < 0) {
      r.push_back(a[i++]);
    } else if (c > 0) {
      r.push_back(b[j++]);
    } else {
      double e = a[i].exp + b[j].exp;
      if (e != 0.0) r.push_back({a[i].atom, e});
      ++i;
      ++j;
    }
  }
  return r;
}

void accumulate(Poly& p, const Monomial& m, Complex c) {
  if (c == Complex(0.0)) return;
  auto [it, inserted] = p.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex(0.0)) p.erase(it);
  }
}

class Simplifier {
 public:
  explicit Simplifier(const SimplifyOptions& o) : opts_(o) {}

  Expr canon(const Expr& e) {
    if (auto it = canon_memo_.find(e.get()); it != canon_memo_.end()) return it->second;
    Expr r = rebuild(poly(e));
    canon_memo_.emplace(e.get(), r);
    keep_.push_back(e);
    return r;
  }

  Poly poly(const Expr& e) {
    switch (e->kind) {
      case Kind::Const: {
        Poly p;
        accumulate(p, {}, e->value);
        return p;
      }
      case Kind::Var:
        return atom_poly(e, 1.0);
      case Kind::Add: {
        Poly p;
        for (const auto& a : e->args)
          for (const auto& [m, c] : poly(a)) accumulate(p, m, c);
        check(p);
        return p;
      }
      case Kind::Mul: {
        Poly p;
        accumulate(p, {}, 1.0);
        for (const auto& a : e->args) {
          Poly q = poly(a);
          if (!opts_.expand && q.size() > 1) q = atom_poly(rebuild(q), 1.0);
          p = product(p, q);
          if (p.empty()) break;
        }
        return p;
      }
      case Kind::Pow:
        return power_poly(poly(e->args.front()), e->exponent, e);
      case Kind::Func: {
        Expr f = func(e->fn, canon(e->args.front()));
        if (f->kind == Kind::Const) return poly(f);
        return atom_poly(f, 1.0);
      }
      case Kind::Bump: {
        Expr b = bump(e->sigma, e->order, canon(e->args.front()));
        if (b->kind == Kind::Const) return poly(b);
        return atom_poly(b, 1.0);
      }
    }
    return {};
  }

  Expr rebuild(const Poly& p) {
    if (p.empty()) return constant(0.0);
    std::vector<Expr> terms;
    terms.reserve(p.size());
    const Complex* const_term = nullptr;
    for (const auto& [m, c] : p) {
      if (m.empty()) {
        const_term = &c;
        continue;
      }
      std::vector<Expr> f;
      if (c != Complex(1.0)) f.push_back(constant(c));
      for (const auto& fa : m) f.push_back(fa.exp == 1.0 ? fa.atom : power(fa.atom, fa.exp));
      terms.push_back(f.size() == 1 ? f.front() : raw(Kind::Mul, std::move(f)));
    }
    if (const_term) terms.push_back(constant(*const_term));
    if (terms.size() == 1) return terms.front();
    return raw(Kind::Add, std::move(terms));
  }

 private:
  static Expr raw(Kind k, std::vector<Expr> args) {
    Node n;
    n.kind = k;
    n.args = std::move(args);
    return std::make_shared<const Node>(std::move(n));
  }

  static Poly atom_poly(const Expr& atom, double exp) {
    Poly p;
    p.emplace(Monomial{{atom, exp}}, 1.0);
    return p;
  }

  void check(const Poly& p) const {
    if (p.size() > opts_.term_budget) throw ResourceError("term_budget", opts_.term_budget);
  }

  Poly product(const Poly& a, const Poly& b) {
    if (a.size() == 1 && a.begin()->first.empty() && a.begin()->second == Complex(1.0)) return b;
    if (a.size() * b.size() > opts_.term_budget * 8 && a.size() > 1 && b.size() > 1)
      throw ResourceError("term_budget", opts_.term_budget);
    Poly r;
    for (const auto& [ma, ca] : a)
      for (const auto& [mb, cb] : b) accumulate(r, merge(ma, mb), ca * cb);
    check(r);
    return r;
  }

  Poly power_poly(const Poly& base, double p, const Expr& original) {
    if (base.empty()) {
      if (p > 0) return {};
      return atom_poly(original, 1.0);
    }
    if (base.size() == 1) {
      const auto& [m, c] = *base.begin();
      if (is_integer(p)) {
        Poly r;
        Monomial mm = m;
        for (auto& f : mm) f.exp *= p;
        Complex cp = 1.0;
        Complex b = c;
        long long k = static_cast<long long>(std::abs(p));
        while (k) {
          if (k & 1) cp *= b;
          b *= b;
          k >>= 1;
        }
        if (p < 0) cp = Complex(1.0) / cp;
        accumulate(r, mm, cp);
        return r;
      }
      if (m.empty()) {
        Expr folded = power(constant(c), p);
        if (folded->kind == Kind::Const) return poly(folded);
        return atom_poly(folded, 1.0);
      }
      if (m.size() == 1 && m.front().exp == 1.0 && c.imag() == 0.0 && c.real() > 0.0) {
        Poly r;
        r.emplace(Monomial{{m.front().atom, p}}, std::pow(c.real(), p));
        return r;
      }
      return atom_poly(rebuild(base), p);
    }
    if (opts_.expand && is_integer(p) && p > 0) {
      Poly r;
      accumulate(r, {}, 1.0);
      Poly b = base;
      long long k = static_cast<long long>(p);
      while (k) {
        if (k & 1) r = product(r, b);
        k >>= 1;
        if (k) b = product(b, b);
      }
      return r;
    }
    return atom_poly(rebuild(base), p);
  }

  SimplifyOptions opts_;
  std::unordered_map<const Node*, Expr> canon_memo_;
  std::vector<Expr> keep_;
};

}  // namespace

Expr simplify(const Expr& e, const SimplifyOptions& opts) {
  Simplifier s(opts);
  return s.rebuild(s.poly(e));
}

}  // namespace kn::sym
