#include <cmath>
#include <functional>
#include <unordered_map>

#include "kn/error.hpp"
#include "kn/symbolic/expr.hpp"

namespace kn::sym {

double gevrey_profile(double sigma, int order, double s) {
  if (s >= 1.0) return 0.0;
  const double a = 1.0 / (sigma - 1.0);
  const double w = 1.0 - s;
  const double wa = std::pow(w, -a);
  const double f0 = 1.0 - wa;
  if (f0 < -745.0) return 0.0;
  if (order == 0) return std::exp(f0);
  // Taylor coefficients of f(s+d) = 1 - (w-d)^(-a), then of exp(f).
  std::vector<double> f(order + 1), e(order + 1);
  f[0] = f0;
  double c = 1.0;
  double wj = wa;
  for (int j = 1; j <= order; ++j) {
    c *= (a + j - 1) / j;
    wj /= w;
    f[j] = -c * wj;
  }
  e[0] = std::exp(f0);
  for (int k = 1; k <= order; ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += j * f[j] * e[k - j];
    e[k] = acc / k;
  }
  return std::tgamma(order + 1.0) * e[order];
}

namespace {

bool is_integer(double p) { return std::floor(p) == p; }

// Non-owning handle for error messages.
std::string text(const Node* n) { return to_string(Expr(Expr{}, n)); }

Complex ipow(Complex b, long long p) {
  bool inv = p < 0;
  unsigned long long k = inv ? static_cast<unsigned long long>(-p) : static_cast<unsigned long long>(p);
  Complex r = 1.0;
  while (k) {
    if (k & 1ULL) r *= b;
    b *= b;
    k >>= 1ULL;
  }
  return inv ? Complex(1.0) / r : r;
}

Complex pow_value(Complex b, double p, const Node* node) {
  if (is_integer(p) && std::abs(p) < 1e15) {
    if (b == Complex(0.0) && p < 0) throw DomainError("negative power of zero", text(node));
    return ipow(b, static_cast<long long>(p));
  }
  if (b.imag() != 0.0 || b.real() < 0.0)
    throw DomainError("non-integer power of a non-positive base", text(node));
  return std::pow(b.real(), p);
}

Complex func_value(Fn fn, Complex a, const Node* node) {
  switch (fn) {
    case Fn::Exp: return std::exp(a);
    case Fn::Sin: return std::sin(a);
    case Fn::Cos: return std::cos(a);
    case Fn::Log:
      if (a.imag() != 0.0 || !(a.real() > 0.0))
        throw DomainError("log of a non-positive value", text(node));
      return std::log(a.real());
  }
  return 0.0;
}

Complex bump_value(double sigma, int order, Complex a, const Node* node) {
  if (a.imag() != 0.0)
    throw DomainError("bump profile of a complex argument", text(node));
  return gevrey_profile(sigma, order, a.real());
}

Complex checked(Complex v, const Node* node) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw DomainError("non-finite value", text(node));
  return v;
}

double var_value(int var, const Point& p) {
  if (var == kRho) return p.rho;
  if (static_cast<std::size_t>(var) >= p.x.size())
    throw ParameterError("point has dimension " + std::to_string(p.x.size()) + " but expression uses x" +
                         std::to_string(var + 1));
  return p.x[var];
}

Complex eval_rec(const Node* e, const Point& p) {
  switch (e->kind) {
    case Kind::Const: return e->value;
    case Kind::Var: return var_value(e->var, p);
    case Kind::Add: {
      Complex s = 0.0;
      for (const auto& a : e->args) s += eval_rec(a.get(), p);
      return checked(s, e);
    }
    case Kind::Mul: {
      Complex s = 1.0;
      for (const auto& a : e->args) s *= eval_rec(a.get(), p);
      return checked(s, e);
    }
    case Kind::Pow: return checked(pow_value(eval_rec(e->args[0].get(), p), e->exponent, e), e);
    case Kind::Func: return checked(func_value(e->fn, eval_rec(e->args[0].get(), p), e), e);
    case Kind::Bump: return checked(bump_value(e->sigma, e->order, eval_rec(e->args[0].get(), p), e), e);
  }
  return 0.0;
}

std::size_t structural_hash(const Node* e, std::unordered_map<const Node*, std::size_t>& memo) {
  if (auto it = memo.find(e); it != memo.end()) return it->second;
  auto mix = [](std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); };
  std::size_t h = static_cast<std::size_t>(e->kind);
  h = mix(h, std::hash<double>{}(e->value.real()));
  h = mix(h, std::hash<double>{}(e->value.imag()));
  h = mix(h, std::hash<int>{}(e->var));
  h = mix(h, std::hash<double>{}(e->exponent));
  h = mix(h, static_cast<std::size_t>(e->fn));
  h = mix(h, std::hash<double>{}(e->sigma));
  h = mix(h, std::hash<int>{}(e->order));
  for (const auto& a : e->args) h = mix(h, structural_hash(a.get(), memo));
  memo.emplace(e, h);
  return h;
}

}  // namespace

Complex eval(const Expr& e, const Point& p) { return eval_rec(e.get(), p); }

Complex eval(const Expr& e, std::span<const double> x) { return eval_rec(e.get(), Point{x, 0.0}); }

Compiled::Compiled(const Expr& e) : root_(e) {
  std::unordered_map<const Node*, std::size_t> hashes;
  std::unordered_map<const Node*, int> by_ptr;
  std::unordered_map<std::size_t, std::vector<std::pair<Expr, int>>> by_hash;
  std::function<int(const Expr&)> emit = [&](const Expr& n) -> int {
    if (auto it = by_ptr.find(n.get()); it != by_ptr.end()) return it->second;
    std::size_t h = structural_hash(n.get(), hashes);
    auto& bucket = by_hash[h];
    for (const auto& [other, idx] : bucket)
      if (same(other, n)) {
        by_ptr.emplace(n.get(), idx);
        return idx;
      }
    Instr ins{n->kind, n->fn, n->var, n->kind == Kind::Pow ? n->exponent : n->sigma, n->order, n->value, {}, n.get()};
    for (const auto& a : n->args) ins.in.push_back(emit(a));
    int idx = static_cast<int>(code_.size());
    code_.push_back(std::move(ins));
    bucket.emplace_back(n, idx);
    by_ptr.emplace(n.get(), idx);
    return idx;
  };
  emit(e);
}

Complex Compiled::operator()(const Point& p) const {
  std::vector<Complex> scratch;
  return (*this)(p, scratch);
}

Complex Compiled::operator()(const Point& p, std::vector<Complex>& v) const {
  v.resize(code_.size());
  for (std::size_t k = 0; k < code_.size(); ++k) {
    const Instr& ins = code_[k];
    switch (ins.kind) {
      case Kind::Const: v[k] = ins.value; break;
      case Kind::Var: v[k] = var_value(ins.var, p); break;
      case Kind::Add: {
        Complex s = 0.0;
        for (int i : ins.in) s += v[i];
        v[k] = checked(s, ins.node);
        break;
      }
      case Kind::Mul: {
        Complex s = 1.0;
        for (int i : ins.in) s *= v[i];
        v[k] = checked(s, ins.node);
        break;
      }
      case Kind::Pow: v[k] = checked(pow_value(v[ins.in[0]], ins.real, ins.node), ins.node); break;
      case Kind::Func: v[k] = checked(func_value(ins.fn, v[ins.in[0]], ins.node), ins.node); break;
      case Kind::Bump: v[k] = checked(bump_value(ins.real, ins.order, v[ins.in[0]], ins.node), ins.node); break;
    }
  }
  return v.back();
}

}  // namespace kn::sym
