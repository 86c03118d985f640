#include "kn/symbolic/expr.hpp"

#include <algorithm>
#include <charconv>
#include <climits>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "kn/error.hpp"
#include "kn/symbolic/multi_index.hpp"

namespace kn::sym {

namespace {

Expr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

bool is_integer(double p) { return std::isfinite(p) && std::floor(p) == p; }

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

int var_rank(int id) { return id == kRho ? INT_MAX : id; }

template <class T>
int cmp3(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

}  // namespace

// ---- factories ------------------------------------------------------------

Expr constant(Complex c) {
  if (c.real() == 0.0) c.real(0.0);
  if (c.imag() == 0.0) c.imag(0.0);
  Node n;
  n.kind = Kind::Const;
  n.value = c;
  return make(std::move(n));
}

Expr variable(int id) {
  if (id < 0 && id != kRho) throw ParameterError("invalid variable id " + std::to_string(id));
  Node n;
  n.kind = Kind::Var;
  n.var = id;
  return make(std::move(n));
}

Expr rho() { return variable(kRho); }

Expr add(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  Complex c = 0.0;
  std::function<void(const Expr&)> push = [&](const Expr& t) {
    if (t->kind == Kind::Add) {
      for (const auto& a : t->args) push(a);
    } else if (t->kind == Kind::Const) {
      c += t->value;
    } else {
      flat.push_back(t);
    }
  };
  for (const auto& t : terms) push(t);
  if (flat.empty()) return constant(c);
  if (c != Complex(0.0)) flat.push_back(constant(c));
  if (flat.size() == 1) return flat.front();
  Node n;
  n.kind = Kind::Add;
  n.args = std::move(flat);
  return make(std::move(n));
}

Expr mul(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  Complex c = 1.0;
  std::function<void(const Expr&)> push = [&](const Expr& f) {
    if (f->kind == Kind::Mul) {
      for (const auto& a : f->args) push(a);
    } else if (f->kind == Kind::Const) {
      c *= f->value;
    } else {
      flat.push_back(f);
    }
  };
  for (const auto& f : factors) push(f);
  if (c == Complex(0.0)) return constant(0.0);
  if (flat.empty()) return constant(c);
  if (c != Complex(1.0)) flat.insert(flat.begin(), constant(c));
  if (flat.size() == 1) return flat.front();
  Node n;
  n.kind = Kind::Mul;
  n.args = std::move(flat);
  return make(std::move(n));
}

Expr power(Expr base, double exponent) {
  if (!std::isfinite(exponent)) throw ParameterError("non-finite exponent");
  if (exponent == 1.0) return base;
  if (exponent == 0.0) return constant(1.0);
  if (base->kind == Kind::Const) {
    const Complex b = base->value;
    if (is_integer(exponent) && std::abs(exponent) < 1e15) {
      if (!(b == Complex(0.0) && exponent < 0)) return constant(ipow(b, static_cast<long long>(exponent)));
    } else if (b.imag() == 0.0 && b.real() >= 0.0) {
      return constant(std::pow(b.real(), exponent));
    }
  }
  Node n;
  n.kind = Kind::Pow;
  n.exponent = exponent;
  n.args = {std::move(base)};
  return make(std::move(n));
}

Expr func(Fn fn, Expr arg) {
  if (arg->kind == Kind::Const) {
    const Complex a = arg->value;
    switch (fn) {
      case Fn::Exp: return constant(std::exp(a));
      case Fn::Sin: return constant(std::sin(a));
      case Fn::Cos: return constant(std::cos(a));
      case Fn::Log:
        if (a.imag() == 0.0 && a.real() > 0.0) return constant(std::log(a.real()));
        break;
    }
  }
  Node n;
  n.kind = Kind::Func;
  n.fn = fn;
  n.args = {std::move(arg)};
  return make(std::move(n));
}

Expr bump(double sigma, int order, Expr arg) {
  if (!(sigma > 1.0) || !std::isfinite(sigma)) throw ParameterError("bump profile needs sigma > 1");
  if (order < 0) throw ParameterError("bump derivative order must be >= 0");
  if (arg->kind == Kind::Const && arg->value.imag() == 0.0)
    return constant(gevrey_profile(sigma, order, arg->value.real()));
  Node n;
  n.kind = Kind::Bump;
  n.sigma = sigma;
  n.order = order;
  n.args = {std::move(arg)};
  return make(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({constant(-1.0), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator-(const Expr& a) { return mul({constant(-1.0), a}); }
Expr exp(const Expr& a) { return func(Fn::Exp, a); }
Expr log(const Expr& a) { return func(Fn::Log, a); }
Expr sin(const Expr& a) { return func(Fn::Sin, a); }
Expr cos(const Expr& a) { return func(Fn::Cos, a); }

bool is_const(const Expr& e) { return e->kind == Kind::Const; }
bool is_zero(const Expr& e) { return e->kind == Kind::Const && e->value == Complex(0.0); }

// ---- structure ------------------------------------------------------------

int compare(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return cmp3(static_cast<int>(a->kind), static_cast<int>(b->kind));
  int c = 0;
  switch (a->kind) {
    case Kind::Const:
      if ((c = cmp3(a->value.real(), b->value.real()))) return c;
      return cmp3(a->value.imag(), b->value.imag());
    case Kind::Var:
      return cmp3(var_rank(a->var), var_rank(b->var));
    case Kind::Pow:
      if ((c = cmp3(a->exponent, b->exponent))) return c;
      break;
    case Kind::Func:
      if ((c = cmp3(static_cast<int>(a->fn), static_cast<int>(b->fn)))) return c;
      break;
    case Kind::Bump:
      if ((c = cmp3(a->sigma, b->sigma))) return c;
      if ((c = cmp3(a->order, b->order))) return c;
      break;
    default:
      break;
  }
  const std::size_t n = std::min(a->args.size(), b->args.size());
  for (std::size_t i = 0; i < n; ++i)
    if ((c = compare(a->args[i], b->args[i]))) return c;
  return cmp3(a->args.size(), b->args.size());
}

bool same(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

int dimension(const Expr& e) {
  if (e->kind == Kind::Var) return e->var == kRho ? 0 : e->var + 1;
  int d = 0;
  for (const auto& a : e->args) d = std::max(d, dimension(a));
  return d;
}

bool depends_on(const Expr& e, int var) {
  if (e->kind == Kind::Var) return e->var == var;
  return std::any_of(e->args.begin(), e->args.end(), [&](const Expr& a) { return depends_on(a, var); });
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 1;
  for (const auto& a : e->args) n += node_count(a);
  return n;
}

std::size_t term_count(const Expr& e) {
  if (e->kind == Kind::Add) return e->args.size();
  return is_zero(e) ? 0 : 1;
}

// ---- printing -------------------------------------------------------------

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string format_complex(Complex c) {
  if (c.imag() == 0.0) return format_number(c.real());
  if (c.real() == 0.0 && c.imag() == 1.0) return "i";
  std::string im = c.imag() == 1.0 ? "i" : c.imag() == -1.0 ? "-i" : format_number(c.imag()) + "*i";
  if (c.real() == 0.0) return "(" + im + ")";
  if (c.imag() < 0) {
    std::string mag = c.imag() == -1.0 ? "i" : format_number(-c.imag()) + "*i";
    return "(" + format_number(c.real()) + "-" + mag + ")";
  }
  return "(" + format_number(c.real()) + "+" + im + ")";
}

bool negative_real(const Expr& e) { return e->kind == Kind::Const && e->value.imag() == 0.0 && e->value.real() < 0; }

// A summand that should be printed with a leading " - ".
bool prints_negative(const Expr& t) {
  if (negative_real(t)) return true;
  return t->kind == Kind::Mul && negative_real(t->args.front());
}

Expr negated(const Expr& t) {
  if (t->kind == Kind::Const) return constant(-t->value);
  std::vector<Expr> f = t->args;
  f.front() = constant(-f.front()->value);
  return mul(std::move(f));
}

// Precedence: 1 sum, 2 product, 3 unary minus, 4 power, 5 atom.
void print(const Expr& e, int ctx, std::string& out);

void print_paren(const Expr& e, int prec, int ctx, std::string& out) {
  if (prec < ctx) {
    out += '(';
    print(e, 0, out);
    out += ')';
  } else {
    print(e, prec, out);
  }
}

void print(const Expr& e, int ctx, std::string& out) {
  switch (e->kind) {
    case Kind::Const: {
      std::string s = format_complex(e->value);
      bool neg = s.front() == '-';
      if (neg && ctx > 1) {
        out += "(" + s + ")";
      } else {
        out += s;
      }
      return;
    }
    case Kind::Var:
      out += e->var == kRho ? std::string("rho") : "x" + std::to_string(e->var + 1);
      return;
    case Kind::Add: {
      std::string s;
      for (std::size_t k = 0; k < e->args.size(); ++k) {
        const Expr& t = e->args[k];
        if (k > 0 && prints_negative(t)) {
          s += " - ";
          print(negated(t), 2, s);
        } else {
          if (k > 0) s += " + ";
          print(t, k == 0 ? 1 : 2, s);
        }
      }
      if (ctx > 1) {
        out += "(" + s + ")";
      } else {
        out += s;
      }
      return;
    }
    case Kind::Mul: {
      std::string s;
      std::size_t k = 0;
      bool unary = false;
      const Expr& lead = e->args.front();
      if (lead->kind == Kind::Const) {
        if (lead->value == Complex(-1.0)) {
          s += "-";
          unary = true;
        } else {
          std::string c = format_complex(lead->value);
          s += c + "*";
          unary = c.front() == '-';
        }
        k = 1;
      }
      for (std::size_t j = k; j < e->args.size(); ++j) {
        if (j > k) s += "*";
        print_paren(e->args[j], e->args[j]->kind == Kind::Add ? 1 : 4, 2, s);
      }
      if (ctx > (unary ? 1 : 2)) {
        out += "(" + s + ")";
      } else {
        out += s;
      }
      return;
    }
    case Kind::Pow: {
      std::string s;
      const Expr& b = e->args.front();
      bool atom = b->kind == Kind::Var || b->kind == Kind::Func || b->kind == Kind::Bump ||
                  (b->kind == Kind::Const && b->value.imag() == 0.0 && b->value.real() >= 0);
      if (atom) {
        print(b, 5, s);
      } else {
        s += "(";
        print(b, 0, s);
        s += ")";
      }
      s += "^";
      if (e->exponent < 0) {
        s += "(" + format_number(e->exponent) + ")";
      } else {
        s += format_number(e->exponent);
      }
      if (ctx > 4) {
        out += "(" + s + ")";
      } else {
        out += s;
      }
      return;
    }
    case Kind::Func: {
      static const char* names[] = {"exp", "log", "sin", "cos"};
      out += names[static_cast<int>(e->fn)];
      out += "(";
      print(e->args.front(), 0, out);
      out += ")";
      return;
    }
    case Kind::Bump:
      out += "bump(" + format_number(e->sigma) + ", " + std::to_string(e->order) + ", ";
      print(e->args.front(), 0, out);
      out += ")";
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, 0, out);
  return out;
}

// ---- calculus -------------------------------------------------------------

namespace {

Expr derive_raw(const Expr& e, int var, std::unordered_map<const Node*, Expr>& memo) {
  if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
  Expr r;
  switch (e->kind) {
    case Kind::Const:
      r = constant(0.0);
      break;
    case Kind::Var:
      r = constant(e->var == var ? 1.0 : 0.0);
      break;
    case Kind::Add: {
      std::vector<Expr> t;
      for (const auto& a : e->args) t.push_back(derive_raw(a, var, memo));
      r = add(std::move(t));
      break;
    }
    case Kind::Mul: {
      std::vector<Expr> t;
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        Expr di = derive_raw(e->args[i], var, memo);
        if (is_zero(di)) continue;
        std::vector<Expr> f = e->args;
        f[i] = di;
        t.push_back(mul(std::move(f)));
      }
      r = add(std::move(t));
      break;
    }
    case Kind::Pow: {
      const Expr& b = e->args.front();
      Expr db = derive_raw(b, var, memo);
      r = is_zero(db) ? constant(0.0) : mul({constant(e->exponent), power(b, e->exponent - 1.0), db});
      break;
    }
    case Kind::Func: {
      const Expr& a = e->args.front();
      Expr da = derive_raw(a, var, memo);
      if (is_zero(da)) {
        r = constant(0.0);
        break;
      }
      switch (e->fn) {
        case Fn::Exp: r = mul({e, da}); break;
        case Fn::Log: r = mul({power(a, -1.0), da}); break;
        case Fn::Sin: r = mul({cos(a), da}); break;
        case Fn::Cos: r = mul({constant(-1.0), sin(a), da}); break;
      }
      break;
    }
    case Kind::Bump: {
      const Expr& a = e->args.front();
      Expr da = derive_raw(a, var, memo);
      r = is_zero(da) ? constant(0.0) : mul({bump(e->sigma, e->order + 1, a), da});
      break;
    }
  }
  memo.emplace(e.get(), r);
  return r;
}

Expr rebuild_with(const Expr& e, std::vector<Expr> args) {
  switch (e->kind) {
    case Kind::Add: return add(std::move(args));
    case Kind::Mul: return mul(std::move(args));
    case Kind::Pow: return power(args.front(), e->exponent);
    case Kind::Func: return func(e->fn, args.front());
    case Kind::Bump: return bump(e->sigma, e->order, args.front());
    default: return e;
  }
}

Expr subst_raw(const Expr& e, int var, const Expr& value, std::unordered_map<const Node*, Expr>& memo) {
  if (e->kind == Kind::Var) return e->var == var ? value : e;
  if (e->args.empty()) return e;
  if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
  std::vector<Expr> args;
  args.reserve(e->args.size());
  for (const auto& a : e->args) args.push_back(subst_raw(a, var, value, memo));
  Expr r = rebuild_with(e, std::move(args));
  memo.emplace(e.get(), r);
  return r;
}

}  // namespace

Expr differentiate(const Expr& e, int var, const SimplifyOptions& opts) {
  std::unordered_map<const Node*, Expr> memo;
  return simplify(derive_raw(e, var, memo), opts);
}

Expr substitute(const Expr& e, int var, const Expr& value) {
  std::unordered_map<const Node*, Expr> memo;
  return subst_raw(e, var, value, memo);
}

std::vector<Expr> polynomial_coefficients(const Expr& e, int var) {
  Expr s = simplify(e);
  std::vector<std::vector<Expr>> parts;
  auto terms = s->kind == Kind::Add ? s->args : std::vector<Expr>{s};
  for (const auto& t : terms) {
    if (is_zero(t)) continue;
    auto factors = t->kind == Kind::Mul ? t->args : std::vector<Expr>{t};
    int p = 0;
    std::vector<Expr> rest;
    for (const auto& f : factors) {
      if (f->kind == Kind::Var && f->var == var) {
        p += 1;
      } else if (f->kind == Kind::Pow && f->args.front()->kind == Kind::Var && f->args.front()->var == var &&
                 is_integer(f->exponent) && f->exponent > 0) {
        p += static_cast<int>(f->exponent);
      } else if (depends_on(f, var)) {
        throw ParameterError("not polynomial in the requested variable: " + to_string(f));
      } else {
        rest.push_back(f);
      }
    }
    if (parts.size() <= static_cast<std::size_t>(p)) parts.resize(p + 1);
    parts[p].push_back(mul(std::move(rest)));
  }
  std::vector<Expr> out;
  for (auto& p : parts) out.push_back(simplify(add(std::move(p))));
  return out;
}

// ---- multi-indices --------------------------------------------------------

int MultiIndex::order() const { return std::accumulate(a_.begin(), a_.end(), 0); }

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int v : a_) f *= std::tgamma(v + 1.0);
  return f;
}

bool MultiIndex::le(const MultiIndex& o) const {
  for (std::size_t i = 0; i < a_.size(); ++i)
    if (a_[i] > o.a_[i]) return false;
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  MultiIndex r(*this);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
  return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
  MultiIndex r(*this);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
  return r;
}

std::string MultiIndex::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < a_.size(); ++i) s += (i ? "," : "") + std::to_string(a_[i]);
  return s + "]";
}

MultiIndex MultiIndex::unit(std::size_t n, std::size_t i) {
  MultiIndex r(n);
  r[i] = 1;
  return r;
}

double binomial(const MultiIndex& alpha, const MultiIndex& beta) {
  double b = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    int n = alpha[i], k = beta[i];
    double c = 1.0;
    for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
    b *= c;
  }
  return b;
}

std::vector<MultiIndex> indices_of_order(std::size_t n, int q) {
  std::vector<MultiIndex> out;
  if (n == 0) {
    if (q == 0) out.emplace_back(0);
    return out;
  }
  MultiIndex cur(n);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == n) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, q);
  return out;
}

std::vector<MultiIndex> indices_below(const MultiIndex& alpha) {
  std::vector<MultiIndex> out;
  MultiIndex cur(alpha.size());
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == alpha.size()) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= alpha[i]; ++v) {
      cur[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace kn::sym
