#include "kn/symbolic/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "kn/error.hpp"

namespace kn::sym {

namespace {

class Parser {
 public:
  Parser(std::string_view text, int n) : s_(text), n_(n) {
    if (n < 0) throw ParameterError("dimension must be >= 0");
  }

  Expr parse_all() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  std::vector<OperatorTerm> parse_operator() {
    std::vector<OperatorTerm> out;
    out.push_back(op_term(false));
    for (;;) {
      skip();
      if (accept('+')) {
        out.push_back(op_term(false));
      } else if (accept('-')) {
        out.push_back(op_term(true));
      } else {
        break;
      }
    }
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(-term());
      } else {
        return add(std::move(terms));
      }
    }
  }

  Expr term() {
    std::vector<Expr> f{unary()};
    for (;;) {
      if (accept('*')) {
        f.push_back(unary());
      } else if (accept('/')) {
        f.push_back(power(unary(), -1.0));
      } else {
        return mul(std::move(f));
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return pow_level();
  }

  Expr pow_level() {
    Expr base = primary();
    if (accept('^')) {
      std::size_t at = pos_;
      Expr ex = unary();
      if (ex->kind == Kind::Const) {
        if (ex->value.imag() != 0.0) {
          pos_ = at;
          fail("complex exponent");
        }
        return power(base, ex->value.real());
      }
      return exp(ex * log(base));
    }
    return base;
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0;
    auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return constant(v);
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  double constant_arg(const char* what) {
    std::size_t at = pos_;
    Expr e = expr();
    if (e->kind != Kind::Const || e->value.imag() != 0.0) {
      pos_ = at;
      fail(std::string(what) + " must be a real constant");
    }
    return e->value.real();
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected character '" + std::string(1, c) + "'");
    std::size_t start = pos_;
    std::string id = identifier();
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      Expr r = call(id, start);
      expect(')');
      return r;
    }
    if (id == "pi") return constant(std::numbers::pi);
    if (id == "i") return constant(Complex(0.0, 1.0));
    if (id == "rho") return rho();
    if (id.size() > 1 && id[0] == 'x' && id.find_first_not_of("0123456789", 1) == std::string::npos) {
      int k = std::stoi(id.substr(1));
      if (k < 1 || k > n_) {
        pos_ = start;
        fail("variable " + id + " outside x1..x" + std::to_string(n_));
      }
      return variable(k - 1);
    }
    pos_ = start;
    fail("unknown identifier '" + id + "'");
  }

  Expr call(const std::string& name, std::size_t start) {
    if (name == "exp") return exp(expr());
    if (name == "log") return log(expr());
    if (name == "sin") return sin(expr());
    if (name == "cos") return cos(expr());
    if (name == "sqrt") return power(expr(), 0.5);
    if (name == "gbump") {
      double sigma = constant_arg("gbump parameter");
      expect(',');
      Expr r = expr();
      check_sigma(sigma, start);
      return bump(sigma, 0, power(r, 2.0));
    }
    if (name == "bump") {
      double sigma = constant_arg("bump parameter");
      expect(',');
      double k = constant_arg("bump order");
      expect(',');
      Expr a = expr();
      check_sigma(sigma, start);
      if (k < 0 || std::floor(k) != k) {
        pos_ = start;
        fail("bump order must be a nonnegative integer");
      }
      return bump(sigma, static_cast<int>(k), a);
    }
    pos_ = start;
    fail("unknown function '" + name + "'");
  }

  void check_sigma(double sigma, std::size_t start) {
    if (!(sigma > 1.0)) {
      pos_ = start;
      fail("bump parameter must exceed 1");
    }
  }

  // Operator summand: product of ordinary factors and at most one D[...] marker.
  OperatorTerm op_term(bool negate) {
    OperatorTerm t;
    t.alpha = MultiIndex(static_cast<std::size_t>(n_));
    std::vector<Expr> coef;
    if (negate) coef.push_back(constant(-1.0));
    bool have_marker = false;
    bool divide = false;
    for (bool first = true;; first = false) {
      skip();
      if (first) {
        if (accept('-')) {
          coef.push_back(constant(-1.0));
        } else {
          accept('+');
        }
      }
      skip();
      std::size_t at = pos_;
      auto marker = try_marker();
      if (marker) {
        if (have_marker) {
          pos_ = at;
          fail("more than one derivative symbol in a term");
        }
        if (divide) {
          pos_ = at;
          fail("cannot divide by a derivative symbol");
        }
        have_marker = true;
        t.alpha = marker->first;
        t.d_form = marker->second;
      } else {
        Expr f = unary();
        coef.push_back(divide ? power(f, -1.0) : f);
      }
      if (accept('*')) {
        divide = false;
      } else if (accept('/')) {
        divide = true;
      } else {
        break;
      }
    }
    t.coefficient = mul(std::move(coef));
    return t;
  }

  std::optional<std::pair<MultiIndex, bool>> try_marker() {
    if (pos_ + 1 >= s_.size()) return std::nullopt;
    char c = s_[pos_];
    if (c != 'D' && c != 'd') return std::nullopt;
    std::size_t save = pos_;
    ++pos_;
    skip();
    if (pos_ >= s_.size() || s_[pos_] != '[') {
      pos_ = save;
      return std::nullopt;
    }
    ++pos_;
    std::vector<int> a;
    for (;;) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a nonnegative integer in multi-index");
      a.push_back(std::stoi(std::string(s_.substr(start, pos_ - start))));
      if (accept(',')) continue;
      expect(']');
      break;
    }
    if (static_cast<int>(a.size()) != n_) {
      pos_ = save;
      fail("multi-index has " + std::to_string(a.size()) + " entries, expected " + std::to_string(n_));
    }
    return std::make_pair(MultiIndex(std::move(a)), c == 'D');
  }

  std::string_view s_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, int n) { return Parser(text, n).parse_all(); }

std::vector<OperatorTerm> parse_operator_terms(std::string_view text, int n) {
  return Parser(text, n).parse_operator();
}

}  // namespace kn::sym
