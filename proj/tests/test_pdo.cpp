#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "kn/error.hpp"
#include "kn/pdo/operator.hpp"
#include "kn/symbolic/parser.hpp"

using namespace kn;
using namespace kn::pdo;

namespace {

Complex at(const Expr& e, std::vector<double> x) { return sym::eval(e, std::span<const double>(x)); }

// Random operator in 2-D: order <= 2, polynomial coefficients of degree <= 2.
LinearPDO random_operator(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-3, 3);
  auto poly = [&] {
    std::vector<Expr> terms;
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; a + b <= 2; ++b) {
        const int c = coef(rng);
        if (c == 0 || rng() % 2) continue;
        terms.push_back(sym::constant(c) * sym::power(sym::variable(0), a) * sym::power(sym::variable(1), b));
      }
    return terms.empty() ? sym::constant(1.0) : sym::add(terms);
  };
  Coefficients c;
  for (int q = 0; q <= 2; ++q)
    for (const auto& alpha : sym::indices_of_order(2, q))
      if (rng() % 3 == 0) c[alpha] = poly();
  if (c.empty()) c[MultiIndex{1, 0}] = poly();
  return LinearPDO(2, c);
}

std::vector<Expr> monomial_basis(int degree) {
  std::vector<Expr> out;
  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b)
      out.push_back(sym::power(sym::variable(0), a) * sym::power(sym::variable(1), b));
  return out;
}

bool same_action(const LinearPDO& lhs, const std::function<Expr(const Expr&)>& rhs, int degree,
                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (const auto& f : monomial_basis(degree)) {
    const Expr a = pdo::apply(lhs, f), b = rhs(f);
    for (int k = 0; k < 4; ++k) {
      std::vector<double> x{u(rng), u(rng)};
      const Complex va = at(a, x), vb = at(b, x);
      if (std::abs(va - vb) > 1e-12 * std::max(1.0, std::abs(vb))) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("pdo") {

TEST_CASE("apply examples") {
  auto lap = LinearPDO::parse("1*d[2,0] + 1*d[0,2]", 2);
  CHECK(sym::to_string(pdo::apply(lap, sym::parse("x1^2 + x2^2", 2))) == "4");
  auto xd = LinearPDO::parse("x1*d[1]", 1);
  CHECK(sym::to_string(pdo::apply(xd, sym::parse("x1^3", 1))) == "3*x1^3");
  auto d1 = LinearPDO::parse("1*D[1]", 1);
  auto f = sym::parse("exp(i*x1)", 1);
  auto g = pdo::apply(d1, f);
  for (double x : {0.0, 0.7, -2.0}) CHECK(std::abs(at(g, {x}) - at(f, {x})) < 1e-15);
}

TEST_CASE("compose examples") {
  auto dd = LinearPDO::parse("1*d[2]", 1);
  CHECK(same(compose(dd, dd), LinearPDO::parse("1*d[4]", 1)));
  auto xd = LinearPDO::parse("x1*d[1]", 1);
  CHECK(same(compose(xd, xd), LinearPDO::parse("x1^2*d[2] + x1*d[1]", 1)));
  auto d = LinearPDO::parse("1*d[1]", 1), x = LinearPDO::parse("x1*d[0]", 1);
  Coefficients diff = compose(d, x).partial_coefficients();
  const auto xd_then = compose(x, d);
  for (const auto& [alpha, c] : xd_then.partial_coefficients()) {
    auto it = diff.find(alpha);
    diff[alpha] = it == diff.end() ? -c : it->second - c;
  }
  CHECK(same(LinearPDO(1, diff), LinearPDO::identity(1)));
}

TEST_CASE("iterate examples") {
  auto p = LinearPDO::parse("x1*d[1] + 1*d[2]", 1);
  CHECK(same(iterate(p, 0), LinearPDO::identity(1)));
  CHECK(same(iterate(LinearPDO::parse("1*d[2]", 1), 3), LinearPDO::parse("1*d[6]", 1)));
  CHECK(same(iterate(LinearPDO::parse("x1*d[1]", 1), 3), LinearPDO::parse("x1^3*d[3] + 3*x1^2*d[2] + x1*d[1]", 1)));
}

TEST_CASE("term budget aborts iteration") {
  auto p = LinearPDO::parse("(1 + x1 + x2^2)*d[2,0] + x1*x2*d[0,1]", 2);
  try {
    iterate(p, 6, {true, 50});
    FAIL("expected a resource error");
  } catch (const ResourceError& e) {
    CHECK(e.budget() == "term_budget");
  }
}

TEST_CASE("compose with identity and dimension mismatch") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    auto p = random_operator(rng);
    CHECK(same(compose(p, LinearPDO::identity(2)), p));
    CHECK(same(compose(LinearPDO::identity(2), p), p));
  }
  CHECK_THROWS_AS(compose(LinearPDO::identity(1), LinearPDO::identity(2)), ParameterError);
}

TEST_CASE("apply of a composition equals applying twice") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 100; ++k) {
    auto p = random_operator(rng), q = random_operator(rng);
    const auto pq = compose(p, q);
    CHECK(pq.order() <= p.order() + q.order());
    CHECK(same_action(pq, [&](const Expr& f) { return pdo::apply(p, pdo::apply(q, f)); },
                      p.order() + q.order() + 2, rng));
  }
}

TEST_CASE("composition is associative") {
  std::mt19937_64 rng(29);
  for (int k = 0; k < 20; ++k) {
    auto p = random_operator(rng), q = random_operator(rng), r = random_operator(rng);
    const auto left = compose(compose(p, q), r);
    const auto right = compose(p, compose(q, r));
    CHECK(same_action(left, [&](const Expr& f) { return pdo::apply(right, f); }, 4, rng));
  }
}

TEST_CASE("iterate agrees with folded composition") {
  std::mt19937_64 rng(37);
  for (int k = 0; k < 5; ++k) {
    auto p = random_operator(rng);
    LinearPDO fold = LinearPDO::identity(2);
    for (int q = 1; q <= 4; ++q) {
      fold = compose(p, fold);
      const auto pq = iterate(p, q);
      CHECK(same_action(pq, [&](const Expr& f) { return pdo::apply(fold, f); }, 3, rng));
    }
  }
}

TEST_CASE("order is additive for constant-coefficient leading parts") {
  auto p = LinearPDO::parse("1*D[2,0] + x1*D[0,1]", 2), q = LinearPDO::parse("3*D[1,1] + 1*D[0,0]", 2);
  CHECK(compose(p, q).order() == 4);
}

TEST_CASE("principal symbol examples") {
  auto lap = LinearPDO::parse("1*D[2,0] + 1*D[0,2]", 2);
  std::vector<double> x{0.3, 0.1}, xi{0.6, 0.8};
  CHECK(std::abs(principal_symbol(lap, x, xi) - Complex(1.0)) < 1e-15);
  auto dx = LinearPDO::parse("1*D[2,0] + 1*D[0,1]", 2);
  CHECK(std::abs(principal_symbol(dx, x, std::vector<double>{0.0, 1.0})) == 0.0);
  auto p = LinearPDO::parse("x1*D[2]", 1);
  CHECK(principal_symbol(p, std::vector<double>{2.0}, std::vector<double>{3.0}).real() == doctest::Approx(18.0));
}

TEST_CASE("principal symbol is homogeneous of degree m") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    auto p = random_operator(rng);
    std::vector<double> x{u(rng), u(rng)}, xi{u(rng), u(rng)};
    const Complex base = principal_symbol(p, x, xi);
    for (double t : {2.0, 10.0}) {
      std::vector<double> txi{t * xi[0], t * xi[1]};
      const Complex scaled = principal_symbol(p, x, txi);
      CHECK(std::abs(scaled - std::pow(t, p.order()) * base) <= 1e-10 * std::max(1e-300, std::abs(scaled)));
    }
  }
}

TEST_CASE("ellipticity examples") {
  auto lap = LinearPDO::parse("1*D[2,0] + 1*D[0,2]", 2);
  auto v = ellipticity_check(lap, Box::cube(2, -1, 1));
  CHECK(v.elliptic);
  CHECK(v.c_min == doctest::Approx(1.0).epsilon(1e-12));

  auto heat = LinearPDO::parse("1*D[2,0] + 1*D[0,1]", 2);
  auto h = ellipticity_check(heat, Box::cube(2, -1, 1));
  CHECK_FALSE(h.elliptic);
  CHECK(std::abs(h.witness_xi[0]) < 1e-6);
  CHECK(std::abs(std::abs(h.witness_xi[1]) - 1.0) < 1e-6);
  CHECK(std::abs(principal_symbol(heat, h.witness_x, h.witness_xi)) < 1e-6);

  auto p = LinearPDO::parse("1*D[2,0] + x1^2*D[0,2]", 2);
  auto on = ellipticity_check(p, Box({1.0, 0.0}, {2.0, 1.0}));
  CHECK(on.elliptic);
  CHECK(on.c_min > 0.0);
  auto off = ellipticity_check(p, Box::cube(2, -1, 1));
  CHECK_FALSE(off.elliptic);
  CHECK(std::abs(off.witness_x[0]) < 1e-12);
  CHECK(std::abs(off.witness_xi[0]) < 1e-6);
}

TEST_CASE("sphere sampling meets the documented minima") {
  CHECK(minimum_sphere_samples(2) == 64);
  CHECK(minimum_sphere_samples(3) == 256);
  for (int n : {2, 3, 5}) {
    auto dirs = sphere_directions(n, minimum_sphere_samples(n), 1);
    CHECK(static_cast<int>(dirs.size()) >= minimum_sphere_samples(n));
    for (const auto& d : dirs) {
      double r = 0;
      for (double c : d) r += c * c;
      CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK(sphere_directions(5, 300, 9) == sphere_directions(5, 300, 9));
}

TEST_CASE("printing round-trips") {
  std::mt19937_64 rng(53);
  for (int k = 0; k < 30; ++k) {
    auto p = random_operator(rng);
    CHECK(same(LinearPDO::parse(p.to_string(), 2), p));
    CHECK(same(LinearPDO::parse(p.to_string(false), 2), p));
  }
  auto c = LinearPDO::parse("(1 + 2*i)*D[1,0] - x2*D[0,0]", 2);
  CHECK(same(LinearPDO::parse(c.to_string(), 2), c));
}

}
