#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "kn/error.hpp"
#include "kn/metivier/metivier.hpp"

using namespace kn;
using namespace kn::metivier;

namespace {

double gamma_upper_closed_form(double eta, int alpha) {
  return boost::math::tgamma((alpha + 1.0) / eta, 1.0) / eta;
}

}  // namespace

TEST_SUITE("metivier") {

TEST_CASE("derived parameters are computed") {
  MetivierParams p;
  CHECK(p.eta() == doctest::Approx((2.0 - 0.1) / 4.0).epsilon(1e-15));
  CHECK(p.eps_bound() == doctest::Approx(2.0 * 0.5 / 6.5).epsilon(1e-15));
  CHECK(1.0 / p.eta() > p.s());
  CHECK(p.eps_bound() < 0.5);
}

TEST_CASE("parameter gates") {
  MetivierConfig c;
  c.eps = 0.2;
  try {
    MetivierParams{c};
    FAIL("expected a parameter error");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("0<ε<m(s−σ)/(2ms−σ)") != std::string::npos);
  }
  c = {};
  c.xi0 = {0.0, 0.9};
  CHECK_THROWS_WITH_AS(MetivierParams{c}, doctest::Contains("|ξ₀| = 1"), ParameterError);
  c = {};
  c.sigma = 2.5;
  CHECK_THROWS_AS(MetivierParams{c}, ParameterError);
  c = {};
  c.op = "1*D[2,0] + 1*D[0,2]";
  CHECK_THROWS_AS(MetivierParams{c}, ParameterError);
  c = {};
  c.op = "x1*D[2,0] + 1*D[0,1]";
  CHECK_THROWS_AS(MetivierParams{c}, ParameterError);
  c = {};
  c.m = 3;
  CHECK_THROWS_AS(MetivierParams{c}, ParameterError);
}

TEST_CASE("bump profile") {
  const auto g = bump_profile(1.5, 0.5, 2);
  auto at = [&](double a, double b) {
    std::vector<double> x{a, b};
    return sym::eval(g, std::span<const double>(x)).real();
  };
  CHECK(at(0, 0) == 1.0);
  CHECK(at(1.0, 0) == 0.0);
  CHECK(at(0.8, 0.8) == 0.0);
  CHECK(at(0.3, 0.4) == doctest::Approx(std::exp(-7.0 / 9.0)).epsilon(1e-14));
  CHECK_THROWS_AS(bump_profile(1.0, 0.5, 2), ParameterError);
}

TEST_CASE("plateau cutoff") {
  MetivierParams p;
  CHECK(cutoff_value(p, 0.0) == 1.0);
  CHECK(cutoff_value(p, 0.2) == 1.0);    // |y| < delta
  CHECK(cutoff_value(p, 0.9) < 1.0);
  CHECK(cutoff_value(p, 0.9) > 0.0);
  CHECK(cutoff_value(p, 1.0) == 0.0);    // |y| = 2 delta
  CHECK(cutoff_value(p, 2.0) == 0.0);
  double prev = 1.0;
  for (double r2 = 0.0; r2 < 1.0; r2 += 0.01) {
    CHECK(cutoff_value(p, r2) <= prev);
    prev = cutoff_value(p, r2);
  }
}

TEST_CASE("u at the base point matches the incomplete gamma oracle") {
  MetivierParams p;
  QuadResult detail;
  const auto u = eval_u(p, p.x0(), {1e-12, 400000}, &detail);
  const double exact = gamma_upper_closed_form(p.eta(), 0);
  CHECK(std::abs(u.real() - exact) <= 1e-10 * exact);
  CHECK(std::abs(u.imag()) <= 1e-12);
  CHECK(detail.error <= 1e-10 * exact);
}

TEST_CASE("u vanishes outside the support ball") {
  MetivierParams p;
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0)), radius(1.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    const double a = angle(rng), r = radius(rng);
    std::vector<double> x{r * std::cos(a), r * std::sin(a)};
    CHECK(std::abs(eval_u(p, x, {1e-10, 200000})) < 1e-10);
  }
}

TEST_CASE("halving the tolerance stays within the error estimates") {
  MetivierParams p;
  for (std::vector<double> x : {std::vector<double>{0.05, 0.02}, std::vector<double>{-0.1, 0.3}}) {
    QuadResult a, b;
    const auto ua = eval_u(p, x, {1e-9, 400000}, &a);
    const auto ub = eval_u(p, x, {5e-10, 400000}, &b);
    CHECK(std::abs(ua - ub) <= a.error + b.error);
  }
}

TEST_CASE("truncation radius is sound") {
  const double eta = 0.475, tol = 1e-12;
  const double rho = truncation_radius(eta, 0.0, tol);
  CHECK(std::exp(-std::pow(rho, eta)) < tol / 10.0);
  auto tail = [&](double lo, double hi) {
    auto r = integrate_panels([&](double t) { return Complex(std::exp(-std::pow(t, eta))); },
                              panel_edges(lo, hi, 8.0), 0.0, {1e-14, 400000});
    return std::abs(r.value);
  };
  CHECK(tail(rho, 2.0 * rho) < tol);
  // The tail beyond rho is the upper incomplete gamma function.
  const double exact_tail = std::exp(log_gamma_upper(1.0 / eta, std::pow(rho, eta))) / eta;
  CHECK(exact_tail < tol);
  CHECK(log_gamma_upper(1.0, 3.0) == doctest::Approx(-3.0).epsilon(1e-14));
}

TEST_CASE("directional derivatives match the closed form") {
  MetivierParams p;
  for (int alpha : {0, 1, 4, 10}) {
    auto d = directional_derivative_u(p, alpha, {1e-12, 400000});
    const double exact = gamma_upper_closed_form(p.eta(), alpha);
    INFO("alpha=", alpha);
    CHECK(d.closed_form == doctest::Approx(exact).epsilon(1e-12));
    CHECK(std::abs(d.quadrature.value - Complex(exact)) <= 1e-6 * exact);
  }
  auto d0 = directional_derivative_u(p, 0, {1e-12, 400000});
  CHECK(std::abs(d0.quadrature.value - eval_u(p, p.x0(), {1e-12, 400000})) <= 1e-10 * d0.closed_form);
}

TEST_CASE("leading term follows Stirling") {
  const double eta = 0.475;
  std::vector<double> alpha, y;
  for (int a = 10; a <= 25; ++a) {
    alpha.push_back(a);
    y.push_back(log_leading_term(eta, a));
  }
  CHECK(stirling_exponent(alpha, y) == doctest::Approx(1.0 / eta).epsilon(0.05));

  std::vector<double> synthetic;
  for (double a : alpha) synthetic.push_back(1.7 * a * std::log(a) - 0.3 * a + 2.0 * std::log(a) + 5.0);
  CHECK(stirling_exponent(alpha, synthetic) == doctest::Approx(1.7).epsilon(1e-9));
  CHECK(std::isnan(stirling_exponent({1, 2, 3}, {1, 2, 3})));
}

TEST_CASE("principal symbol cancels the top rho power at the base point") {
  MetivierParams p;
  for (int q = 1; q <= 3; ++q) {
    auto spec = rho_spectrum_at_center(p, p.op(), q);
    const double top = q * p.m();
    double scale = 0.0;
    for (const auto& [e, c] : spec) scale = std::max(scale, std::abs(c));
    for (const auto& [e, c] : spec)
      if (std::abs(e - top) < 1e-12) CHECK(std::abs(c) <= 1e-12 * scale);
  }
  // Without cancellation the top power survives.
  auto lap = pdo::LinearPDO::parse("1*D[2,0] + 1*D[0,2]", 2);
  auto spec = rho_spectrum_at_center(p, lap, 1);
  bool top_present = false;
  for (const auto& [e, c] : spec) top_present = top_present || (std::abs(e - 2.0) < 1e-12 && std::abs(c) > 0.5);
  CHECK(top_present);
}

TEST_CASE("shifted operator") {
  auto p = pdo::LinearPDO::parse("1*D[2,0] + 1*D[0,1]", 2);
  std::vector<double> xi0{0.0, 1.0};
  auto shifted = shifted_operator(p, xi0);
  // P(D + rho xi0) = D1^2 + D2 + rho
  auto rho_term = shifted.coefficient(sym::MultiIndex{0, 0});
  std::vector<double> x{0.0, 0.0};
  CHECK(std::abs(sym::eval(rho_term, sym::Point{x, 3.0}) - Complex(3.0)) < 1e-15);
}

TEST_CASE("iterates under the integral") {
  MetivierParams p;
  const QuadOptions q{1e-10, 400000};
  std::vector<double> x{0.03, -0.02};
  CHECK(std::abs(apply_iterate_under_integral(p, p.op(), 0, x, q).value - eval_u(p, x, q)) <= 1e-9);
  std::vector<double> outside{0.0, 1.2};
  for (int k = 1; k <= 2; ++k) CHECK(std::abs(apply_iterate_under_integral(p, p.op(), k, outside, q).value) < 1e-10);
}

TEST_CASE("plateau and generic routes agree") {
  MetivierParams p;
  const Box k({-0.05, -0.05}, {0.05, 0.05});
  const auto grid = analysis::QuadratureGrid::uniform(2, 9);
  const QuadOptions q{1e-11, 400000};
  auto fast = iterate_l2_norms(p, p.op(), k, 2, grid, q, Route::Plateau);
  auto slow = iterate_l2_norms(p, p.op(), k, 2, grid, q, Route::Generic);
  CHECK(fast.route == "plateau");
  CHECK(slow.route == "generic");
  for (int j = 0; j <= 2; ++j) CHECK(fast.norms[j] == doctest::Approx(slow.norms[j]).epsilon(1e-8));
  CHECK(plateau_covers(p, k, fast.rho_max));
  CHECK_FALSE(plateau_covers(p, Box::cube(2, -0.5, 0.5), fast.rho_max));
}

TEST_CASE("verdict rule") {
  CHECK(classify(2.1, 1.1, 2.0, 0.05) == Verdict::Counterexample);
  CHECK(classify(2.1, 2.08, 2.0, 0.05) == Verdict::NoCounterexample);
  CHECK(classify(2.1, 1.95, 2.0, 0.05) == Verdict::Counterexample);
  CHECK(classify(2.1, 2.3, 2.0, 0.05) == Verdict::Inconclusive);
  CHECK(classify(2.02, 1.5, 2.0, 0.05) == Verdict::Inconclusive);
  CHECK(classify(std::nan(""), 1.0, 2.0, 0.05) == Verdict::None);
}

TEST_CASE("empty windows give a degenerate report") {
  MetivierParams p;
  CounterexampleOptions opts;
  opts.alpha_min = 0;
  opts.alpha_max = 0;
  opts.J = 0;
  opts.grid = analysis::QuadratureGrid::uniform(2, 9);
  auto r = counterexample_report(p, opts);
  CHECK(r.verdict == Verdict::None);
  CHECK(r.caveats.size() >= 2);
}

}
