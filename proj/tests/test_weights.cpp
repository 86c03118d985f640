#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "kn/error.hpp"
#include "kn/weights/properties.hpp"

using namespace kn::weights;

TEST_SUITE("weights") {

TEST_CASE("gevrey weight values") {
  auto w = Weight::gevrey(2.0);
  CHECK(w(0.0) == 0.0);
  CHECK(w(1.0) == 0.0);
  CHECK(w(16.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(Weight::gevrey(1.0), kn::ParameterError);
  CHECK_THROWS_AS(Weight::sublog(0.5), kn::ParameterError);
  CHECK_THROWS_AS(Weight::explog(1.5, 1.0), kn::ParameterError);
}

TEST_CASE("weight spec parsing") {
  CHECK(Weight::parse("gevrey:s=2").spec() == "gevrey:s=2");
  CHECK(Weight::parse("explog:alpha=0.5,beta=1").kind() == WeightKind::ExpLog);
  CHECK(Weight::parse("sublog").params() == std::vector<double>{2.0});
  CHECK_THROWS_AS(Weight::parse("gauss:s=2"), kn::ParameterError);
  CHECK_THROWS_AS(Weight::parse("gevrey:t=2"), kn::ParameterError);
}

TEST_CASE("catalog weights vanish on the unit interval and are non-decreasing") {
  for (const auto& w : catalog()) {
    double prev = 0.0;
    for (double t = 0.0; t <= 1.0; t += 0.125) CHECK(w(t) == 0.0);
    for (double t = 1.0; t < 1e8; t *= 1.3) {
      CHECK(w(t) >= prev);
      prev = w(t);
    }
  }
}

TEST_CASE("young conjugate examples") {
  YoungConjugate c(Weight::gevrey(2.0));
  CHECK(c(0.0) == 0.0);
  CHECK(c(2.0) == doctest::Approx(4.0 * (std::log(4.0) - 1.0) + 1.0).epsilon(1e-12));
  CHECK(c(1.0) == doctest::Approx(2.0 * (std::log(2.0) - 1.0) + 1.0).epsilon(1e-12));
  CHECK(c.argmax(2.0) == doctest::Approx(2.0 * std::log(4.0)).epsilon(1e-6));
  CHECK_THROWS_AS(c(-1.0), kn::ParameterError);
}

TEST_CASE("conjugate matches the grid oracle on the catalog") {
  for (const auto& w : catalog()) {
    YoungConjugate c(w);
    for (double y : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
      const double oracle = conjugate_grid_oracle(w, y).value;
      INFO(w.spec(), " y=", y);
      if (oracle == 0.0)
        CHECK(c(y) == 0.0);
      else
        CHECK(std::abs(c(y) - oracle) <= 1e-8 * std::abs(oracle));
    }
  }
}

TEST_CASE("gevrey closed form and clamp") {
  for (double s : {1.5, 2.0, 3.0}) {
    YoungConjugate c(Weight::gevrey(s));
    for (double y : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
      const double exact = gevrey_conjugate(s, y);
      CHECK(std::abs(c(y) - exact) <= 1e-6 * (1.0 + exact));
      if (s * y > 1.0) CHECK(c(y) > 0.0);
    }
  }
  CHECK(gevrey_conjugate(2.0, 0.1) == 0.0);
}

TEST_CASE("conjugate is convex, non-decreasing, and phi*/y is non-decreasing") {
  for (const auto& w : catalog()) {
    YoungConjugate c(w);
    const double h = 0.05;
    for (double y = h; y < 20.0; y += h) {
      CHECK(c(y + h) >= c(y) - 1e-12);
      CHECK(c(y + h) - 2.0 * c(y) + c(y - h) >= -1e-9 * (1.0 + c(y)));
      CHECK(c(y + h) / (y + h) >= c(y) / y - 1e-12);
    }
  }
}

TEST_CASE("divergent conjugate is reported") {
  // A bounded weight fails (gamma): the supremum is infinite for every y > 0.
  auto w = Weight::custom({0.0, 1.0, 10.0, 20.0}, {0.0, 0.0, 1.0, 1.0});
  CHECK_THROWS_AS(young_conjugate(w, 2.0), kn::DivergenceError);
}

TEST_CASE("memo table is safe under concurrent use") {
  YoungConjugate c(Weight::gevrey(2.0));
  std::vector<double> a(200), b(200);
  std::thread t1([&] { for (int i = 0; i < 200; ++i) a[i] = c(0.1 * i); });
  std::thread t2([&] { for (int i = 199; i >= 0; --i) b[i] = c(0.1 * i); });
  t1.join();
  t2.join();
  CHECK(a == b);
  CHECK(c.cache_size() == 200);
}

TEST_CASE("associated sequence examples") {
  YoungConjugate c(Weight::gevrey(2.0));
  for (const auto& w : catalog()) CHECK(assoc_seq(YoungConjugate(w), 0, 3.0).log_value == 0.0);
  CHECK(std::exp(assoc_seq(c, 2, 1.0).log_value) == doctest::Approx(std::exp(1.0) * std::pow(4.0 / std::exp(1.0), 4) / 2.0).epsilon(1e-10));
  CHECK(std::exp(assoc_seq(c, 1, 1.0).log_value) == doctest::Approx(1.4715).epsilon(1e-4));
  for (int j : {10, 100, 1000})
    for (double lambda : {1.0 / 64, 1.0, 64.0}) CHECK(std::isfinite(assoc_seq(c, j, lambda).log_value));
}

TEST_CASE("axiom report examples") {
  auto g = check_axioms(Weight::gevrey(2.0));
  CHECK(g.quasianalyticity == Quasianalyticity::Convergent);
  CHECK(g.alpha_L <= 2.0);
  CHECK(g.monotone);
  CHECK(g.vanishes_on_unit);
  CHECK(g.convex);
  CHECK(g.gamma_decreasing);

  std::vector<double> t, w;
  for (double x = 0.0; x <= 1e9; x = x < 1 ? 1 : x * 10) {
    t.push_back(x);
    w.push_back(x);
  }
  auto linear = check_axioms(Weight::custom(t, w, "identity"));
  CHECK(linear.quasianalyticity == Quasianalyticity::Divergent);
}

TEST_CASE("custom weight tables load from text") {
  const auto path = std::filesystem::temp_directory_path() / "kn_weight_table.txt";
  {
    std::ofstream f(path);
    f << "# t omega\n0 0\n1 0\n4 1\n9 2\n";
  }
  auto w = Weight::parse("custom:" + path.string());
  CHECK(w(4.0) == 1.0);
  CHECK(w(6.5) == doctest::Approx(1.5));
  CHECK(w(14.0) == doctest::Approx(3.0));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Weight::custom({0.0, 2.0, 1.0}, {0.0, 1.0, 2.0}), kn::ParameterError);
}

TEST_CASE("property suite on the small-lambda ladder") {
  for (const auto& w : catalog()) {
    YoungConjugate c(w);
    auto r = check_prop21(c, 60, dyadic_ladder(-2, 0), 1e-9);
    INFO(w.spec());
    CHECK(r.checks > 0);
    CHECK(r.violations.empty());
  }
}

TEST_CASE("properties 3, 4, 7 and 8 hold on the full acceptance ladder") {
  for (const auto& w : catalog()) {
    YoungConjugate c(w);
    auto r = check_prop21(c, 60, dyadic_ladder(-2, 2), 1e-9);
    for (const auto& v : r.violations) {
      INFO(w.spec(), " property ", v.property, " j=", v.j, " lambda=", v.lambda);
      CHECK((v.property == "1" || v.property == "2" || v.property == "6"));
    }
  }
}

TEST_CASE("clamped region witness for gevrey at lambda 4") {
  // phi*(1/4) = phi*(1/2) = 0, so a_1^2 = 1 while a_2 = 1/2.
  YoungConjugate c(Weight::gevrey(2.0));
  const double a1 = assoc_seq(c, 1, 4.0).log_value, a2 = assoc_seq(c, 2, 4.0).log_value;
  CHECK(a1 == 0.0);
  CHECK(a2 == doctest::Approx(-std::log(2.0)));
  auto r = check_prop21(c, 2, {4.0}, 1e-9);
  bool found = false;
  for (const auto& v : r.violations) found = found || (v.property == "1" && v.j == 1 && v.h == 1);
  CHECK(found);
}

TEST_CASE("superadditivity with binomial never fails") {
  for (const auto& w : catalog()) {
    YoungConjugate c(w);
    for (double lambda : dyadic_ladder(-2, 2))
      for (int a = 0; a <= 30; ++a)
        for (int b = 0; b <= 30; ++b) {
          const double lhs = scaled_conjugate(c, a, lambda) + scaled_conjugate(c, b, lambda);
          const double rhs = scaled_conjugate(c, a + b, lambda) + std::lgamma(a + b + 1.0) - std::lgamma(a + 1.0) -
                             std::lgamma(b + 1.0);
          CHECK(lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs)));
        }
  }
}

TEST_CASE("shift bound examples") {
  YoungConjugate c(Weight::gevrey(2.0));
  auto b1 = bound_shift(c, 1.0, 3.0, 3.0, 60);
  CHECK(b1.n_rho == 1);
  CHECK(b1.lambda_prime == doctest::Approx(1.0));
  CHECK(b1.log_D == doctest::Approx(3.0));
  CHECK(b1.verified);
  auto b2 = bound_shift(c, 2.0, 1.0, 3.0, 60);
  CHECK(b2.n_rho == 1);
  CHECK(b2.lambda_prime == doctest::Approx(1.0 / 3.0));
  CHECK(b2.log_D == doctest::Approx(1.0));
  CHECK(bound_shift(c, 10.0, 1.0, 3.0, 60).verified);
}

TEST_CASE("iterated shift and shift bound hold across the catalog") {
  for (const auto& w : catalog()) {
    YoungConjugate c(w);
    INFO(w.spec());
    CHECK(check_iterated_shift(c, 60, dyadic_ladder(-2, 2), 3.0, 3, 1e-9).ok());
    for (double rho : {2.0, 10.0})
      for (double lambda : dyadic_ladder(-2, 2)) CHECK(bound_shift(c, rho, lambda, 3.0, 60).verified);
  }
}

}
