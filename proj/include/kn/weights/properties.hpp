#pragma once

#include <string>
#include <vector>

#include "kn/weights/conjugate.hpp"

namespace kn::weights {

// {2^k : k in [lo, hi]}.
std::vector<double> dyadic_ladder(int lo = -6, int hi = 6);

struct SampleSpec {
  double t_min = 1e-3;
  double t_max = 1e8;
  int points = 481;  // geometric grid
  std::vector<double> lambdas{1.0, 1.5, 2.0, 4.0, 8.0, 16.0};
};

enum class Quasianalyticity { Convergent, Divergent, Inconclusive };
std::string to_string(Quasianalyticity q);

struct AxiomReport {
  bool monotone = true;
  bool vanishes_on_unit = true;
  double alpha_L = 0;         // minimal sampled L in omega(2t) <= L(omega(t)+1)
  double shift_L = 0;         // minimal sampled L in omega(e t) <= L(1+omega(t))
  double alpha0_C = 0;        // omega(lambda t) <= lambda C omega(t) for t >= t0
  double alpha0_t0 = 0;
  std::vector<std::pair<double, double>> gamma_ratios;  // (t, log t / omega(t))
  bool gamma_decreasing = false;
  double convexity_residual = 0;  // max negative second difference of phi, relative
  bool convex = false;
  double integral = 0;        // int_1^T omega(t)/t^2 dt
  double tail_exponent = 0;   // fitted p in omega ~ t^p over the last two decades
  double increment_ratio = 0;
  Quasianalyticity quasianalyticity = Quasianalyticity::Inconclusive;
};

AxiomReport check_axioms(const Weight& w, const SampleSpec& spec = {});

struct Violation {
  std::string property;
  int j = 0, h = 0, r = 0;
  double lambda = 0;
  double lhs = 0, rhs = 0;  // log domain
};

struct PropertyReport {
  std::vector<Violation> violations;
  std::size_t checks = 0;
  bool ok() const { return violations.empty(); }
};

// Properties (1)-(4) and (6)-(8) of the associated sequence for j,h,r <= jmax.
PropertyReport check_prop21(const YoungConjugate& conj, int jmax, const std::vector<double>& ladder, double slack);

struct ShiftBound {
  double rho = 0, lambda = 0, L = 0;
  int n_rho = 0;
  double lambda_prime = 0;
  double log_D = 0;
  bool verified = true;
  int witness_j = -1;
  double worst_gap = 0;  // max over j of lhs - rhs (log domain)
};

// rho^j e^{lambda phi*(j/lambda)} <= D e^{lambda' phi*(j/lambda')}, n = floor(log rho + 1),
// lambda' = lambda / L^n, D = e^{lambda n}.
ShiftBound bound_shift(const YoungConjugate& conj, double rho, double lambda, double L, int jmax,
                       double slack = 1e-9);

// lambda L^n phi*(y/(lambda L^n)) + n y <= lambda phi*(y/lambda) + lambda sum_{h=1}^n L^h
// for integer y <= ymax and n = 1..n_max.
PropertyReport check_iterated_shift(const YoungConjugate& conj, int ymax, const std::vector<double>& ladder, double L,
                                    int n_max, double slack);

}  // namespace kn::weights
