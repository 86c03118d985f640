#pragma once

#include <string>
#include <vector>

#include "kn/analysis/norms.hpp"
#include "kn/weights/conjugate.hpp"

namespace kn::analysis {

std::vector<int> default_k_ladder();  // 1, 2, 4, ..., 32

// log c_k for one k over the full and the first-half window.
struct LadderRow {
  int k = 0;
  double log_c = 0;
  double log_c_half = 0;
  bool stable = false;
};

struct RoumieuFit {
  int k_star = 0;
  double log_c_star = 0;  // -inf when every row is zero
  double c_star = 0;
  bool stable = false;    // false: no ladder k passed the stability rule, k_star is the largest
  std::vector<LadderRow> roumieu;   // bound c e^{(1/k) phi*(j m k)}
  std::vector<LadderRow> beurling;  // bound c_k e^{k phi*(j m / k)}
  std::vector<double> residuals;    // log norm_j - log bound_j at k_star, all <= 0
};

// Log-domain fit; the returned pair satisfies its bound on every row.
RoumieuFit fit_roumieu(const std::vector<double>& norms, const weights::YoungConjugate& conj, int m,
                       const std::vector<int>& ladder = default_k_ladder());

// Least-squares slope of log norm_j against (1/k) phi*(j m k) for j in the
// last half of the window; NaN when fewer than two usable rows remain.
double comparison_slope(const std::vector<double>& norms, const weights::YoungConjugate& conj, int m, int k = 1);

struct GrowthSide {
  NormTable table;
  RoumieuFit fit;
  double slope = 0;
};

struct GrowthReport {
  std::string weight;
  int m = 0;
  GrowthSide iterates;     // ||P^j u||, index j, order m
  GrowthSide derivatives;  // sup |D^alpha u|, index |alpha|, order 1
  bool finite_window_caveat = true;
  bool sides_agree = false;  // both fits stable or both unstable
};

struct MembershipOptions {
  int J = 8;
  int N = 12;
  std::vector<int> ladder = default_k_ladder();
  QuadratureGrid grid;  // empty selects 65 nodes per axis
  int sup_points = 33;
  sym::SimplifyOptions simplify;
  kernels::Exec exec = kernels::Exec::Parallel;
};

GrowthReport derivative_growth(const sym::Expr& u, const Box& k, const weights::YoungConjugate& conj,
                               const MembershipOptions& opts = {});
// PreconditionError when P has order 0.
GrowthReport membership_report(const sym::Expr& u, const pdo::LinearPDO& p, const Box& k,
                               const weights::YoungConjugate& conj, const MembershipOptions& opts = {});

enum class RecursionStatus { Ok, Degenerate, Undefined };
std::string to_string(RecursionStatus s);

struct RecursionRow {
  int p = 0;
  double numerator = 0;    // N^{pm}(u)
  double denominator = 0;  // N^{(p-1)m}(Pu) + sum_q e^{(phi*(pmk) - phi*(qmk))/k} N^{qm}(u)
  double c0 = 0;           // numerator / denominator
  RecursionStatus status = RecursionStatus::Ok;
};

struct RecursionOptions {
  std::vector<double> deltas = default_delta_grid();
  QuadratureGrid grid;  // empty selects 65 nodes per axis
  pdo::EllipticityOptions ellipticity;
  sym::SimplifyOptions simplify;
  kernels::Exec exec = kernels::Exec::Parallel;
};

// Smallest C0 per p making the recursion inequality hold with the computed
// seminorms. PreconditionError unless P is elliptic on G (sampled).
std::vector<RecursionRow> empirical_recursion_constant(const sym::Expr& u, const pdo::LinearPDO& p, int p_max, int k,
                                                       const Box& g, const weights::YoungConjugate& conj,
                                                       const RecursionOptions& opts = {});

}  // namespace kn::analysis
