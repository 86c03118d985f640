#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kn/analysis/quadrature.hpp"
#include "kn/metivier/oscillatory.hpp"
#include "kn/pdo/operator.hpp"

namespace kn::metivier {

enum class CutoffKind {
  Plateau,  // equal to 1 on B(0, delta), support in B(0, 2 delta)
  Profile,  // exp(1 - (1 - |y/(2 delta)|^2)^(-1/(sigma-1)))
};

struct MetivierConfig {
  double s = 2.0;
  double sigma = 1.5;
  double eps = 0.1;
  double delta = 0.5;
  int m = 2;
  std::vector<double> x0{0.0, 0.0};
  std::vector<double> xi0{0.0, 1.0};
  std::string op = "1*D[2,0] + 1*D[0,1]";
  CutoffKind cutoff = CutoffKind::Plateau;
};

// Validated parameter set; the constructor throws ParameterError naming the
// violated constraint.
class MetivierParams {
 public:
  explicit MetivierParams(const MetivierConfig& c = {});

  double s() const { return c_.s; }
  double sigma() const { return c_.sigma; }
  double eps() const { return c_.eps; }
  double delta() const { return c_.delta; }
  int m() const { return c_.m; }
  int dimension() const { return static_cast<int>(c_.x0.size()); }
  const std::vector<double>& x0() const { return c_.x0; }
  const std::vector<double>& xi0() const { return c_.xi0; }
  const pdo::LinearPDO& op() const { return op_; }
  CutoffKind cutoff() const { return c_.cutoff; }
  const MetivierConfig& config() const { return c_; }

  // (m - eps) / (m s)
  double eta() const;
  // m (s - sigma) / (2 m s - sigma)
  double eps_bound() const;

 private:
  MetivierConfig c_;
  pdo::LinearPDO op_;
};

// exp(1 - (1 - |x/(2 delta)|^2)^(-1/(sigma-1))) in x1..xn, zero for |x| >= 2 delta.
sym::Expr bump_profile(double sigma, double delta, int n);
// The cutoff of the experiment as an expression in x1..xn (x standing for y = rho^eps (x - x0)).
sym::Expr cutoff_expr(const MetivierParams& p);
// Cutoff value at |y|^2 = r2.
double cutoff_value(const MetivierParams& p, double r2);

Complex eval_u(const MetivierParams& p, std::span<const double> x, const QuadOptions& opts, QuadResult* detail = nullptr);

struct DirectionalDerivative {
  int alpha = 0;
  QuadResult quadrature;      // D_{xi0}^alpha u(x0) from the integrand
  double closed_form = 0;     // (1/eta) Gamma_upper((alpha+1)/eta, 1)
  double log_closed_form = 0;
};

DirectionalDerivative directional_derivative_u(const MetivierParams& p, int alpha, const QuadOptions& opts);
double log_leading_term(double eta, double alpha);

// P(D + rho xi0): conjugation of P by e^{i rho <x, xi0>}, coefficients polynomial in rho.
pdo::LinearPDO shifted_operator(const pdo::LinearPDO& op, std::span<const double> xi0);

// The x-part of the integrand of P^q u: e^{i rho <x-x0, xi0>} sum_beta c_beta(rho) rho^{eps|beta|} (d^beta phi)(rho^eps (x - x0)).
sym::Expr assembled_integrand(const MetivierParams& p, const pdo::LinearPDO& op, int q,
                              const sym::SimplifyOptions& opts = {});

// Coefficients of the assembled integrand at x0 as a sum of rho powers, (exponent, coefficient), ascending.
std::vector<std::pair<double, Complex>> rho_spectrum_at_center(const MetivierParams& p, const pdo::LinearPDO& op, int q,
                                                               const sym::SimplifyOptions& opts = {});

// P^q u(x) by differentiating under the integral.
QuadResult apply_iterate_under_integral(const MetivierParams& p, const pdo::LinearPDO& op, int q,
                                        std::span<const double> x, const QuadOptions& opts,
                                        const sym::SimplifyOptions& sopts = {});

// Whether rho^eps |y - x0| < delta for all y in K and rho <= rho_max.
bool plateau_covers(const MetivierParams& p, const Box& k, double rho_max);

enum class Route { Auto, Plateau, Generic };

struct IterateNorms {
  std::vector<double> norms;  // q = 0..J
  std::string route;
  double rho_max = 0;
};

// ||P^q u||_{L2(K)} for q = 0..J. The plateau route uses P^q u(y) = sum_j c_j M_j(<y - x0, xi0>)
// with c_j the rho^j coefficients of P(rho xi0)^q and M_j the oscillatory moments.
IterateNorms iterate_l2_norms(const MetivierParams& p, const pdo::LinearPDO& op, const Box& k, int J,
                              const analysis::QuadratureGrid& grid, const QuadOptions& opts,
                              Route route = Route::Auto, kernels::Exec exec = kernels::Exec::Parallel);

Box default_box(const MetivierParams& p, double half_width = 0.1);
// 2001 nodes on axes where xi0 is nonzero, 33 on the others.
analysis::QuadratureGrid default_grid(const MetivierParams& p);

// alpha log alpha coefficient of the least-squares fit of y on {alpha log alpha, alpha, log alpha, 1}.
// NaN with fewer than four points.
double stirling_exponent(const std::vector<double>& alpha, const std::vector<double>& y);

struct CounterexampleOptions {
  int J = 6;
  int alpha_min = 10;
  int alpha_max = 25;
  std::optional<Box> box;
  std::optional<analysis::QuadratureGrid> grid;
  QuadOptions quad{1e-12, 400000};
  std::string omega;   // empty: logpower:s=<s>
  std::string target;  // empty: gevrey with s' = (s + 1/eta) / 2
  std::optional<pdo::LinearPDO> control = std::nullopt;  // elliptic comparison operator
  double margin = 0.05;
  kernels::Exec exec = kernels::Exec::Parallel;
};

struct SideFit {
  std::string weight;
  int k_star = 0;
  double log_c_star = 0;
  bool stable = false;
};

struct RunSide {
  std::vector<double> index;     // alpha or q m
  std::vector<double> log_norm;  // log of the table entry
  double exponent = 0;           // NaN when the window is too short
  std::vector<SideFit> fits;     // Roumieu fits against omega and the target weight
};

enum class Verdict { Counterexample, NoCounterexample, Inconclusive, None };
std::string to_string(Verdict v);

struct CounterexampleReport {
  double eta = 0, inv_eta = 0, eps_bound = 0;
  std::string op, route;
  Box box;
  RunSide derivative;   // closed-form |D^alpha u(x0)|, alpha = 0..alpha_max
  RunSide iterate;      // ||P^q u||, q = 0..J
  double gap = 0;       // derivative - iterate exponent
  Verdict verdict = Verdict::None;
  std::vector<std::string> caveats;
  std::optional<RunSide> control;
  std::string control_op;
  double control_gap = 0;
  Verdict control_verdict = Verdict::None;
};

CounterexampleReport counterexample_report(const MetivierParams& p, const CounterexampleOptions& opts = {});

// Verdict from a pair of exponents.
Verdict classify(double derivative_exponent, double iterate_exponent, double s, double margin);

}  // namespace kn::metivier
