#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace kn::metivier {

using Complex = std::complex<double>;

// Result of a rho integral over [1, rho_max].
struct QuadResult {
  Complex value;
  double error = 0;  // quadrature estimate plus truncation bound
  std::size_t panels = 0;
  double rho_max = 0;
};

struct QuadOptions {
  // Absolute for integrals of size <= 1, relative to the L1 mass above that.
  double tol = 1e-10;
  std::size_t panel_budget = 200000;
};

// log of the upper incomplete gamma function Gamma(a, x).
double log_gamma_upper(double a, double x);

// R with e^{-R^eta} < tol/10 and int_R^inf rho^p e^{-rho^eta} below tol times
// the size of the whole integral.
double truncation_radius(double eta, double p, double tol);

// Panel edges on [lo, hi]: widths at most max(1, growth * rho), at most
// `max_width`, and breaking at every entry of `breaks` inside the range.
std::vector<double> panel_edges(double lo, double hi, double max_width, double growth = 0.25,
                                std::vector<double> breaks = {});

// Adaptive 15/31-point Gauss-Kronrod panels with global priority refinement.
// Throws AccuracyError when the panel budget is spent first.
QuadResult integrate_panels(const std::function<Complex(double)>& f, const std::vector<double>& edges,
                            double truncation_error, const QuadOptions& opts);

// Fixed Kronrod nodes and weights on the given panels.
struct RhoRule {
  std::vector<double> nodes, weights;
};
RhoRule kronrod_rule(const std::vector<double>& edges);

}  // namespace kn::metivier
