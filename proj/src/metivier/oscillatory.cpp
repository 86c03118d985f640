#include "kn/metivier/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "kn/error.hpp"

namespace kn::metivier {

namespace {
using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
}

double log_gamma_upper(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw ParameterError("log_gamma_upper needs a > 0 and x >= 0");
  return boost::math::lgamma(a) + std::log(boost::math::gamma_q(a, x));
}

double truncation_radius(double eta, double p, double tol) {
  if (!(eta > 0.0) || !(tol > 0.0) || !(p >= 0.0)) throw ParameterError("truncation_radius: bad arguments");
  const double a = (p + 1.0) / eta;
  const double log_scale = std::max(0.0, log_gamma_upper(a, 1.0) - std::log(eta));
  const double target = std::log(tol) + log_scale - std::log(10.0);
  // Gamma(a, V) <= 2 V^(a-1) e^(-V) once V >= 2(a-1).
  auto tail = [&](double v) { return std::log(2.0 / eta) + (a - 1.0) * std::log(v) - v; };
  double v = std::max({std::log(10.0 / tol), 2.0 * (a - 1.0), 1.0});
  while (tail(v) > target) v *= 1.05;
  return std::pow(v, 1.0 / eta);
}

std::vector<double> panel_edges(double lo, double hi, double max_width, double growth, std::vector<double> breaks) {
  if (!(lo < hi)) return {lo, hi};
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> e{lo};
  auto next_break = breaks.begin();
  while (e.back() < hi) {
    const double x = e.back();
    double next = x + std::min(max_width, std::max(1.0, growth * x));
    while (next_break != breaks.end() && *next_break <= x) ++next_break;
    if (next_break != breaks.end()) next = std::min(next, *next_break);
    e.push_back(std::min(next, hi));
  }
  return e;
}

QuadResult integrate_panels(const std::function<Complex(double)>& f, const std::vector<double>& edges,
                            double truncation_error, const QuadOptions& opts) {
  struct Panel {
    double a, b;
    Complex value;
    double error, l1;
  };
  auto eval = [&](double a, double b) {
    Panel p{a, b, 0.0, 0.0, 0.0};
    p.value = Kronrod::integrate(f, a, b, 0, 0.0, &p.error, &p.l1);
    return p;
  };
  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (edges[i] < edges[i + 1]) panels.push_back(eval(edges[i], edges[i + 1]));

  auto by_error = [&](std::size_t i, std::size_t j) { return panels[i].error < panels[j].error; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_error)> worst(by_error);
  double total_error = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    worst.push(i);
    total_error += panels[i].error;
    l1 += panels[i].l1;
  }
  while (!worst.empty() && total_error > opts.tol * std::max(1.0, l1)) {
    if (panels.size() >= opts.panel_budget) throw AccuracyError("rho quadrature panel budget exhausted", total_error);
    const std::size_t i = worst.top();
    worst.pop();
    const Panel old = panels[i];
    const double mid = 0.5 * (old.a + old.b);
    panels[i] = eval(old.a, mid);
    panels.push_back(eval(mid, old.b));
    total_error += panels[i].error + panels.back().error - old.error;
    l1 += panels[i].l1 + panels.back().l1 - old.l1;
    worst.push(i);
    worst.push(panels.size() - 1);
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  QuadResult r;
  for (const auto& p : panels) r.value += p.value;
  r.error = std::max(0.0, total_error) + truncation_error;
  r.panels = panels.size();
  r.rho_max = edges.empty() ? 0.0 : edges.back();
  return r;
}

RhoRule kronrod_rule(const std::vector<double>& edges) {
  const auto& x = Kronrod::abscissa();
  const auto& w = Kronrod::weights();
  RhoRule r;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double c = 0.5 * (edges[i] + edges[i + 1]), h = 0.5 * (edges[i + 1] - edges[i]);
    if (!(h > 0.0)) continue;
    for (std::size_t k = x.size(); k-- > 1;) {
      r.nodes.push_back(c - h * x[k]);
      r.weights.push_back(h * w[k]);
    }
    r.nodes.push_back(c);
    r.weights.push_back(h * w[0]);
    for (std::size_t k = 1; k < x.size(); ++k) {
      r.nodes.push_back(c + h * x[k]);
      r.weights.push_back(h * w[k]);
    }
  }
  return r;
}

}  // namespace kn::metivier
