// knlab: command-line driver for the weights, operator, analysis and
// counterexample experiments. See README.md for the config format and the
// report schemas.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kn/analysis/growth.hpp"
#include "kn/error.hpp"
#include "kn/metivier/metivier.hpp"
#include "kn/report/report.hpp"
#include "kn/symbolic/parser.hpp"

namespace {

using kn::report::json;
using kn::report::number;
using kn::report::Table;

enum ExitCode { kOk = 0, kViolation = 1, kNumeric = 2, kUsage = 64 };

struct Outcome {
  json inputs = json::object();
  json result = json::object();
  Table table;
  int code = kOk;
};

struct Common {
  std::string out;
  bool dry_run = false;
  bool csv = false;
  std::uint64_t seed = 1;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
      throw kn::ParameterError("not a number list: `" + text + "`");
    v.push_back(x);
  }
  return v;
}

kn::analysis::QuadratureGrid grid_for(std::size_t n, int nodes) {
  return kn::analysis::QuadratureGrid::uniform(n, nodes);
}

json number_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
  return a;
}

// ---- weights ------------------------------------------------------------

struct WeightsCheckArgs {
  std::string spec;
};

Outcome weights_check(const WeightsCheckArgs& a, const Common& c) {
  Outcome o;
  auto w = kn::weights::Weight::parse(a.spec);
  o.inputs = {{"weight", w.spec()}};
  if (c.dry_run) return o;
  auto r = kn::weights::check_axioms(w);
  o.result = kn::report::to_json(r);
  const bool ok = r.monotone && r.vanishes_on_unit && r.convex && r.gamma_decreasing;
  o.result["ok"] = ok;
  o.table.header = {"t", "log_t_over_omega"};
  for (const auto& [t, ratio] : r.gamma_ratios) o.table.rows.push_back({number(t), number(ratio)});
  o.code = ok ? kOk : kViolation;
  return o;
}

struct ConjugateArgs {
  std::string spec;
  std::string y = "0.1,0.5,1,2,5,10,20,50";
  double tol = 1e-13;
  bool oracle = false;
  double oracle_tol = 1e-8;
};

Outcome weights_conjugate(const ConjugateArgs& a, const Common& c) {
  Outcome o;
  auto w = kn::weights::Weight::parse(a.spec);
  auto ys = parse_list(a.y);
  o.inputs = {{"weight", w.spec()}, {"y", ys}, {"tol", a.tol}, {"oracle", a.oracle}, {"oracle_tol", a.oracle_tol}};
  if (c.dry_run) return o;
  kn::weights::YoungConjugate conj(w, a.tol);
  o.table.header = {"y", "phi_star", "argmax"};
  if (a.oracle) o.table.header.insert(o.table.header.end(), {"oracle", "rel_err"});
  json rows = json::array();
  bool ok = true;
  for (double y : ys) {
    const double v = conj(y), t = conj.argmax(y);
    json row{{"y", y}, {"phi_star", v}, {"argmax", t}};
    std::vector<std::string> cells{number(y), number(v), number(t)};
    if (a.oracle) {
      auto g = kn::weights::conjugate_grid_oracle(w, y);
      const double rel = std::abs(v - g.value) / std::max(std::abs(g.value), 1e-300);
      const bool agree = v == g.value || rel <= a.oracle_tol;
      ok = ok && agree;
      row["oracle"] = g.value;
      row["rel_err"] = rel;
      row["agree"] = agree;
      cells.insert(cells.end(), {number(g.value), number(rel)});
    }
    rows.push_back(row);
    o.table.rows.push_back(cells);
  }
  o.result = {{"rows", rows}};
  if (a.oracle) o.result["ok"] = ok;
  o.code = ok ? kOk : kViolation;
  return o;
}

struct Prop21Args {
  std::string spec;
  int jmax = 60;
  int ladder_lo = -6, ladder_hi = 6;
  double slack = 1e-9;
  double L = 3.0;
  int n_max = 3;
  std::string rho = "2,10";
  int max_witnesses = 50;
};

Outcome weights_prop21(const Prop21Args& a, const Common& c) {
  Outcome o;
  auto w = kn::weights::Weight::parse(a.spec);
  if (a.jmax < 0) throw kn::ParameterError("--jmax must be >= 0");
  if (a.ladder_lo > a.ladder_hi) throw kn::ParameterError("--ladder-lo must not exceed --ladder-hi");
  if (!(a.slack >= 0)) throw kn::ParameterError("--slack must be >= 0");
  auto rhos = parse_list(a.rho);
  o.inputs = {{"weight", w.spec()}, {"jmax", a.jmax}, {"ladder", {a.ladder_lo, a.ladder_hi}}, {"slack", a.slack},
              {"L", a.L}, {"n_max", a.n_max}, {"rho", rhos}};
  if (c.dry_run) return o;
  kn::weights::YoungConjugate conj(w);
  const auto ladder = kn::weights::dyadic_ladder(a.ladder_lo, a.ladder_hi);
  auto props = kn::weights::check_prop21(conj, a.jmax, ladder, a.slack);
  auto shift = kn::weights::check_iterated_shift(conj, a.jmax, ladder, a.L, a.n_max, a.slack);
  json bounds = json::array();
  bool bounds_ok = true;
  for (double rho : rhos)
    for (double lambda : ladder) {
      auto b = kn::weights::bound_shift(conj, rho, lambda, a.L, a.jmax, a.slack);
      bounds_ok = bounds_ok && b.verified;
      bounds.push_back(kn::report::to_json(b));
    }
  const auto cap = static_cast<std::size_t>(std::max(0, a.max_witnesses));
  o.result = {{"properties", kn::report::to_json(props, cap)},
              {"iterated_shift", kn::report::to_json(shift, cap)},
              {"shift_bounds", bounds}};
  const bool ok = props.ok() && shift.ok() && bounds_ok;
  o.result["ok"] = ok;
  o.table.header = {"check", "j", "h", "r", "lambda", "lhs", "rhs"};
  for (const auto* rep : {&props, &shift})
    for (const auto& v : rep->violations)
      o.table.rows.push_back({v.property, std::to_string(v.j), std::to_string(v.h), std::to_string(v.r),
                              number(v.lambda), number(v.lhs), number(v.rhs)});
  o.code = ok ? kOk : kViolation;
  return o;
}

// ---- op -------------------------------------------------------------------

struct OpArgs {
  std::string text;
  std::string other;
  int dim = 2;
  int q = 2;
  std::size_t term_budget = 1'000'000;
  std::string x, xi;
  std::string box = "-1,1,-1,1";
  int x_samples = 5;
  int sphere_samples = 0;
  double threshold = 1e-9;
  bool require_elliptic = false;
};

Table terms_table(const kn::pdo::LinearPDO& p) {
  Table t;
  t.header = {"alpha", "coefficient"};
  for (const auto& [alpha, coef] : p.d_coefficients()) {
    std::string idx;
    for (int v : alpha.values()) idx += (idx.empty() ? "" : ",") + std::to_string(v);
    t.rows.push_back({idx, kn::sym::to_string(coef)});
  }
  return t;
}

Outcome op_parse(const OpArgs& a, const Common& c) {
  Outcome o;
  auto p = kn::pdo::LinearPDO::parse(a.text, a.dim);
  o.inputs = {{"op", a.text}, {"dim", a.dim}};
  if (c.dry_run) return o;
  o.result = kn::report::to_json(p);
  o.table = terms_table(p);
  return o;
}

Outcome op_compose(const OpArgs& a, const Common& c) {
  Outcome o;
  auto p = kn::pdo::LinearPDO::parse(a.text, a.dim);
  auto q = kn::pdo::LinearPDO::parse(a.other, a.dim);
  o.inputs = {{"p", a.text}, {"q", a.other}, {"dim", a.dim}, {"term_budget", a.term_budget}};
  if (c.dry_run) return o;
  auto pq = kn::pdo::compose(p, q, {true, a.term_budget});
  o.result = kn::report::to_json(pq);
  o.table = terms_table(pq);
  return o;
}

Outcome op_iterate(const OpArgs& a, const Common& c) {
  Outcome o;
  auto p = kn::pdo::LinearPDO::parse(a.text, a.dim);
  if (a.q < 0) throw kn::ParameterError("--q must be >= 0");
  o.inputs = {{"op", a.text}, {"dim", a.dim}, {"q", a.q}, {"term_budget", a.term_budget}};
  if (c.dry_run) return o;
  auto pq = kn::pdo::iterate(p, a.q, {true, a.term_budget});
  o.result = kn::report::to_json(pq);
  o.table = terms_table(pq);
  return o;
}

Outcome op_symbol(const OpArgs& a, const Common& c) {
  Outcome o;
  auto p = kn::pdo::LinearPDO::parse(a.text, a.dim);
  auto x = a.x.empty() ? std::vector<double>(a.dim, 0.0) : parse_list(a.x);
  auto xi = parse_list(a.xi);
  if (static_cast<int>(x.size()) != a.dim || static_cast<int>(xi.size()) != a.dim)
    throw kn::ParameterError("--x and --xi need " + std::to_string(a.dim) + " components");
  o.inputs = {{"op", a.text}, {"dim", a.dim}, {"x", x}, {"xi", xi}};
  if (c.dry_run) return o;
  auto v = kn::pdo::principal_symbol(p, x, xi);
  o.result = {{"order", p.order()}, {"principal_part", kn::pdo::principal_part(p).to_string()},
              {"re", v.real()}, {"im", v.imag()}, {"abs", std::abs(v)}};
  o.table.header = {"re", "im", "abs"};
  o.table.rows.push_back({number(v.real()), number(v.imag()), number(std::abs(v))});
  return o;
}

Outcome op_ellipticity(const OpArgs& a, const Common& c) {
  Outcome o;
  auto box = kn::Box::parse(a.box);
  auto p = kn::pdo::LinearPDO::parse(a.text, static_cast<int>(box.dimension()));
  kn::pdo::EllipticityOptions opts{a.x_samples, a.sphere_samples, a.threshold, c.seed};
  o.inputs = {{"op", a.text}, {"box", box.to_string()}, {"x_samples", a.x_samples},
              {"sphere_samples", a.sphere_samples}, {"threshold", a.threshold}, {"seed", c.seed}};
  if (c.dry_run) return o;
  auto v = kn::pdo::ellipticity_check(p, box, opts);
  o.result = kn::report::to_json(v);
  o.table.header = {"verdict", "c_min", "max_symbol", "samples"};
  o.table.rows.push_back({v.elliptic ? "elliptic" : "non-elliptic", number(v.c_min), number(v.max_symbol),
                          std::to_string(v.samples)});
  o.code = a.require_elliptic && !v.elliptic ? kViolation : kOk;
  return o;
}

// ---- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
  std::string fn;
  std::string op;
  std::string box;
  std::string weight = "gevrey:s=2";
  int jmax = 6;
  int N = 12;
  int p = 1, m = 1;
  int p_max = 4;
  int k = 1;
  int nodes = 65;
  int sup_points = 33;
  int delta_count = 32;
  double delta_lo = 1e-3, delta_hi = 1.0;
  std::size_t term_budget = 1'000'000;
};

struct AnalyzeInputs {
  kn::Box box;
  int n = 0;
  kn::sym::Expr u;
  std::optional<kn::pdo::LinearPDO> p;
  kn::analysis::QuadratureGrid grid;
  kn::sym::SimplifyOptions simplify;
};

AnalyzeInputs analyze_inputs(const AnalyzeArgs& a, bool need_op) {
  AnalyzeInputs in;
  in.box = kn::Box::parse(a.box);
  in.n = static_cast<int>(in.box.dimension());
  if (a.fn.empty()) throw kn::ParameterError("--fn is required");
  in.u = kn::sym::parse(a.fn, in.n);
  if (need_op && a.op.empty()) throw kn::ParameterError("--op is required");
  if (!a.op.empty()) in.p = kn::pdo::LinearPDO::parse(a.op, in.n);
  in.grid = grid_for(in.box.dimension(), a.nodes);
  in.simplify = {true, a.term_budget};
  return in;
}

json analyze_json_inputs(const AnalyzeArgs& a, const AnalyzeInputs& in) {
  json j{{"fn", kn::sym::to_string(in.u)}, {"box", in.box.to_string()}, {"nodes", a.nodes},
         {"term_budget", a.term_budget}};
  if (in.p) j["op"] = in.p->to_string();
  return j;
}

Outcome analyze_norms(const AnalyzeArgs& a, const Common& c) {
  Outcome o;
  auto in = analyze_inputs(a, true);
  if (a.jmax < 0) throw kn::ParameterError("--jmax must be >= 0");
  o.inputs = analyze_json_inputs(a, in);
  o.inputs["jmax"] = a.jmax;
  if (c.dry_run) return o;
  auto t = kn::analysis::iterate_norms(*in.p, in.u, in.box, a.jmax, in.grid, in.simplify);
  o.result = kn::report::to_json(t);
  o.table.header = {"j", "norm"};
  for (std::size_t j = 0; j < t.norms.size(); ++j) o.table.rows.push_back({std::to_string(j), number(t.norms[j])});
  return o;
}

Outcome analyze_growth(const AnalyzeArgs& a, const Common& c) {
  Outcome o;
  auto in = analyze_inputs(a, false);
  auto w = kn::weights::Weight::parse(a.weight);
  o.inputs = analyze_json_inputs(a, in);
  o.inputs.update({{"weight", w.spec()}, {"J", a.jmax}, {"N", a.N}, {"sup_points", a.sup_points}});
  if (c.dry_run) return o;
  kn::weights::YoungConjugate conj(w);
  kn::analysis::MembershipOptions opts;
  opts.J = a.jmax;
  opts.N = a.N;
  opts.grid = in.grid;
  opts.sup_points = a.sup_points;
  opts.simplify = in.simplify;
  auto r = in.p ? kn::analysis::membership_report(in.u, *in.p, in.box, conj, opts)
                : kn::analysis::derivative_growth(in.u, in.box, conj, opts);
  o.result = kn::report::to_json(r);
  o.table.header = {"side", "index", "norm", "residual"};
  auto rows = [&](const char* side, const kn::analysis::GrowthSide& s) {
    for (std::size_t j = 0; j < s.table.norms.size(); ++j) {
      const double res = j < s.fit.residuals.size() ? s.fit.residuals[j] : std::nan("");
      o.table.rows.push_back({side, std::to_string(j), number(s.table.norms[j]), number(res)});
    }
  };
  rows("derivative", r.derivatives);
  if (in.p) rows("iterate", r.iterates);
  return o;
}

Outcome analyze_npm(const AnalyzeArgs& a, const Common& c) {
  Outcome o;
  auto in = analyze_inputs(a, false);
  if (a.p < 0 || a.m < 0) throw kn::ParameterError("--p and --m must be >= 0");
  auto deltas = kn::analysis::default_delta_grid(a.delta_count, a.delta_lo, a.delta_hi);
  o.inputs = analyze_json_inputs(a, in);
  o.inputs.update({{"p", a.p}, {"m", a.m}, {"deltas", number_array(deltas)}});
  if (c.dry_run) return o;
  const int q = a.p * a.m;
  auto norms = kn::analysis::nabla_norms(in.u, q, deltas, in.box, in.grid, in.simplify);
  std::size_t best = 0;
  std::vector<double> scaled(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    scaled[i] = std::pow(deltas[i], q) * norms[i];
    if (scaled[i] > scaled[best]) best = i;
  }
  o.result = {{"npm", scaled.empty() ? 0.0 : scaled[best]},
              {"argmax_delta", deltas.empty() ? json(nullptr) : json(deltas[best])},
              {"nabla_norms", number_array(norms)}};
  o.table.header = {"delta", "nabla_norm", "scaled"};
  for (std::size_t i = 0; i < deltas.size(); ++i)
    o.table.rows.push_back({number(deltas[i]), number(norms[i]), number(scaled[i])});
  return o;
}

Outcome analyze_recursion(const AnalyzeArgs& a, const Common& c) {
  Outcome o;
  auto in = analyze_inputs(a, true);
  auto w = kn::weights::Weight::parse(a.weight);
  auto deltas = kn::analysis::default_delta_grid(a.delta_count, a.delta_lo, a.delta_hi);
  o.inputs = analyze_json_inputs(a, in);
  o.inputs.update({{"weight", w.spec()}, {"p_max", a.p_max}, {"k", a.k}, {"deltas", number_array(deltas)},
                   {"seed", c.seed}});
  if (c.dry_run) return o;
  kn::weights::YoungConjugate conj(w);
  kn::analysis::RecursionOptions opts;
  opts.deltas = deltas;
  opts.grid = in.grid;
  opts.simplify = in.simplify;
  opts.ellipticity.seed = c.seed;
  auto rows = kn::analysis::empirical_recursion_constant(in.u, *in.p, a.p_max, a.k, in.box, conj, opts);
  o.result = {{"rows", kn::report::to_json(rows)}};
  o.table.header = {"p", "numerator", "denominator", "c0", "status"};
  for (const auto& r : rows)
    o.table.rows.push_back({std::to_string(r.p), number(r.numerator), number(r.denominator), number(r.c0),
                            kn::analysis::to_string(r.status)});
  return o;
}

// ---- metivier ---------------------------------------------------------------

struct MetivierArgs {
  kn::metivier::MetivierConfig config;
  std::string x0 = "0,0", xi0 = "0,1";
  std::string cutoff = "plateau";
  int alpha_min = 10, alpha_max = 25;
  int q_max = 6;
  double tol = 1e-12;
  std::size_t panel_budget = 400000;
  std::string box;
  int nodes = 0;
  std::string omega, target;
  std::string control = "1*D[2,0] + 1*D[0,2]";
  double margin = 0.05;
};

Outcome metivier_run(const MetivierArgs& a, const Common& c) {
  Outcome o;
  auto cfg = a.config;
  cfg.x0 = parse_list(a.x0);
  cfg.xi0 = parse_list(a.xi0);
  if (a.cutoff == "plateau")
    cfg.cutoff = kn::metivier::CutoffKind::Plateau;
  else if (a.cutoff == "profile")
    cfg.cutoff = kn::metivier::CutoffKind::Profile;
  else
    throw kn::ParameterError("--cutoff must be plateau or profile");
  kn::metivier::MetivierParams params(cfg);
  kn::metivier::CounterexampleOptions opts;
  opts.J = a.q_max;
  opts.alpha_min = a.alpha_min;
  opts.alpha_max = a.alpha_max;
  opts.quad = {a.tol, a.panel_budget};
  opts.omega = a.omega;
  opts.target = a.target;
  opts.margin = a.margin;
  if (!a.box.empty()) {
    opts.box = kn::Box::parse(a.box);
    if (static_cast<int>(opts.box->dimension()) != params.dimension())
      throw kn::ParameterError("--box dimension does not match x0");
  }
  if (a.nodes > 0) opts.grid = grid_for(static_cast<std::size_t>(params.dimension()), a.nodes);
  if (!a.control.empty() && a.control != "none") opts.control = kn::pdo::LinearPDO::parse(a.control, params.dimension());
  if (!a.omega.empty()) kn::weights::Weight::parse(a.omega);
  if (!a.target.empty()) kn::weights::Weight::parse(a.target);
  o.inputs = {{"s", cfg.s},           {"sigma", cfg.sigma},       {"eps", cfg.eps},
              {"delta", cfg.delta},   {"m", cfg.m},               {"x0", cfg.x0},
              {"xi0", cfg.xi0},       {"op", params.op().to_string()}, {"cutoff", a.cutoff},
              {"alpha_min", a.alpha_min}, {"alpha_max", a.alpha_max}, {"q_max", a.q_max},
              {"tol", a.tol},         {"panel_budget", a.panel_budget},
              {"box", opts.box ? json(opts.box->to_string()) : json(nullptr)},
              {"nodes", a.nodes},     {"omega", a.omega},         {"target", a.target},
              {"control", opts.control ? json(opts.control->to_string()) : json(nullptr)},
              {"margin", a.margin}};
  if (c.dry_run) return o;
  auto r = kn::metivier::counterexample_report(params, opts);
  o.result = kn::report::to_json(r);
  o.table.header = {"side", "index", "log_norm"};
  auto rows = [&](const char* side, const kn::metivier::RunSide& s) {
    for (std::size_t i = 0; i < s.index.size(); ++i)
      o.table.rows.push_back({side, number(s.index[i]), number(s.log_norm[i])});
  };
  rows("derivative", r.derivative);
  rows("iterate", r.iterate);
  if (r.control) rows("control", *r.control);
  bool ok = r.verdict == kn::metivier::Verdict::Counterexample;
  if (r.control) ok = ok && r.control_verdict == kn::metivier::Verdict::NoCounterexample;
  o.code = ok ? kOk : kViolation;
  return o;
}

// ---- report -------------------------------------------------------------------

struct MergeArgs {
  std::vector<std::string> files;
};

Outcome report_merge(const MergeArgs& a, const Common& c) {
  Outcome o;
  o.inputs = {{"files", a.files}};
  std::vector<json> reports;
  for (const auto& f : a.files) {
    std::ifstream in(f);
    if (!in) throw kn::ParameterError("cannot read " + f);
    try {
      reports.push_back(json::parse(in));
    } catch (const json::parse_error& e) {
      throw kn::ParameterError(f + ": " + e.what());
    }
  }
  auto merged = kn::report::merge(reports);
  if (c.dry_run) return o;
  o.result = merged["result"];
  o.table.header = {"file", "command"};
  for (std::size_t i = 0; i < reports.size(); ++i)
    o.table.rows.push_back({a.files[i], reports[i].value("command", "")});
  return o;
}

// ---- driver -------------------------------------------------------------------

int emit(const std::string& command, const Outcome& o, const Common& c) {
  json result = o.result;
  if (c.dry_run) result = {{"dry_run", true}, {"valid", true}};
  result["exit_code"] = o.code;
  auto j = kn::report::envelope(command, o.inputs, result);
  if (!c.out.empty()) {
    kn::report::write(c.out, j, c.dry_run ? Table{} : o.table);
  } else if (c.csv && !c.dry_run) {
    std::cout << o.table.to_csv();
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return o.code;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Write <prefix>.json and <prefix>.csv instead of printing JSON");
  sub->add_flag("--dry-run", c.dry_run, "Validate the inputs without computing");
  sub->add_flag("--csv", c.csv, "Print the CSV table instead of the JSON report");
  sub->add_option("--seed", c.seed, "Seed for sampled checks")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weight, operator-iterate and counterexample laboratory"};
  app.set_config("--config", "", "INI file; [section.subsection] keys mirror the flags, flags override the file");
  app.require_subcommand(1);

  Common common;
  std::function<Outcome()> action;
  std::string command;
  auto bind = [&](CLI::App* sub, const std::string& name, std::function<Outcome()> f) {
    add_common(sub, common);
    sub->callback([&, name, f] {
      command = name;
      action = f;
    });
  };

  auto* weights = app.add_subcommand("weights", "Weight functions and Young conjugates");
  weights->require_subcommand(1);
  WeightsCheckArgs wc;
  auto* w_check = weights->add_subcommand("check", "Sampled axiom report for a weight");
  w_check->add_option("weight", wc.spec, "Weight spec, e.g. gevrey:s=2")->required();
  bind(w_check, "weights check", [&] { return weights_check(wc, common); });

  ConjugateArgs wj;
  auto* w_conj = weights->add_subcommand("conjugate", "Young conjugate table");
  w_conj->add_option("weight", wj.spec, "Weight spec")->required();
  w_conj->add_option("--y", wj.y, "Comma-separated y values")->capture_default_str();
  w_conj->add_option("--tol", wj.tol, "Ternary search tolerance")->capture_default_str();
  w_conj->add_flag("--oracle", wj.oracle, "Compare against the dense-grid oracle");
  w_conj->add_option("--oracle-tol", wj.oracle_tol, "Relative agreement required with --oracle")->capture_default_str();
  bind(w_conj, "weights conjugate", [&] { return weights_conjugate(wj, common); });

  Prop21Args wp;
  auto* w_prop = weights->add_subcommand("prop21", "Associated-sequence inequality suite");
  w_prop->add_option("weight", wp.spec, "Weight spec")->required();
  w_prop->add_option("--jmax", wp.jmax, "Largest j, h, r")->capture_default_str();
  w_prop->add_option("--ladder-lo", wp.ladder_lo, "Smallest lambda exponent (lambda = 2^k)")->capture_default_str();
  w_prop->add_option("--ladder-hi", wp.ladder_hi, "Largest lambda exponent")->capture_default_str();
  w_prop->add_option("--slack", wp.slack, "Multiplicative slack 1+slack")->capture_default_str();
  w_prop->add_option("--L", wp.L, "Shift constant L")->capture_default_str();
  w_prop->add_option("--n-max", wp.n_max, "Largest n in the iterated shift")->capture_default_str();
  w_prop->add_option("--rho", wp.rho, "Comma-separated rho values for the shift bound")->capture_default_str();
  w_prop->add_option("--max-witnesses", wp.max_witnesses, "Violations listed in the JSON")->capture_default_str();
  bind(w_prop, "weights prop21", [&] { return weights_prop21(wp, common); });

  auto* op = app.add_subcommand("op", "Linear differential operators");
  op->require_subcommand(1);
  OpArgs oa;
  auto op_flags = [&](CLI::App* sub, bool with_dim) {
    sub->add_option("op", oa.text, "Operator text, e.g. \"1*D[2,0] + x1*D[0,1]\"")->required();
    if (with_dim) sub->add_option("--dim", oa.dim, "Number of variables")->capture_default_str();
    sub->add_option("--term-budget", oa.term_budget, "Simplifier term budget")->capture_default_str();
  };
  auto* o_parse = op->add_subcommand("parse", "Parse and print in canonical form");
  op_flags(o_parse, true);
  bind(o_parse, "op parse", [&] { return op_parse(oa, common); });
  auto* o_comp = op->add_subcommand("compose", "P o Q");
  op_flags(o_comp, true);
  o_comp->add_option("other", oa.other, "Second operator")->required();
  bind(o_comp, "op compose", [&] { return op_compose(oa, common); });
  auto* o_iter = op->add_subcommand("iterate", "P^q by repeated composition");
  op_flags(o_iter, true);
  o_iter->add_option("--q", oa.q, "Power")->capture_default_str();
  bind(o_iter, "op iterate", [&] { return op_iterate(oa, common); });
  auto* o_sym = op->add_subcommand("symbol", "Principal symbol at (x, xi)");
  op_flags(o_sym, true);
  o_sym->add_option("--x", oa.x, "Point x (default origin)");
  o_sym->add_option("--xi", oa.xi, "Covector xi")->required();
  bind(o_sym, "op symbol", [&] { return op_symbol(oa, common); });
  auto* o_ell = op->add_subcommand("ellipticity", "Sampled ellipticity verdict on a box");
  op_flags(o_ell, false);
  o_ell->add_option("--box", oa.box, "lo1,hi1,lo2,hi2,...")->capture_default_str();
  o_ell->add_option("--x-samples", oa.x_samples, "Grid points per axis (at least 5)")->capture_default_str();
  o_ell->add_option("--sphere-samples", oa.sphere_samples, "Directions on the unit sphere (0 = minimum)")
      ->capture_default_str();
  o_ell->add_option("--threshold", oa.threshold, "Relative zero threshold for |P_m|")->capture_default_str();
  o_ell->add_flag("--require-elliptic", oa.require_elliptic, "Exit 1 when the verdict is non-elliptic");
  bind(o_ell, "op ellipticity", [&] { return op_ellipticity(oa, common); });

  auto* analyze = app.add_subcommand("analyze", "Norm tables, growth fits and seminorms");
  analyze->require_subcommand(1);
  AnalyzeArgs aa;
  auto an_flags = [&](CLI::App* sub) {
    sub->add_option("--fn", aa.fn, "Function of x1..xn")->required();
    sub->add_option("--box", aa.box, "lo1,hi1,lo2,hi2,...")->required();
    sub->add_option("--nodes", aa.nodes, "Simpson nodes per axis (odd)")->capture_default_str();
    sub->add_option("--term-budget", aa.term_budget, "Simplifier term budget")->capture_default_str();
  };
  auto* a_norms = analyze->add_subcommand("norms", "j -> ||P^j u||_L2(K)");
  an_flags(a_norms);
  a_norms->add_option("--op", aa.op, "Operator")->required();
  a_norms->add_option("--jmax", aa.jmax, "Largest j")->capture_default_str();
  bind(a_norms, "analyze norms", [&] { return analyze_norms(aa, common); });
  auto* a_growth = analyze->add_subcommand("growth", "Roumieu/Beurling fits of both growth sides");
  an_flags(a_growth);
  a_growth->add_option("--op", aa.op, "Operator; omit for the derivative side only");
  a_growth->add_option("--weight", aa.weight, "Weight spec")->capture_default_str();
  a_growth->add_option("--J", aa.jmax, "Iterate rows")->capture_default_str();
  a_growth->add_option("--N", aa.N, "Derivative rows")->capture_default_str();
  a_growth->add_option("--sup-points", aa.sup_points, "Sup-norm sample points per axis")->capture_default_str();
  bind(a_growth, "analyze growth", [&] { return analyze_growth(aa, common); });
  auto delta_flags = [&](CLI::App* sub) {
    sub->add_option("--delta-count", aa.delta_count, "Geometric delta grid size")->capture_default_str();
    sub->add_option("--delta-lo", aa.delta_lo, "Smallest delta")->capture_default_str();
    sub->add_option("--delta-hi", aa.delta_hi, "Largest delta")->capture_default_str();
  };
  auto* a_npm = analyze->add_subcommand("npm", "N^{pm}(u) = max_delta delta^{pm} ||grad^{pm} u||_delta");
  an_flags(a_npm);
  delta_flags(a_npm);
  a_npm->add_option("--p", aa.p, "p")->capture_default_str();
  a_npm->add_option("--m", aa.m, "m")->capture_default_str();
  bind(a_npm, "analyze npm", [&] { return analyze_npm(aa, common); });
  auto* a_rec = analyze->add_subcommand("recursion", "Empirical recursion constants C0");
  an_flags(a_rec);
  delta_flags(a_rec);
  a_rec->add_option("--op", aa.op, "Elliptic operator")->required();
  a_rec->add_option("--weight", aa.weight, "Weight spec")->capture_default_str();
  a_rec->add_option("--p-max", aa.p_max, "Largest p")->capture_default_str();
  a_rec->add_option("--k", aa.k, "Ladder k")->capture_default_str();
  bind(a_rec, "analyze recursion", [&] { return analyze_recursion(aa, common); });

  auto* metivier = app.add_subcommand("metivier", "Counterexample for non-elliptic operators");
  metivier->require_subcommand(1);
  MetivierArgs ma;
  auto* m_run = metivier->add_subcommand("run", "Counterexample report");
  m_run->add_option("--s", ma.config.s, "Weight order s")->capture_default_str();
  m_run->add_option("--sigma", ma.config.sigma, "Cutoff Gevrey order")->capture_default_str();
  m_run->add_option("--eps", ma.config.eps, "epsilon")->capture_default_str();
  m_run->add_option("--delta", ma.config.delta, "Cutoff radius")->capture_default_str();
  m_run->add_option("--m", ma.config.m, "Operator order")->capture_default_str();
  m_run->add_option("--op", ma.config.op, "Non-elliptic operator")->capture_default_str();
  m_run->add_option("--x0", ma.x0, "Base point")->capture_default_str();
  m_run->add_option("--xi0", ma.xi0, "Unit covector with P_m(xi0) = 0")->capture_default_str();
  m_run->add_option("--cutoff", ma.cutoff, "plateau or profile")->capture_default_str();
  m_run->add_option("--alpha-min", ma.alpha_min, "First alpha of the exponent fit")->capture_default_str();
  m_run->add_option("--alpha-max", ma.alpha_max, "Last alpha of the exponent fit")->capture_default_str();
  m_run->add_option("--q-max", ma.q_max, "Largest iterate q")->capture_default_str();
  m_run->add_option("--tol", ma.tol, "Quadrature tolerance")->capture_default_str();
  m_run->add_option("--panel-budget", ma.panel_budget, "Quadrature panel budget")->capture_default_str();
  m_run->add_option("--box", ma.box, "K as lo1,hi1,...; default x0 + [-0.1,0.1]^n");
  m_run->add_option("--nodes", ma.nodes, "Simpson nodes per axis (0 = default grid)")->capture_default_str();
  m_run->add_option("--omega", ma.omega, "Weight for the iterate side (default logpower:s=<s>)");
  m_run->add_option("--target", ma.target, "Comparison weight (default gevrey between s and 1/eta)");
  m_run->add_option("--control", ma.control, "Elliptic control operator, or none")->capture_default_str();
  m_run->add_option("--margin", ma.margin, "Exponent margin of the verdict")->capture_default_str();
  bind(m_run, "metivier run", [&] { return metivier_run(ma, common); });

  auto* report = app.add_subcommand("report", "Report utilities");
  report->require_subcommand(1);
  MergeArgs mg;
  auto* r_merge = report->add_subcommand("merge", "Merge JSON reports into one envelope");
  r_merge->add_option("files", mg.files, "Report files")->required()->check(CLI::ExistingFile);
  bind(r_merge, "report merge", [&] { return report_merge(mg, common); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return emit(command, action(), common);
  } catch (const kn::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const kn::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const kn::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
}
