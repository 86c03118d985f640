#include "kn/report/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include "kn/error.hpp"

namespace kn::report {

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json ladder_json(const std::vector<analysis::LadderRow>& rows) {
  json a = json::array();
  for (const auto& r : rows)
    a.push_back({{"k", r.k}, {"log_c", finite_or_null(r.log_c)}, {"log_c_half", finite_or_null(r.log_c_half)},
                 {"stable", r.stable}});
  return a;
}

json side_json(const metivier::RunSide& s) {
  json fits = json::array();
  for (const auto& f : s.fits)
    fits.push_back({{"weight", f.weight}, {"k_star", f.k_star}, {"log_c_star", finite_or_null(f.log_c_star)},
                    {"stable", f.stable}});
  json rows = json::array();
  for (std::size_t i = 0; i < s.index.size(); ++i)
    rows.push_back({{"index", s.index[i]}, {"log_norm", finite_or_null(s.log_norm[i])}});
  return {{"rows", rows}, {"exponent", finite_or_null(s.exponent)}, {"fits", fits}};
}

}  // namespace

std::string Table::to_csv() const {
  auto line = [](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        s += cells[i];
        continue;
      }
      s += '"';
      for (char c : cells[i]) s += c == '"' ? std::string("\"\"") : std::string(1, c);
      s += '"';
    }
    return s + "\n";
  };
  std::string out = line(header);
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return sym::format_number(v);
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json envelope(const std::string& command, json inputs, json result, const std::string& generated_at) {
  return {{"schema_version", kSchemaVersion},
          {"generated_at", generated_at},
          {"command", command},
          {"inputs", std::move(inputs)},
          {"result", std::move(result)}};
}

json without_timestamp(json j) {
  if (j.is_object()) {
    j.erase("generated_at");
    for (auto& [k, v] : j.items()) v = without_timestamp(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = without_timestamp(v);
  }
  return j;
}

json to_json(const weights::AxiomReport& r) {
  json gamma = json::array();
  for (const auto& [t, ratio] : r.gamma_ratios) gamma.push_back({{"t", t}, {"ratio", finite_or_null(ratio)}});
  return {{"monotone", r.monotone},
          {"vanishes_on_unit", r.vanishes_on_unit},
          {"alpha_L", finite_or_null(r.alpha_L)},
          {"shift_L", finite_or_null(r.shift_L)},
          {"alpha0_C", finite_or_null(r.alpha0_C)},
          {"alpha0_t0", finite_or_null(r.alpha0_t0)},
          {"gamma_ratios", gamma},
          {"gamma_decreasing", r.gamma_decreasing},
          {"convexity_residual", finite_or_null(r.convexity_residual)},
          {"convex", r.convex},
          {"integral", finite_or_null(r.integral)},
          {"tail_exponent", finite_or_null(r.tail_exponent)},
          {"increment_ratio", finite_or_null(r.increment_ratio)},
          {"quasianalyticity", weights::to_string(r.quasianalyticity)}};
}

json to_json(const weights::PropertyReport& r, std::size_t max_violations) {
  json v = json::array();
  for (std::size_t i = 0; i < r.violations.size() && i < max_violations; ++i) {
    const auto& w = r.violations[i];
    v.push_back({{"property", w.property}, {"j", w.j}, {"h", w.h}, {"r", w.r}, {"lambda", w.lambda},
                 {"lhs", finite_or_null(w.lhs)}, {"rhs", finite_or_null(w.rhs)}});
  }
  return {{"checks", r.checks}, {"violation_count", r.violations.size()}, {"violations", v}, {"ok", r.ok()}};
}

json to_json(const weights::ShiftBound& b) {
  return {{"rho", b.rho},         {"lambda", b.lambda},
          {"L", b.L},             {"n_rho", b.n_rho},
          {"lambda_prime", b.lambda_prime}, {"log_D", b.log_D},
          {"verified", b.verified}, {"witness_j", b.witness_j},
          {"worst_gap", finite_or_null(b.worst_gap)}};
}

json to_json(const pdo::LinearPDO& p) {
  json terms = json::array();
  for (const auto& [alpha, c] : p.d_coefficients()) terms.push_back({{"alpha", alpha.values()}, {"coefficient", sym::to_string(c)}});
  return {{"dimension", p.dimension()},
          {"order", p.order()},
          {"d_form", p.to_string(true)},
          {"partial_form", p.to_string(false)},
          {"term_count", p.term_count()},
          {"terms", terms}};
}

json to_json(const pdo::EllipticityVerdict& v) {
  return {{"verdict", v.elliptic ? "elliptic" : "non-elliptic"},
          {"sampled", true},
          {"c_min", v.c_min},
          {"max_symbol", v.max_symbol},
          {"threshold", v.threshold},
          {"witness_x", v.witness_x},
          {"witness_xi", v.witness_xi},
          {"samples", v.samples}};
}

json to_json(const analysis::NormTable& t) {
  json rows = json::array();
  for (double v : t.norms) rows.push_back(finite_or_null(v));
  return {{"norms", rows}, {"truncated", t.truncated}, {"truncation_reason", t.truncation_reason}};
}

json to_json(const analysis::RoumieuFit& f) {
  json res = json::array();
  for (double r : f.residuals) res.push_back(finite_or_null(r));
  return {{"k_star", f.k_star},
          {"log_c_star", finite_or_null(f.log_c_star)},
          {"c_star", finite_or_null(f.c_star)},
          {"stable", f.stable},
          {"roumieu", ladder_json(f.roumieu)},
          {"beurling", ladder_json(f.beurling)},
          {"residuals", res}};
}

json to_json(const analysis::GrowthReport& r) {
  auto side = [](const analysis::GrowthSide& s) {
    return json{{"table", to_json(s.table)}, {"fit", to_json(s.fit)}, {"slope", finite_or_null(s.slope)}};
  };
  json j{{"weight", r.weight}, {"m", r.m}, {"derivatives", side(r.derivatives)},
         {"finite_window_caveat", r.finite_window_caveat}};
  if (!r.iterates.table.norms.empty()) {
    j["iterates"] = side(r.iterates);
    j["sides_agree"] = r.sides_agree;
  }
  return j;
}

json to_json(const std::vector<analysis::RecursionRow>& rows) {
  json a = json::array();
  for (const auto& r : rows)
    a.push_back({{"p", r.p}, {"numerator", finite_or_null(r.numerator)}, {"denominator", finite_or_null(r.denominator)},
                 {"c0", finite_or_null(r.c0)}, {"status", analysis::to_string(r.status)}});
  return a;
}

json to_json(const metivier::CounterexampleReport& r) {
  json j{{"eta", r.eta},
         {"inv_eta", r.inv_eta},
         {"eps_bound", r.eps_bound},
         {"op", r.op},
         {"route", r.route},
         {"box", r.box.to_string()},
         {"derivative", side_json(r.derivative)},
         {"iterate", side_json(r.iterate)},
         {"gap", finite_or_null(r.gap)},
         {"verdict", metivier::to_string(r.verdict)},
         {"caveats", r.caveats}};
  if (r.control) {
    j["control"] = {{"op", r.control_op},
                    {"iterate", side_json(*r.control)},
                    {"gap", finite_or_null(r.control_gap)},
                    {"verdict", metivier::to_string(r.control_verdict)}};
  }
  return j;
}

json merge(const std::vector<json>& reports) {
  json all = json::array();
  for (const auto& r : reports) {
    if (!r.is_object() || !r.contains("schema_version")) throw ParameterError("merge: input is not a report");
    if (r["schema_version"] != kSchemaVersion)
      throw ParameterError("merge: unsupported schema_version " + r["schema_version"].dump());
    all.push_back(r);
  }
  return envelope("report merge", json{{"count", reports.size()}}, json{{"reports", all}});
}

void write(const std::string& prefix, const json& j, const Table& table) {
  std::ofstream js(prefix + ".json");
  if (!js) throw ParameterError("cannot write " + prefix + ".json");
  js << j.dump(2) << "\n";
  if (table.rows.empty()) return;
  std::ofstream cs(prefix + ".csv");
  if (!cs) throw ParameterError("cannot write " + prefix + ".csv");
  cs << table.to_csv();
}

}  // namespace kn::report
