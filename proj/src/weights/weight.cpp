#include "kn/weights/weight.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "kn/error.hpp"
#include "kn/symbolic/expr.hpp"

namespace kn::weights {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ParameterError(msg);
}

// log(e + e^tau) and log(1 + e^tau) without overflow.
double log_e_plus_exp(double tau) { return tau > 1.0 ? tau + std::log1p(std::exp(1.0 - tau)) : std::log(std::exp(1.0) + std::exp(tau)); }
double log1p_exp(double tau) { return tau > 0.0 ? tau + std::log1p(std::exp(-tau)) : std::log1p(std::exp(tau)); }

}  // namespace

Weight Weight::gevrey(double s, bool normalized) {
  require(std::isfinite(s) && s > 1.0, "gevrey weight needs s > 1");
  Weight w;
  w.kind_ = WeightKind::Gevrey;
  w.params_ = {s};
  w.normalized_ = normalized;
  w.shift_ = normalized ? 1.0 : 0.0;
  return w;
}

Weight Weight::logpower(double s) {
  require(std::isfinite(s) && s > 1.0, "logpower weight needs s > 1");
  Weight w;
  w.kind_ = WeightKind::LogPower;
  w.params_ = {s};
  w.normalized_ = true;
  // Continuity at t = e^(2s): e^2 / (2s).
  w.shift_ = std::exp(2.0) / (2.0 * s);
  return w;
}

Weight Weight::sublog(double beta, bool normalized) {
  require(std::isfinite(beta) && beta > 1.0, "sublog weight needs beta > 1");
  Weight w;
  w.kind_ = WeightKind::SubLog;
  w.params_ = {beta};
  w.normalized_ = normalized;
  w.shift_ = normalized ? w.raw_phi(0.0) : 0.0;
  return w;
}

Weight Weight::explog(double alpha, double beta, bool normalized) {
  require(std::isfinite(alpha) && alpha > 0.0 && alpha < 1.0, "explog weight needs alpha in (0,1)");
  require(std::isfinite(beta) && beta > 0.0, "explog weight needs beta > 0");
  Weight w;
  w.kind_ = WeightKind::ExpLog;
  w.params_ = {alpha, beta};
  w.normalized_ = normalized;
  w.shift_ = normalized ? w.raw_phi(0.0) : 0.0;
  return w;
}

Weight Weight::custom(std::vector<double> t, std::vector<double> v, std::string label) {
  require(t.size() == v.size() && t.size() >= 2, "custom weight table needs at least two rows");
  for (std::size_t k = 0; k < t.size(); ++k) {
    require(std::isfinite(t[k]) && std::isfinite(v[k]), "custom weight table has non-finite entries");
    require(t[k] >= 0.0, "custom weight table needs t >= 0");
    if (k) require(t[k] > t[k - 1], "custom weight table needs strictly increasing t");
  }
  Weight w;
  w.kind_ = WeightKind::Custom;
  w.label_ = std::move(label);
  w.table_t_ = std::make_shared<const std::vector<double>>(std::move(t));
  w.table_w_ = std::make_shared<const std::vector<double>>(std::move(v));
  w.normalized_ = w(1.0) == 0.0 && w(0.0) == 0.0;
  return w;
}

Weight Weight::load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open weight table " + path.string());
  std::vector<double> t, v;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a, b;
    if (!(row >> a)) continue;
    if (!(row >> b)) throw ParameterError("weight table row needs two columns: " + line);
    t.push_back(a);
    v.push_back(b);
  }
  return custom(std::move(t), std::move(v), path.string());
}

Weight Weight::parse(std::string_view spec) {
  auto colon = spec.find(':');
  std::string kind(spec.substr(0, colon));
  std::string rest = colon == std::string_view::npos ? std::string() : std::string(spec.substr(colon + 1));
  if (kind == "custom") {
    require(!rest.empty(), "custom weight needs a path");
    return load_table(rest);
  }
  std::map<std::string, double> kv;
  std::vector<double> positional;
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    try {
      if (eq == std::string::npos) {
        positional.push_back(std::stod(item));
      } else {
        kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
      }
    } catch (const std::logic_error&) {
      throw ParameterError("bad weight parameter '" + item + "'");
    }
  }
  auto get = [&](const std::string& key, std::size_t pos, double def) {
    if (auto it = kv.find(key); it != kv.end()) return it->second;
    return pos < positional.size() ? positional[pos] : def;
  };
  auto known = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : kv) {
      (void)v;
      bool ok = false;
      for (const char* key : keys) ok = ok || k == key;
      require(ok, "unknown parameter '" + k + "' for weight " + kind);
    }
  };
  if (kind == "gevrey") {
    known({"s"});
    return gevrey(get("s", 0, 2.0));
  }
  if (kind == "logpower") {
    known({"s"});
    return logpower(get("s", 0, 2.0));
  }
  if (kind == "sublog") {
    known({"beta"});
    return sublog(get("beta", 0, 2.0));
  }
  if (kind == "explog") {
    known({"alpha", "beta"});
    return explog(get("alpha", 0, 0.5), get("beta", 1, 1.0));
  }
  throw ParameterError("unknown weight kind '" + kind + "'");
}

double Weight::raw_phi(double tau) const {
  switch (kind_) {
    case WeightKind::Gevrey:
      return std::exp(tau / params_[0]);
    case WeightKind::LogPower: {
      const double s = params_[0];
      if (tau <= 2.0 * s) return shift_;
      return std::exp(tau / s) / tau;
    }
    case WeightKind::SubLog:
      return std::exp(tau - params_[0] * std::log(log_e_plus_exp(tau)));
    case WeightKind::ExpLog:
      return std::exp(params_[1] * std::pow(log1p_exp(tau), params_[0]));
    case WeightKind::Custom:
      return (*this)(std::exp(tau));
  }
  return 0.0;
}

double Weight::phi(double tau) const {
  if (kind_ == WeightKind::Custom) return (*this)(std::exp(tau));
  if (std::isinf(tau) && tau < 0) return (*this)(0.0);
  double v = raw_phi(tau) - shift_;
  if (normalized_ || kind_ == WeightKind::LogPower) return std::max(0.0, v);
  return v;
}

double Weight::operator()(double t) const {
  if (!(t >= 0.0)) throw ParameterError("weight evaluated at negative t");
  if (kind_ == WeightKind::Custom) {
    const auto& T = *table_t_;
    const auto& W = *table_w_;
    std::size_t k = std::upper_bound(T.begin(), T.end(), t) - T.begin();
    if (k == 0) return W.front();
    if (k >= T.size()) k = T.size() - 1;
    const double a = T[k - 1], b = T[k];
    return W[k - 1] + (W[k] - W[k - 1]) * (t - a) / (b - a);
  }
  if (t == 0.0) return kind_ == WeightKind::ExpLog && !normalized_ ? 1.0 : 0.0;
  if (kind_ == WeightKind::Gevrey) {
    double v = std::pow(t, 1.0 / params_[0]) - shift_;
    return normalized_ ? std::max(0.0, v) : v;
  }
  return phi(std::log(t));
}

std::string Weight::spec() const {
  using kn::sym::format_number;
  switch (kind_) {
    case WeightKind::Gevrey: return "gevrey:s=" + format_number(params_[0]);
    case WeightKind::LogPower: return "logpower:s=" + format_number(params_[0]);
    case WeightKind::SubLog: return "sublog:beta=" + format_number(params_[0]);
    case WeightKind::ExpLog:
      return "explog:alpha=" + format_number(params_[0]) + ",beta=" + format_number(params_[1]);
    case WeightKind::Custom: return "custom:" + label_;
  }
  return {};
}

std::vector<Weight> catalog() {
  return {Weight::gevrey(2.0), Weight::logpower(2.0), Weight::sublog(2.0), Weight::explog(0.5, 1.0)};
}

}  // namespace kn::weights
