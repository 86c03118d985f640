#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace kn::weights {

enum class WeightKind { Gevrey, LogPower, SubLog, ExpLog, Custom };

// A weight function omega on [0, inf). Catalog entries are normalized to
// vanish on [0, 1] by omega(t) = max(0, raw(t) - raw(1)) unless stated.
class Weight {
 public:
  static Weight gevrey(double s, bool normalized = true);
  // 0 on [0, e^(2s)], then t^(1/s)/log t shifted to be continuous.
  static Weight logpower(double s);
  static Weight sublog(double beta, bool normalized = true);
  static Weight explog(double alpha, double beta, bool normalized = true);
  // Piecewise linear through (t_k, w_k); extended with the last slope.
  static Weight custom(std::vector<double> t, std::vector<double> w, std::string label = "table");
  static Weight load_table(const std::filesystem::path& path);
  // `gevrey:s=2`, `logpower:s=2`, `sublog:beta=2`, `explog:alpha=0.5,beta=1`, `custom:<path>`.
  static Weight parse(std::string_view spec);

  double operator()(double t) const;
  // phi(tau) = omega(e^tau), evaluated without forming e^tau where possible.
  double phi(double tau) const;

  WeightKind kind() const { return kind_; }
  bool normalized() const { return normalized_; }
  const std::vector<double>& params() const { return params_; }
  std::string spec() const;

 private:
  Weight() = default;
  double raw_phi(double tau) const;

  WeightKind kind_ = WeightKind::Gevrey;
  std::vector<double> params_;
  bool normalized_ = true;
  double shift_ = 0.0;
  std::string label_;
  std::shared_ptr<const std::vector<double>> table_t_, table_w_;
};

// The four catalog entries at their default parameters.
std::vector<Weight> catalog();

}  // namespace kn::weights
