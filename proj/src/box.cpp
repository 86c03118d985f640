#include "kn/box.hpp"

#include <sstream>

#include "kn/error.hpp"
#include "kn/symbolic/expr.hpp"

namespace kn {

Box::Box(std::vector<double> lo_, std::vector<double> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw ParameterError("box bounds have different lengths");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw ParameterError("box needs lo <= hi on every axis");
}

Box Box::parse(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParameterError("box: cannot read number '" + item + "'");
    }
  }
  if (v.empty() || v.size() % 2 != 0) throw ParameterError("box needs lo,hi pairs");
  std::vector<double> lo, hi;
  for (std::size_t i = 0; i < v.size(); i += 2) {
    lo.push_back(v[i]);
    hi.push_back(v[i + 1]);
  }
  return Box(std::move(lo), std::move(hi));
}

Box Box::cube(std::size_t n, double lo, double hi) {
  return Box(std::vector<double>(n, lo), std::vector<double>(n, hi));
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

Box Box::shrink(double delta) const {
  if (!(delta >= 0.0)) throw ParameterError("shrink distance must be >= 0");
  Box b = *this;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    b.lo[i] += delta;
    b.hi[i] -= delta;
    if (!(b.lo[i] < b.hi[i])) {
      // Empty: collapse to the midpoint so the bounds stay ordered.
      b.lo[i] = b.hi[i] = 0.5 * (lo[i] + hi[i]);
    }
  }
  return b;
}

bool Box::empty() const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) return true;
  return lo.empty();
}

std::vector<double> Box::center() const {
  std::vector<double> c(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  return c;
}

std::string Box::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (i) s += ",";
    s += sym::format_number(lo[i]) + "," + sym::format_number(hi[i]);
  }
  return s;
}

}  // namespace kn
