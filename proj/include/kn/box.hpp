#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace kn {

// Axis-aligned box [lo_1, hi_1] x ... x [lo_n, hi_n].
struct Box {
  std::vector<double> lo, hi;

  Box() = default;
  Box(std::vector<double> lo_, std::vector<double> hi_);
  // From "lo1,hi1,lo2,hi2,...".
  static Box parse(const std::string& text);
  static Box cube(std::size_t n, double lo, double hi);

  std::size_t dimension() const { return lo.size(); }
  double volume() const;
  // Points at distance > delta from the boundary. Empty (see empty()) once
  // 2 delta reaches the shortest side.
  Box shrink(double delta) const;
  bool empty() const;
  std::vector<double> center() const;
  std::string to_string() const;
};

}  // namespace kn
