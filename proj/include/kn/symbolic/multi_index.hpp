#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace kn::sym {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : a_(n, 0) {}
  MultiIndex(std::initializer_list<int> v) : a_(v) {}
  explicit MultiIndex(std::vector<int> v) : a_(std::move(v)) {}

  std::size_t size() const { return a_.size(); }
  int operator[](std::size_t i) const { return a_[i]; }
  int& operator[](std::size_t i) { return a_[i]; }
  const std::vector<int>& values() const { return a_; }

  int order() const;
  double factorial() const;
  // Componentwise partial order.
  bool le(const MultiIndex& other) const;
  MultiIndex operator+(const MultiIndex& o) const;
  MultiIndex operator-(const MultiIndex& o) const;
  std::string to_string() const;

  static MultiIndex unit(std::size_t n, std::size_t i);

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

 private:
  std::vector<int> a_;
};

// Product of componentwise binomials, binom(alpha, beta) for beta <= alpha.
double binomial(const MultiIndex& alpha, const MultiIndex& beta);

// All multi-indices of length n and modulus q, in lexicographic order.
std::vector<MultiIndex> indices_of_order(std::size_t n, int q);
// All beta <= alpha, in lexicographic order.
std::vector<MultiIndex> indices_below(const MultiIndex& alpha);

// Graded order: higher modulus first, then lexicographically larger first.
struct GradedDescending {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    if (a.order() != b.order()) return a.order() > b.order();
    return a > b;
  }
};

}  // namespace kn::sym
