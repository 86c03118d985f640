#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kn {

// Invalid parameters for a weight, operator, grid or experiment.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Evaluation left the domain of an expression.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, std::string subexpr)
      : std::domain_error(what + " in `" + subexpr + "`"), subexpr_(std::move(subexpr)) {}
  const std::string& subexpr() const { return subexpr_; }

 private:
  std::string subexpr_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// The Young conjugate supremum does not appear to be finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A term or panel budget was exhausted.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& budget, std::size_t limit)
      : std::runtime_error("budget `" + budget + "` exceeded (limit " + std::to_string(limit) + ")"),
        budget_(budget) {}
  const std::string& budget() const { return budget_; }

 private:
  std::string budget_;
};

// Quadrature could not reach the requested tolerance.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace kn
