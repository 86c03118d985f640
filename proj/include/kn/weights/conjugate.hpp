#pragma once

#include <cstddef>
#include <memory>

#include "kn/kernels/kernels.hpp"
#include "kn/weights/weight.hpp"

namespace kn::weights {

// phi*(y) = max(0, sup_{t>=0} { y t - omega(e^t) }) with a shared memo table.
class YoungConjugate {
 public:
  explicit YoungConjugate(Weight w, double tol = 1e-13);

  double operator()(double y) const;
  // Maximizing t (0 when the clamp is active).
  double argmax(double y) const;

  const Weight& weight() const { return w_; }
  double tolerance() const { return tol_; }
  std::size_t cache_size() const;

 private:
  struct Memo;
  struct Entry {
    double value;
    double argmax;
  };
  Entry solve(double y) const;
  Entry lookup(double y) const;

  Weight w_;
  double tol_;
  std::shared_ptr<Memo> memo_;
};

double young_conjugate(const Weight& w, double y, double tol = 1e-13);

// Dense-grid brute force: window [0, W] doubled until the discrete maximizer
// is interior, step halved until the value is stable to rel_tol.
struct GridOracle {
  double value;
  double argmax;
  double step;
  double window;
};

GridOracle conjugate_grid_oracle(const Weight& w, double y, double rel_tol = 1e-11,
                                 kernels::Exec exec = kernels::Exec::Parallel);

// Exact conjugate of the normalized gevrey(s) weight:
// 0 for s*y <= 1, else s*y*(log(s*y) - 1) + 1.
double gevrey_conjugate(double s, double y);

struct AssocSeqValue {
  int j;
  double lambda;
  double log_value;  // log a_{j,lambda} = lambda*phi*(j/lambda) - log j!
};

AssocSeqValue assoc_seq(const YoungConjugate& conj, int j, double lambda);

// lambda * phi*(y / lambda), the log of e^{lambda phi*(y/lambda)}.
double scaled_conjugate(const YoungConjugate& conj, double y, double lambda);

}  // namespace kn::weights
