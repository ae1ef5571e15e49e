#pragma once

#include <cmath>
#include <cstdio>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace medlat {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct BisectionOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-12;
  int max_iter = 200;
};

/// Root of an increasing function on [lo, hi] with fn(lo) <= 0 <= fn(hi).
/// For a decreasing function pass its negation.
template <typename Fn>
double bisect_increasing(Fn&& fn, double lo, double hi, const BisectionOptions& opt = {}) {
  if (!(lo <= hi)) throw std::invalid_argument("bisection: empty bracket");
  for (int it = 0; it < opt.max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= opt.abs_tol + opt.rel_tol * std::abs(mid)) return mid;
    if (fn(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  throw std::runtime_error("bisection did not converge after " + std::to_string(opt.max_iter) +
                           " iterations");
}

/// Shortest-safe round-trip decimal: 17 significant digits.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace medlat
