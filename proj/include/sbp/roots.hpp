#pragma once

#include <cmath>
#include <utility>

#include "sbp/errors.hpp"

namespace sbp {

struct BisectResult {
  double root;
  double f_root;
  double lo, hi;  // final bracket; always contains a sign change of f
  int iterations;
};

/// Plain bisection. Deterministic: returns the bracket midpoint once the
/// bracket width drops below tol or |f| drops below f_tol.
template <class F>
BisectResult bisect_root(F&& f, double lo, double hi, double tol,
                         double f_tol = 0.0) {
  if (!(tol > 0.0)) throw parameter_error("bisect_root: tol must be positive");
  if (lo > hi) std::swap(lo, hi);
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, lo, hi, 0};
  if (fhi == 0.0) return {hi, 0.0, lo, hi, 0};
  if (std::signbit(flo) == std::signbit(fhi))
    throw bracket_error("bisect_root: no sign change on bracket", flo, fhi);
  int it = 0;
  double mid = 0.5 * (lo + hi), fm = 0.0;
  while (hi - lo > tol) {
    ++it;
    mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // bracket at ulp resolution
    fm = f(mid);
    if (fm == 0.0 || std::abs(fm) <= f_tol) return {mid, fm, lo, hi, it};
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  mid = 0.5 * (lo + hi);
  return {mid, f(mid), lo, hi, it};
}

}  // namespace sbp
