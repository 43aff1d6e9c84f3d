#pragma once

#include <cmath>
#include <cstddef>

#include "netepi/error.hpp"

namespace netepi {

struct Bracket {
  double lo, hi;
};

/// Bisection on [lo, hi] with f(lo) < 0 < f(hi) (either sign convention is
/// accepted). Infinite values count by their sign. Stops when the bracket is
/// narrower than `width`.
template <class F>
Bracket bisect(F&& f, double lo, double hi, double width, std::size_t max_iter = 400) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (std::isnan(flo) || std::isnan(fhi) || (flo < 0.0) == (fhi < 0.0) || flo == 0.0 || fhi == 0.0) {
    if (flo == 0.0) return {lo, lo};
    if (fhi == 0.0) return {hi, hi};
    throw numerical_error("bisection: no sign change on the bracket");
  }
  const bool lo_negative = flo < 0.0;
  for (std::size_t it = 0; it < max_iter && hi - lo > width; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (std::isnan(fm)) throw numerical_error("bisection: function returned NaN");
    if (fm == 0.0) return {mid, mid};
    if ((fm < 0.0) == lo_negative) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

/// Up to `steps` Newton updates from x, rejecting any that leave [lo, hi]
/// or fail to decrease |f|.
template <class F, class DF>
double newton_polish(F&& f, DF&& df, double x, double lo, double hi, int steps = 3) {
  double fx = f(x);
  for (int k = 0; k < steps && fx != 0.0; ++k) {
    const double d = df(x);
    if (!(std::abs(d) > 0.0) || !std::isfinite(d)) break;
    const double next = x - fx / d;
    if (!(next >= lo && next <= hi)) break;
    const double fn = f(next);
    if (!(std::abs(fn) <= std::abs(fx))) break;
    x = next;
    fx = fn;
  }
  return x;
}

}  // namespace netepi
