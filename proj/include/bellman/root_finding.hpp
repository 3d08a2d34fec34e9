#pragma once

#include <cmath>
#include <utility>

#include "errors.hpp"

namespace bmt {

struct RootResult {
  double x {0.0};
  double fx {0.0};
  int iterations {0};
};

// Bisection on a sign change of f over [lo, hi] until the bracket is narrower
// than width. The bracket is updated in place.
template <typename F>
int bisect_bracket(F&& f, double& lo, double& hi, double width, int max_iter = 400) {
  double flo = f(lo);
  int it = 0;
  while (hi - lo > width && it < max_iter) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double fm = f(mid);
    ++it;
    if (fm == 0.0) { lo = hi = mid; break; }
    if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; }
    else { hi = mid; }
  }
  return it;
}

// Plain bisection run until the bracket cannot shrink further.
template <typename F>
RootResult bisect(F&& f, double lo, double hi, int max_iter = 2000) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if ((flo < 0.0) == (fhi < 0.0)) throw NoRootError("bisect: root not bracketed");
  int it = bisect_bracket(f, lo, hi, 0.0, max_iter);
  double x = 0.5 * (lo + hi);
  return {x, f(x), it};
}

// Procedure: safeguarded_newton
// fd(x) returns (f, f'); falls back to bisection whenever a Newton step
// leaves the bracket or fails to halve the previous step.
template <typename FD>
RootResult safeguarded_newton(FD&& fd, double lo, double hi, double ftol, int max_iter) {
  auto [flo, dlo] = fd(lo);
  auto [fhi, dhi] = fd(hi);
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if ((flo < 0.0) == (fhi < 0.0)) throw NoRootError("safeguarded_newton: root not bracketed");
  double xl = lo, xh = hi;
  if (flo > 0.0) std::swap(xl, xh);
  double x = 0.5 * (lo + hi);
  double dxold = std::fabs(hi - lo), dx = dxold;
  auto [f, df] = fd(x);
  for (int it = 1; it <= max_iter; ++it) {
    if (std::fabs(f) <= ftol) return {x, f, it - 1};
    bool out = (((x - xh) * df - f) * ((x - xl) * df - f) >= 0.0);
    if (out || std::fabs(2.0 * f) > std::fabs(dxold * df)) {
      dxold = dx;
      dx = 0.5 * (xh - xl);
      double prev = x;
      x = xl + dx;
      if (x == prev) return {x, f, it};
    } else {
      dxold = dx;
      dx = f / df;
      double prev = x;
      x -= dx;
      if (x == prev) return {x, f, it};
    }
    std::tie(f, df) = fd(x);
    if (f < 0.0) xl = x; else xh = x;
    if (xl == xh || std::nextafter(std::fmin(xl, xh), std::fmax(xl, xh)) >= std::fmax(xl, xh)) {
      return {x, f, it};
    }
  }
  throw ConvergenceError("safeguarded_newton: iteration cap reached", max_iter, std::fabs(f));
}

}  // namespace bmt
