#pragma once

// Independent reference computations for the tests: long double arithmetic,
// explicit branch formulas and plain bisection, sharing no code with the
// library beyond the point types.

#include <algorithm>
#include <cmath>
#include <functional>

#include "bellman/rng.hpp"
#include "bellman/special_functions.hpp"
#include "bellman/bellman_solver.hpp"

namespace oracle {

using ld = long double;

inline ld pstar(ld p) { return std::max(p, p / (p - 1)); }
inline ld beta(ld p) { return std::pow(pstar(p) - 1, p); }

// F_p with the branch rule written out independently.
inline ld F(ld z1, ld z2, ld p) {
  ld q = pstar(p) - 1;
  bool power = p >= 2 ? z1 <= q * z2 : z1 >= q * z2;
  if (power) return std::pow(z1, p) - beta(p) * std::pow(z2, p);
  ld K = p * std::pow(1 - 1 / pstar(p), p - 1);
  return K * std::pow(z1 + z2, p - 1) * (z1 - q * z2);
}

inline ld bisect(const std::function<ld(ld)>& f, ld lo, ld hi) {
  ld flo = f(lo);
  for (int i = 0; i < 300; ++i) {
    ld mid = 0.5L * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ld fm = f(mid);
    if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; } else hi = mid;
  }
  return 0.5L * (lo + hi);
}

// Theorem 1 equations solved directly for w = B^(1/p).
inline ld bmax(ld x1, ld x2, ld x3, ld p) {
  ld a = std::fabs(x1), b = std::fabs(x2), s = std::pow(x3, 1 / p);
  ld t = F(b, a, p);
  ld hi = b + pstar(p) * s + 1;
  return std::pow(bisect([&](ld w) { return F(w, s, p) - t; }, b, hi), p);
}

inline ld bmin(ld x1, ld x2, ld x3, ld p) {
  ld a = std::fabs(x1), b = std::fabs(x2), s = std::pow(x3, 1 / p);
  ld t = F(a, b, p);
  ld hi = b + s + 1;
  return std::pow(bisect([&](ld w) { return t - F(s, w, p); }, b, hi), p);
}

// Random point of the domain: |x1|, |x2| up to r, x3 in [|x1|^p, |x1|^p + spread].
inline bmt::OmegaPoint random_point(bmt::SplitMix64& rng, double p, double r = 2.0, double spread = 4.0) {
  double x1 = rng.uniform(-r, r), x2 = rng.uniform(-r, r);
  double base = std::pow(std::fabs(x1), p);
  double x3 = base + spread * rng.uniform() * rng.uniform();
  return {x1, x2, x3};
}

inline double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

}  // namespace oracle
