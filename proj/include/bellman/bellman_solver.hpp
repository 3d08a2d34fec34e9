#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "root_finding.hpp"
#include "special_functions.hpp"

namespace bmt {

struct OmegaPoint {
  double x1 {0.0};
  double x2 {0.0};
  double x3 {0.0};
};

enum class Which { max, min };
enum class Sector { linear_branch, implicit_branch, boundary, p_equal_2 };

inline const char* to_string(Sector s) {
  switch (s) {
    case Sector::linear_branch: return "linear_branch";
    case Sector::implicit_branch: return "implicit_branch";
    case Sector::boundary: return "boundary";
    case Sector::p_equal_2: return "p_equal_2";
  }
  return "?";
}

inline const char* to_string(Which w) { return w == Which::max ? "max" : "min"; }

// residual and scale are in normalized units, max(|x1|, |x2|, x3^(1/p)) = 1.
struct BellmanSolution {
  double value {0.0};
  double omega {0.0};
  Sector sector {Sector::boundary};
  int iterations {0};
  double residual {0.0};
  double scale {1.0};
};

inline double membership_tol(double x3) { return 1e-12 * std::max(1.0, x3); }

inline bool in_omega(const OmegaPoint& x, const ExponentParams& e) {
  if (!std::isfinite(x.x1) || !std::isfinite(x.x2) || !std::isfinite(x.x3)) return false;
  if (x.x3 < 0.0) return false;
  return pw(std::fabs(x.x1), e.p) <= x.x3 + membership_tol(x.x3);
}

inline void require_omega(const OmegaPoint& x, const ExponentParams& e, const char* who) {
  if (!in_omega(x, e)) throw DomainError(std::string(who) + ": point is outside the domain");
}

namespace detail {

struct Normalized {
  double tau, a, b, s;
};

inline Normalized normalize(const OmegaPoint& x, const ExponentParams& e) {
  double a = std::fabs(x.x1), b = std::fabs(x.x2), s = pw(x.x3, 1.0 / e.p);
  double tau = std::max({a, b, s});
  return {tau, a / tau, b / tau, s / tau};
}

inline double term_scale(double z1, double z2, const ExponentParams& e) {
  return pw(z1, e.p) + e.beta * pw(z2, e.p);
}

inline bool on_boundary(const OmegaPoint& x, const ExponentParams& e) {
  return x.x3 == 0.0 || x.x3 <= pw(std::fabs(x.x1), e.p);
}

// Upper end of the w bracket implied by the continuity estimates.
inline double bracket_hi(const Normalized& n, Which which, const ExponentParams& e) {
  if (which == Which::max) return n.b + (e.p_star - 1.0) * n.s;
  return pw(pw(n.b, e.p) + pw(n.s, e.p) / e.beta, 1.0 / e.p);
}

// Equation residual for candidate w: increasing in w for max, decreasing for min.
inline double equation(double w, const Normalized& n, Which which, const ExponentParams& e) {
  if (which == Which::max) return f_p(w, n.s, e) - f_p(n.b, n.a, e);
  return f_p(n.s, w, e) - f_p(n.a, n.b, e);
}

inline double equation_scale(double w, const Normalized& n, Which which, const ExponentParams& e) {
  if (which == Which::max) return std::max({1.0, term_scale(w, n.s, e), term_scale(n.b, n.a, e)});
  return std::max({1.0, term_scale(n.s, w, e), term_scale(n.a, n.b, e)});
}

inline BellmanSolution closed_or_boundary(const OmegaPoint& x, const ExponentParams& e, Which which,
                                          bool& done) {
  done = true;
  BellmanSolution r;
  double a = std::fabs(x.x1), b = std::fabs(x.x2);
  if (std::fabs(e.p - 2.0) < 1e-9) {
    r.value = b * b + x.x3 - a * a;
    r.sector = Sector::p_equal_2;
  } else if (on_boundary(x, e)) {
    r.value = pw(b, e.p);
    r.sector = Sector::boundary;
  } else {
    bool linear;
    double c;
    if (which == Which::max) {
      linear = f_power_branch(b, a, e);
      c = e.beta;
    } else {
      linear = f_power_branch(a, b, e);
      c = 1.0 / e.beta;
    }
    if (!linear) { done = false; return r; }
    r.value = pw(b, e.p) + c * (x.x3 - pw(a, e.p));
    r.sector = Sector::linear_branch;
  }
  r.omega = x.x3 > 0.0 ? pw(r.value / x.x3, 1.0 / e.p) : 0.0;
  return r;
}

inline BellmanSolution solve_implicit(const OmegaPoint& x, const ExponentParams& e, Which which) {
  Normalized n = normalize(x, e);
  double lo = n.b, hi = bracket_hi(n, which, e);
  double sgn = which == Which::max ? 1.0 : -1.0;
  auto f = [&](double w) { return sgn * equation(w, n, which, e); };
  auto fd = [&](double w) {
    double d = which == Which::max ? f_p_partials(w, n.s, e).first
                                   : -f_p_partials(n.s, w, e).second;
    return std::pair<double, double>{f(w), d};
  };
  double flo = f(lo);
  double fhi = f(hi);
  int grow = 0;
  while (fhi < 0.0 && grow < 60) { hi *= 2.0; fhi = f(hi); ++grow; }
  if (fhi < 0.0) {
    throw ConvergenceError("bellman solver: root not bracketed", grow, std::fabs(fhi));
  }
  BellmanSolution r;
  double w = lo;
  if (flo < 0.0) {
    int it = bisect_bracket(f, lo, hi, 1e-8);
    double scale0 = equation_scale(hi, n, which, e);
    RootResult rr = safeguarded_newton(fd, lo, hi, 1e-13 * scale0, 200);
    w = rr.x;
    // One extra Newton step: the finite-difference Hessian checks need the
    // root to machine precision, well past the residual target.
    auto [fw, dw] = fd(w);
    if (dw != 0.0) {
      double w2 = w - fw / dw;
      if (w2 >= lo && w2 <= hi && std::fabs(f(w2)) <= std::fabs(fw)) w = w2;
    }
    r.iterations = it + rr.iterations + 1;
  }
  r.scale = equation_scale(w, n, which, e);
  r.residual = std::fabs(equation(w, n, which, e));
  r.value = pw(w * n.tau, e.p);
  r.omega = w / n.s;
  r.sector = Sector::implicit_branch;
  return r;
}

}  // namespace detail

inline BellmanSolution bellman(const OmegaPoint& x, const ExponentParams& e, Which which) {
  require_omega(x, e, which == Which::max ? "bellman_max" : "bellman_min");
  bool done = false;
  BellmanSolution r = detail::closed_or_boundary(x, e, which, done);
  if (done) return r;
  return detail::solve_implicit(x, e, which);
}

inline BellmanSolution bellman_max(const OmegaPoint& x, const ExponentParams& e) {
  return bellman(x, e, Which::max);
}

inline BellmanSolution bellman_min(const OmegaPoint& x, const ExponentParams& e) {
  return bellman(x, e, Which::min);
}

// Residual of the defining equation at a given value B, normalized.
inline double equation_residual(const OmegaPoint& x, double B, const ExponentParams& e, Which which,
                                double* scale = nullptr) {
  detail::Normalized n = detail::normalize(x, e);
  double w = pw(B, 1.0 / e.p) / n.tau;
  if (scale) *scale = detail::equation_scale(w, n, which, e);
  return std::fabs(detail::equation(w, n, which, e));
}

// Second route: plain bisection on the phi form of the equation, no sector dispatch.
inline double b_from_phi(const OmegaPoint& x, const ExponentParams& e, Which which) {
  require_omega(x, e, "b_from_phi");
  if (detail::on_boundary(x, e)) return pw(std::fabs(x.x2), e.p);
  detail::Normalized n = detail::normalize(x, e);
  double s = n.s;
  double lo = n.b, hi = detail::bracket_hi(n, which, e);
  RootResult rr;
  if (which == Which::max) {
    double lhs = phi_max({n.a, n.b}, e);
    auto f = [&](double w) { return phi_max({s, w}, e) - lhs; };
    if (f(lo) >= 0.0) return pw(std::fabs(x.x2), e.p);
    while (f(hi) < 0.0) hi *= 2.0;
    rr = bisect(f, lo, hi);
  } else {
    double lhs = phi_min({n.a, n.b}, e);
    auto f = [&](double w) { return phi_min({s, w}, e) - lhs; };
    if (f(lo) >= 0.0) return pw(std::fabs(x.x2), e.p);
    while (f(hi) < 0.0) hi *= 2.0;
    rr = bisect(f, lo, hi);
  }
  return pw(rr.x * n.tau, e.p);
}

struct Bounds {
  double lo, hi;
};

inline Bounds bounds(const OmegaPoint& x, const ExponentParams& e, Which which) {
  double b = std::fabs(x.x2);
  double lo = pw(b, e.p);
  if (which == Which::max) return {lo, pw(b + (e.p_star - 1.0) * pw(x.x3, 1.0 / e.p), e.p)};
  return {lo, lo + x.x3 / e.beta};
}

enum class ScanRegion { standard, opposite };

// Extremum of B/x3 with x1 = 1 (max) or x2 = 1 (min, standard region) fixed by
// homogeneity, over a linear grid in the other plane coordinate on [0, 1] and
// a logarithmic ladder x3 in [1, 1e6].
inline double sharp_constant_scan(const ExponentParams& e, Which which, int grid_n,
                                  ScanRegion region = ScanRegion::standard) {
  if (grid_n < 16) throw DomainError("sharp_constant_scan: grid_n must be >= 16");
  double best = which == Which::max ? -HUGE_VAL : HUGE_VAL;
  for (int j = 0; j < grid_n; ++j) {
    double t = double(j) / (grid_n - 1);
    for (int k = 0; k < grid_n; ++k) {
      double x3 = std::pow(10.0, 6.0 * k / (grid_n - 1));
      OmegaPoint x;
      if (which == Which::max) {
        x = region == ScanRegion::standard ? OmegaPoint{1.0, t, x3} : OmegaPoint{t, 1.0, x3};
      } else {
        x = region == ScanRegion::standard ? OmegaPoint{t, 1.0, x3} : OmegaPoint{1.0, t, x3};
      }
      double r = bellman(x, e, which).value / x3;
      best = which == Which::max ? std::max(best, r) : std::min(best, r);
    }
  }
  return best;
}

}  // namespace bmt
