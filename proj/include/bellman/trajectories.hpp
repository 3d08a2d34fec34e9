#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "bellman_solver.hpp"
#include "errors.hpp"
#include "root_finding.hpp"
#include "special_functions.hpp"

namespace bmt {

struct XiPoint {
  double y1 {0.0};
  double y2 {0.0};
  double y3 {0.0};
};

inline XiPoint to_xi(const OmegaPoint& x) { return {0.5 * (x.x2 + x.x1), 0.5 * (x.x2 - x.x1), x.x3}; }
inline OmegaPoint to_omega(const XiPoint& y) { return {y.y1 - y.y2, y.y1 + y.y2, y.y3}; }

enum class CaseId { c2_vertical, c3_1, c4_1, c3_2, c4_2 };

inline const char* to_string(CaseId c) {
  switch (c) {
    case CaseId::c2_vertical: return "c2_vertical";
    case CaseId::c3_1: return "c3_1";
    case CaseId::c4_1: return "c4_1";
    case CaseId::c3_2: return "c3_2";
    case CaseId::c4_2: return "c4_2";
  }
  return "?";
}

// Extremal problem whose implicit branch the case describes: 3_2 gives the
// concave candidate for p > 2 and the convex one for p < 2; 4_2 the reverse.
inline Which case_which(CaseId c, const ExponentParams& e) {
  bool upper = (c == CaseId::c3_2) == (e.p > 2.0);
  return upper ? Which::max : Which::min;
}

inline bool in_case_sector(const XiPoint& y, CaseId c, const ExponentParams& e, double slack = 0.0) {
  double p = e.p;
  if (!(y.y1 > 0.0)) return false;
  switch (c) {
    case CaseId::c3_2:
      return y.y2 >= ((p - 2.0) / p) * y.y1 - slack && y.y2 <= y.y1;
    case CaseId::c4_2:
      return y.y2 >= -y.y1 && y.y2 <= ((2.0 - p) / p) * y.y1 + slack;
    default:
      return false;
  }
}

// Boundary-end coordinate of a 3_2 / 4_2 chord.
inline double u_of_omega(double omega, double y1) { return ((omega - 1.0) / (omega + 1.0)) * y1; }

// Boundary-end coordinate of a 3_1 / 4_1 chord.
inline double v_of_omega(double omega, double y2) { return ((omega + 1.0) / (omega - 1.0)) * y2; }

struct TrajectoryChord {
  CaseId case_id {CaseId::c3_2};
  double omega {0.0};
  double u {std::numeric_limits<double>::quiet_NaN()};
  double v {std::numeric_limits<double>::quiet_NaN()};
  double w {std::numeric_limits<double>::quiet_NaN()};
  XiPoint boundary_end {};   // U on y3 = |y1 - y2|^p
  XiPoint symmetry_end {};   // on y2 = +y1 or y2 = -y1
  bool vertical {false};
};

namespace detail {

// Root of phi(omega) = target on [lo, +inf), phi monotone with given direction.
template <typename Phi>
double solve_case_omega(Phi&& phi, double target, double lo, double hi, bool increasing) {
  auto f = [&](double om) { return increasing ? phi(om) - target : target - phi(om); };
  if (f(lo) >= 0.0) return lo;
  if (increasing) {
    int guard = 0;
    while (f(hi) < 0.0 && guard++ < 200) hi *= 2.0;
  }
  return bisect(f, lo, hi).x;
}

}  // namespace detail

// Chord through y for the accepted cases 3_2 and 4_2.
inline TrajectoryChord chord(const XiPoint& y, const ExponentParams& e, CaseId c) {
  if (c == CaseId::c2_vertical) {
    throw SectorError("chord: vertical chords belong to the linear branch of the solver");
  }
  if (c != CaseId::c3_2 && c != CaseId::c4_2) {
    throw SectorError("chord: cases 3_1 and 4_1 are rejected; use rejected_case_solution");
  }
  if (!in_case_sector(y, c, e, 1e-12 * std::fabs(y.y1))) {
    throw SectorError(std::string("chord: point outside the sector of case ") + to_string(c));
  }
  double p = e.p;
  OmegaPoint x = to_omega(y);
  if (!in_omega(x, e) || !(y.y3 > 0.0)) throw DomainError("chord: point is outside the domain");
  TrajectoryChord ch;
  ch.case_id = c;
  double x1 = std::fabs(x.x1), x2 = std::fabs(x.x2);
  if (c == CaseId::c3_2) {
    double target = g_p(x2, x1, e) / y.y3;
    auto phi = [&](double om) { return g_p(om, 1.0, e); };
    ch.omega = detail::solve_case_omega(phi, target, p - 1.0, p + 1.0, true);
  } else {
    double target = g_p(x1, x2, e) / y.y3;
    auto phi = [&](double om) { return g_p(1.0, om, e); };
    ch.omega = detail::solve_case_omega(phi, target, 0.0, 1.0 / (p - 1.0), false);
  }
  double om = ch.omega;
  ch.u = u_of_omega(om, y.y1);
  ch.boundary_end = {y.y1, ch.u, pw(y.y1 - ch.u, p)};
  double dy = y.y2 - ch.u;
  if (std::fabs(dy) <= 1e-12 * y.y1) {
    ch.vertical = true;
    ch.w = std::numeric_limits<double>::infinity();
    ch.symmetry_end = {y.y1, ch.u, ch.w};
    return ch;
  }
  double target = dy > 0.0 ? y.y1 : -y.y1;
  double t = (target - ch.u) / dy;
  double u3 = ch.boundary_end.y3;
  ch.w = u3 + t * (y.y3 - u3);
  ch.symmetry_end = {y.y1, target, ch.w};
  return ch;
}

// Point at parameter t on the segment from the boundary end to the symmetry end.
inline XiPoint chord_point(const TrajectoryChord& ch, double t) {
  const XiPoint& a = ch.boundary_end;
  const XiPoint& b = ch.symmetry_end;
  return {a.y1 + t * (b.y1 - a.y1), a.y2 + t * (b.y2 - a.y2), a.y3 + t * (b.y3 - a.y3)};
}

// Candidate M(y) from the implicit solutions of the rejected cases 3_1 and 4_1.
inline double rejected_case_solution(const XiPoint& y, const ExponentParams& e, CaseId c,
                                     double* omega_out = nullptr) {
  if (c != CaseId::c3_1 && c != CaseId::c4_1) {
    throw SectorError("rejected_case_solution: only cases 3_1 and 4_1");
  }
  OmegaPoint x = to_omega(y);
  if (!in_omega(x, e) || !(y.y3 > 0.0)) throw DomainError("rejected_case_solution: point is outside the domain");
  double p = e.p;
  double s = pw(y.y3, 1.0 / p);
  double x1 = x.x1, x2 = x.x2;
  double w;
  if (c == CaseId::c3_1) {
    if (!(y.y2 > 0.0) || x1 < 0.0) throw NoRootError("rejected_case_solution: case 3_1 needs y2 > 0");
    double lhs = pw(x2 - x1, p - 1.0) * (x2 + (p - 1.0) * x1);
    auto f = [&](double ww) { return pw(ww - s, p - 1.0) * (ww + (p - 1.0) * s) - lhs; };
    double hi = 2.0 * s + x2;
    while (f(hi) < 0.0) hi *= 2.0;
    w = bisect(f, s, hi).x;
  } else {
    if (!(y.y2 < 0.0) || x2 < 0.0) throw NoRootError("rejected_case_solution: case 4_1 needs y2 < 0");
    double lhs = pw(x1 - x2, p - 1.0) * (x1 + (p - 1.0) * x2);
    auto f = [&](double ww) { return lhs - pw(s - ww, p - 1.0) * (s + (p - 1.0) * ww); };
    if (f(0.0) > 0.0) throw NoRootError("rejected_case_solution: case 4_1 has no root in [0, x3^(1/p)]");
    w = bisect(f, 0.0, s).x;
  }
  double om = w / s;
  if (omega_out) *omega_out = om;
  return pw(w, p);
}

struct PhiCase {
  double phi, phi1, phi2, identity_rhs;
};

inline PhiCase phi_case(CaseId c, double om, const ExponentParams& e) {
  double p = e.p;
  double k = p * (p - 1.0);
  double r = -k * (p - 2.0);
  switch (c) {
    case CaseId::c3_1: {
      if (!(om > 1.0)) throw DomainError("phi_case: case 3_1 needs omega > 1");
      double m = om - 1.0;
      return {pw(m, p - 1.0) * (om + p - 1.0), p * pw(m, p - 2.0) * (om + p - 2.0),
              k * pw(m, p - 3.0) * (om + p - 3.0), r * pw(m, p - 3.0)};
    }
    case CaseId::c4_1: {
      if (!(om > 0.0 && om < 1.0)) throw DomainError("phi_case: case 4_1 needs 0 < omega < 1");
      double m = 1.0 - om;
      return {pw(m, p - 1.0) * (1.0 + (p - 1.0) * om), -k * om * pw(m, p - 2.0),
              -k * pw(m, p - 3.0) * (1.0 - (p - 1.0) * om), r * om * pw(m, p - 3.0)};
    }
    case CaseId::c3_2: {
      if (!(om >= 0.0)) throw DomainError("phi_case: case 3_2 needs omega >= 0");
      double m = om + 1.0;
      return {pw(m, p - 1.0) * (om - p + 1.0), p * pw(m, p - 2.0) * (om - p + 2.0),
              k * pw(m, p - 3.0) * (om - p + 3.0), r * pw(m, p - 3.0)};
    }
    case CaseId::c4_2: {
      if (!(om > 0.0)) throw DomainError("phi_case: case 4_2 needs omega > 0");
      double m = 1.0 + om;
      return {pw(m, p - 1.0) * (1.0 - (p - 1.0) * om), -k * om * pw(m, p - 2.0),
              -k * pw(m, p - 3.0) * (1.0 + (p - 1.0) * om), r * om * pw(m, p - 3.0)};
    }
    case CaseId::c2_vertical:
      break;
  }
  throw DomainError("phi_case: case 2 has no Phi");
}

struct HessianReport {
  double D1 {0.0};
  double D2 {0.0};
  double M33 {0.0};
  std::array<std::array<double, 3>, 3> H {};
  double h {0.0};
};

namespace detail {

template <typename M>
std::array<std::array<double, 3>, 3> fd_hessian(M&& m, const XiPoint& y, double h) {
  std::array<double, 3> y0 {y.y1, y.y2, y.y3};
  auto at = [&](int i, double di, int j, double dj) {
    std::array<double, 3> z = y0;
    z[i] += di;
    z[j] += dj;
    return m(XiPoint{z[0], z[1], z[2]});
  };
  std::array<std::array<double, 3>, 3> H {};
  double m0 = m(y);
  for (int i = 0; i < 3; ++i) {
    H[i][i] = (at(i, h, i, 0.0) - 2.0 * m0 + at(i, -h, i, 0.0)) / (h * h);
    for (int j = i + 1; j < 3; ++j) {
      double v = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4.0 * h * h);
      H[i][j] = H[j][i] = v;
    }
  }
  return H;
}

template <typename M>
HessianReport richardson_report(M&& m, const XiPoint& y, double h) {
  auto H1 = fd_hessian(m, y, h);
  auto H2 = fd_hessian(m, y, 0.5 * h);
  HessianReport r;
  r.h = h;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.H[i][j] = (4.0 * H2[i][j] - H1[i][j]) / 3.0;
  r.M33 = r.H[2][2];
  r.D1 = r.H[0][0] * r.H[2][2] - r.H[0][2] * r.H[0][2];
  r.D2 = r.H[1][1] * r.H[2][2] - r.H[1][2] * r.H[1][2];
  return r;
}

inline double fd_step(const XiPoint& y) {
  return 1e-4 * (1.0 + std::sqrt(y.y1 * y.y1 + y.y2 * y.y2 + y.y3 * y.y3));
}

}  // namespace detail

// Distance of the plane part of x from the lines and cones where the Bellman
// functions fail to be twice differentiable, and the x3 clearance.
inline void require_smooth_neighbourhood(const OmegaPoint& x, const ExponentParams& e, double radius) {
  double a = std::fabs(x.x1), b = std::fabs(x.x2);
  if (a < radius || b < radius) throw StepSizeError("hessian_check: too close to a coordinate plane");
  for (double k : {e.p_star - 1.0, 1.0 / (e.p_star - 1.0)}) {
    if (std::fabs(b - k * a) / std::sqrt(1.0 + k * k) < radius) {
      throw StepSizeError("hessian_check: too close to a branch cone");
    }
  }
  if (x.x3 <= pw(a + radius, e.p)) throw StepSizeError("hessian_check: stencil leaves the domain");
}

// Finite-difference Hessian of M(y) = B(to_omega(y)) with Richardson
// extrapolation over (h, h/2).
inline HessianReport hessian_check(const OmegaPoint& x, const ExponentParams& e, Which which,
                                   double radius_factor = 10.0) {
  XiPoint y = to_xi(x);
  double h = detail::fd_step(y);
  require_smooth_neighbourhood(x, e, radius_factor * h);
  auto m = [&](const XiPoint& z) { return bellman(to_omega(z), e, which).value; };
  return detail::richardson_report(m, y, h);
}

inline HessianReport hessian_check_rejected(const XiPoint& y, const ExponentParams& e, CaseId c,
                                            double radius_factor = 10.0) {
  double h = detail::fd_step(y);
  OmegaPoint x = to_omega(y);
  if (std::fabs(y.y2) < radius_factor * h) throw StepSizeError("hessian_check: too close to y2 = 0");
  if (x.x3 <= pw(std::fabs(x.x1) + radius_factor * h, e.p)) {
    throw StepSizeError("hessian_check: stencil leaves the domain");
  }
  auto m = [&](const XiPoint& z) { return rejected_case_solution(z, e, c); };
  return detail::richardson_report(m, y, h);
}

}  // namespace bmt
