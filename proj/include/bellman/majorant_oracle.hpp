#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "special_functions.hpp"

namespace bmt {

// GridField: n x n samples on [-L, L]^2, values[i * n + j] at (x1_i, x2_j).
struct GridField {
  double box_half_width {1.0};
  int n {33};
  std::vector<double> values;

  GridField() = default;
  GridField(double L, int n_) : box_half_width(L), n(n_), values(std::size_t(n_) * n_, 0.0) {
    if (!(L > 0.0)) throw DomainError("GridField: L must be > 0");
    if (n_ < 33 || n_ % 2 == 0) throw DomainError("GridField: n must be odd and >= 33");
  }

  double coord(int i) const { return -box_half_width + 2.0 * box_half_width * double(i) / double(n - 1); }
  double& at(int i, int j) { return values[std::size_t(i) * n + j]; }
  double at(int i, int j) const { return values[std::size_t(i) * n + j]; }
  int index_of(double x) const {
    return int(std::lround((x + box_half_width) * double(n - 1) / (2.0 * box_half_width)));
  }
};

using Sampler = std::function<double(PlanePoint)>;

inline GridField sample(const Sampler& h, double L, int n) {
  GridField g(L, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.at(i, j) = h({g.coord(i), g.coord(j)});
  return g;
}

enum class Direction { plus, minus };

namespace detail {

// Upper hull of equally spaced samples (monotone chain), written back as the
// piecewise-linear interpolant. hx/hy are scratch buffers of size >= m.
inline void upper_hull_line(const double* v, double* out, int m, int* hx, double* hy) {
  int k = 0;
  for (int i = 0; i < m; ++i) {
    while (k >= 2) {
      double x0 = hx[k - 2], y0 = hy[k - 2], x1 = hx[k - 1], y1 = hy[k - 1];
      if ((y1 - y0) * (i - x0) <= (v[i] - y0) * (x1 - x0)) --k;
      else break;
    }
    hx[k] = i;
    hy[k] = v[i];
    ++k;
  }
  int s = 0;
  for (int i = 0; i < m; ++i) {
    while (s + 1 < k && hx[s + 1] <= i) ++s;
    if (hx[s] == i) out[i] = hy[s];
    else {
      double t = double(i - hx[s]) / double(hx[s + 1] - hx[s]);
      out[i] = hy[s] + t * (hy[s + 1] - hy[s]);
    }
  }
}

// One pass over every diagonal line; sign = -1 turns upper hulls into lower
// hulls. Returns the largest nodal change.
inline double sweep(GridField& g, Direction dir, double sign) {
  int n = g.n;
  std::vector<double> buf(n), out(n), hy(n);
  std::vector<int> hx(n);
  double maxch = 0.0;
  for (int k = -(n - 1); k <= n - 1; ++k) {
    int cnt = 0;
    int i0 = std::max(0, -k);
    int i1 = std::min(n - 1, n - 1 - k);
    if (dir == Direction::minus) {
      // i + j = k + n - 1
      i0 = std::max(0, k);
      i1 = std::min(n - 1, k + n - 1);
    }
    for (int i = i0; i <= i1; ++i) {
      int j = dir == Direction::plus ? i + k : (k + n - 1) - i;
      buf[cnt++] = sign * g.at(i, j);
    }
    upper_hull_line(buf.data(), out.data(), cnt, hx.data(), hy.data());
    int c = 0;
    for (int i = i0; i <= i1; ++i) {
      int j = dir == Direction::plus ? i + k : (k + n - 1) - i;
      double nv = sign * out[c++];
      maxch = std::max(maxch, std::fabs(nv - g.at(i, j)));
      g.at(i, j) = nv;
    }
  }
  return maxch;
}

}  // namespace detail

inline GridField diagonal_concavify(GridField field, Direction dir) {
  detail::sweep(field, dir, 1.0);
  return field;
}

inline GridField diagonal_convexify(GridField field, Direction dir) {
  detail::sweep(field, dir, -1.0);
  return field;
}

enum class BoundaryMode { pin_u_p, pin_closed_form, pin_h };

inline const char* to_string(BoundaryMode m) {
  switch (m) {
    case BoundaryMode::pin_u_p: return "pin_u_p";
    case BoundaryMode::pin_closed_form: return "pin_closed_form";
    case BoundaryMode::pin_h: return "pin_h";
  }
  return "?";
}

struct EnvelopeOptions {
  int max_sweeps {100000};
  double tol {1e-10};
};

struct EnvelopeResult {
  GridField field;
  int sweeps {0};
  double residual {0.0};
};

namespace detail {

inline EnvelopeResult envelope(const Sampler& h, double L, int n, const Sampler* boundary,
                               const EnvelopeOptions& opt, double sign) {
  GridField g = sample(h, L, n);
  if (boundary) {
    for (int t = 0; t < n; ++t) {
      for (auto [i, j] : {std::pair{0, t}, std::pair{n - 1, t}, std::pair{t, 0}, std::pair{t, n - 1}}) {
        g.at(i, j) = (*boundary)({g.coord(i), g.coord(j)});
      }
    }
  }
  double scale = 1.0;
  for (double v : g.values) scale = std::max(scale, std::fabs(v));
  EnvelopeResult r;
  for (int s = 1; s <= opt.max_sweeps; ++s) {
    double a = sweep(g, Direction::plus, sign);
    double b = sweep(g, Direction::minus, sign);
    r.residual = std::max(a, b);
    r.sweeps = s;
    if (r.residual < opt.tol * scale) {
      r.field = std::move(g);
      return r;
    }
  }
  throw ConvergenceError("envelope: no fixed point within max_sweeps", r.sweeps, r.residual);
}

}  // namespace detail

// Boundary pins for the majorant of h_max (sign = +1) or the minorant of
// h_min (sign = -1). pin_h returns an empty sampler: the hull keeps line
// endpoints, so the box boundary stays at h.
inline Sampler boundary_sampler(BoundaryMode mode, const ExponentParams& e, double sign) {
  switch (mode) {
    case BoundaryMode::pin_closed_form:
      if (sign > 0) return [e](PlanePoint x) { return phi_max(x, e); };
      return [e](PlanePoint x) { return phi_min(x, e); };
    case BoundaryMode::pin_u_p:
      if (sign > 0) return [e](PlanePoint x) { return u_p(x, e); };
      return [e](PlanePoint x) { return -u_p({x.x2, x.x1}, e) / e.beta; };
    case BoundaryMode::pin_h:
      break;
  }
  return {};
}

inline EnvelopeResult least_zigzag_majorant(const Sampler& h, double L, int n, const Sampler& boundary,
                                            const EnvelopeOptions& opt = {}) {
  return detail::envelope(h, L, n, boundary ? &boundary : nullptr, opt, 1.0);
}

inline EnvelopeResult greatest_zigzag_minorant(const Sampler& h, double L, int n, const Sampler& boundary,
                                               const EnvelopeOptions& opt = {}) {
  return detail::envelope(h, L, n, boundary ? &boundary : nullptr, opt, -1.0);
}

// Largest violation of discrete concavity (sign = +1) or convexity (sign = -1)
// along both diagonal families, measured on consecutive triples.
inline double zigzag_defect(const GridField& g, double sign) {
  double worst = 0.0;
  int n = g.n;
  for (int i = 1; i + 1 < n; ++i) {
    for (int j = 1; j + 1 < n; ++j) {
      double c = 2.0 * g.at(i, j);
      double dp = sign * (g.at(i - 1, j - 1) + g.at(i + 1, j + 1) - c);
      double dm = sign * (g.at(i - 1, j + 1) + g.at(i + 1, j - 1) - c);
      worst = std::max({worst, dp, dm});
    }
  }
  return worst;
}

struct LadderBox {
  double L;
  int n;
};

inline std::vector<LadderBox> default_ladder() { return {{32.0, 513}, {64.0, 1025}}; }

inline PlanePoint default_test_point(const ExponentParams& e) {
  return e.p >= 2.0 ? PlanePoint{0.0, 1.0} : PlanePoint{1.0, 1.0};
}

struct CriticalProbe {
  double c {0.0};
  std::vector<double> values;  // envelope at the test point, one per ladder box
  double growth {0.0};         // relative growth between the two largest boxes
  bool subcritical {false};
};

struct CriticalResult {
  double c_star {0.0};
  double lo {0.0};
  double hi {0.0};
  std::vector<CriticalProbe> probes;
};

inline CriticalProbe critical_probe(const ExponentParams& e, double c, const std::vector<LadderBox>& ladder,
                                    PlanePoint test_point, double threshold = 0.01,
                                    const EnvelopeOptions& opt = {}) {
  if (ladder.size() < 2) throw DomainError("critical_constant: ladder needs at least two boxes");
  for (std::size_t k = 1; k < ladder.size(); ++k) {
    if (ladder[k].L < 2.0 * ladder[k - 1].L) throw DomainError("critical_constant: ladder ratio must be >= 2");
  }
  Sampler h = [e, c](PlanePoint x) { return h_c(x, c, e); };
  CriticalProbe pr;
  pr.c = c;
  std::vector<std::future<double>> jobs;
  for (const LadderBox& b : ladder) {
    jobs.push_back(std::async(std::launch::async, [&h, b, test_point, opt]() {
      EnvelopeResult r = least_zigzag_majorant(h, b.L, b.n, Sampler {}, opt);
      int i = r.field.index_of(test_point.x1), j = r.field.index_of(test_point.x2);
      if (i < 0 || j < 0 || i >= b.n || j >= b.n) throw DomainError("critical_constant: test point outside a box");
      return r.field.at(i, j);
    }));
  }
  for (auto& j : jobs) pr.values.push_back(j.get());
  double a = pr.values[pr.values.size() - 2], b = pr.values.back();
  pr.growth = (b - a) / std::max(std::fabs(a), 1e-300);
  pr.subcritical = pr.growth > threshold;
  return pr;
}

// Bisection on c between a subcritical lo and a supercritical hi.
inline CriticalResult critical_constant(const ExponentParams& e, const std::vector<LadderBox>& ladder,
                                        PlanePoint test_point, double tol_c, double c_lo, double c_hi,
                                        const EnvelopeOptions& opt = {}) {
  if (!(c_lo > 0.0) || !(c_hi > c_lo) || !(tol_c > 0.0)) throw DomainError("critical_constant: bad bracket");
  CriticalResult r;
  CriticalProbe plo = critical_probe(e, c_lo, ladder, test_point, 0.01, opt);
  CriticalProbe phi = critical_probe(e, c_hi, ladder, test_point, 0.01, opt);
  r.probes = {plo, phi};
  if (!plo.subcritical || phi.subcritical) {
    throw ClassificationError("critical_constant: bracket ends do not straddle the growth threshold");
  }
  double lo = c_lo, hi = c_hi;
  while (hi - lo > tol_c) {
    double mid = 0.5 * (lo + hi);
    CriticalProbe pm = critical_probe(e, mid, ladder, test_point, 0.01, opt);
    r.probes.push_back(pm);
    if (pm.subcritical) lo = mid; else hi = mid;
  }
  r.lo = lo;
  r.hi = hi;
  r.c_star = 0.5 * (lo + hi);
  return r;
}

}  // namespace bmt
