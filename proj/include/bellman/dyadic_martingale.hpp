#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellman_solver.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "root_finding.hpp"
#include "special_functions.hpp"

namespace bmt {

// StepFunction: constant on each dyadic interval of generation depth.
struct StepFunction {
  int depth {0};
  std::vector<double> values {0.0};

  StepFunction() = default;
  StepFunction(int d, std::vector<double> v) : depth(d), values(std::move(v)) {
    if (d < 0 || values.size() != (std::size_t(1) << d)) {
      throw DomainError("StepFunction: value count must be 2^depth");
    }
  }

  std::size_t size() const { return values.size(); }

  double mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / double(values.size());
  }

  double p_mean(double p) const {
    double s = 0.0;
    for (double v : values) s += pw(std::fabs(v), p);
    return s / double(values.size());
  }
};

inline StepFunction constant_function(int depth, double c) {
  return StepFunction(depth, std::vector<double>(std::size_t(1) << depth, c));
}

// Haar coefficients (f, h_I) for the L2-normalized Haar functions, stored in
// breadth-first order: interval j of generation k has index 2^k - 1 + j.
struct HaarAnalysis {
  double mean {0.0};
  std::vector<double> coefficients;
};

inline std::size_t haar_index(int k, std::size_t j) { return (std::size_t(1) << k) - 1 + j; }

inline HaarAnalysis haar_analysis(const StepFunction& f) {
  HaarAnalysis r;
  int n = f.depth;
  r.coefficients.assign(f.size() - 1, 0.0);
  std::vector<double> avg = f.values;
  for (int k = n - 1; k >= 0; --k) {
    std::size_t m = std::size_t(1) << k;
    std::vector<double> up(m);
    double sqrt_len = std::sqrt(std::ldexp(1.0, -k));
    for (std::size_t j = 0; j < m; ++j) {
      double l = avg[2 * j], rr = avg[2 * j + 1];
      r.coefficients[haar_index(k, j)] = 0.5 * sqrt_len * (l - rr);
      up[j] = 0.5 * (l + rr);
    }
    avg.swap(up);
  }
  r.mean = avg[0];
  return r;
}

inline StepFunction haar_synthesis(double mean, const std::vector<double>& coef, int depth) {
  if (coef.size() + 1 != (std::size_t(1) << depth)) throw DomainError("haar_synthesis: coefficient count");
  std::vector<double> avg {mean};
  for (int k = 0; k < depth; ++k) {
    std::size_t m = std::size_t(1) << k;
    std::vector<double> down(2 * m);
    double inv_sqrt_len = 1.0 / std::sqrt(std::ldexp(1.0, -k));
    for (std::size_t j = 0; j < m; ++j) {
      double d = coef[haar_index(k, j)] * inv_sqrt_len;
      down[2 * j] = avg[j] + d;
      down[2 * j + 1] = avg[j] - d;
    }
    avg.swap(down);
  }
  return StepFunction(depth, std::move(avg));
}

struct MartingalePair {
  StepFunction f;
  StepFunction g;
  OmegaPoint point;
};

inline MartingalePair make_pair(StepFunction f, StepFunction g, const ExponentParams& e) {
  if (f.depth != g.depth) throw DomainError("make_pair: depth mismatch");
  OmegaPoint x {f.mean(), g.mean(), f.p_mean(e.p)};
  return {std::move(f), std::move(g), x};
}

// Values i.i.d. uniform on [-1, 1], then shifted to the requested mean.
inline StepFunction random_step_function(int depth, double mean, SplitMix64& rng) {
  std::vector<double> v(std::size_t(1) << depth);
  double s = 0.0;
  for (double& x : v) { x = rng.uniform(-1.0, 1.0); s += x; }
  double shift = mean - s / double(v.size());
  for (double& x : v) x += shift;
  return StepFunction(depth, std::move(v));
}

// g = g_mean + sum eps_I (f, h_I) h_I with one sign draw per coefficient in
// breadth-first order; g_mean defaults to the mean of f.
inline MartingalePair random_transform(const StepFunction& f, std::uint64_t seed, const ExponentParams& e,
                                       std::optional<double> g_mean = std::nullopt) {
  SplitMix64 rng(seed);
  HaarAnalysis a = haar_analysis(f);
  for (double& c : a.coefficients) c *= rng.sign();
  StepFunction g = haar_synthesis(g_mean.value_or(a.mean), a.coefficients, f.depth);
  return make_pair(f, std::move(g), e);
}

struct Admissibility {
  bool ok {true};
  double max_violation {0.0};
};

inline Admissibility admissibility_check(const MartingalePair& pair) {
  if (pair.f.depth != pair.g.depth) throw DomainError("admissibility_check: depth mismatch");
  HaarAnalysis a = haar_analysis(pair.f), b = haar_analysis(pair.g);
  double scale = 1.0;
  for (double v : pair.f.values) scale = std::max(scale, std::fabs(v));
  for (double v : pair.g.values) scale = std::max(scale, std::fabs(v));
  Admissibility r;
  for (std::size_t i = 0; i < a.coefficients.size(); ++i) {
    r.max_violation = std::max(r.max_violation, std::fabs(std::fabs(a.coefficients[i]) - std::fabs(b.coefficients[i])));
  }
  r.ok = r.max_violation <= 1e-12 * scale;
  return r;
}

enum class PropositionKind { psi_standard, roles_swapped, p3_variant };

struct PropositionPairs {
  MartingalePair base;
  MartingalePair perturbed;
  double predicted_difference {0.0};  // change in the p-average the construction targets
};

// The generation-3 functions of the construction, on eighths of [0, 1].
inline std::vector<double> proposition_phi() { return {1, 1, 1, -1, -1, -1, -1, 1}; }
inline std::vector<double> proposition_haar() { return {1, 1, 1, 1, -1, -1, -1, -1}; }
inline std::vector<double> proposition_psi() { return {0, 0, 0, -2, 0, 0, 0, 2}; }
inline std::vector<double> proposition_psi_p3() { return {1, 1, 1, -1, 0, 0, -2, 0}; }

// sign chooses the orientation of the perturbation (p3_variant: -/+ 3a^3/4).
inline PropositionPairs proposition_pair(PropositionKind kind, double x1, double x2, double a,
                                         const ExponentParams& e, int sign = 1) {
  if (!(a > 0.0)) throw DomainError("proposition_pair: a must be > 0");
  double fa = kind == PropositionKind::roles_swapped ? 2.0 * a : a;
  double ga = kind == PropositionKind::roles_swapped ? a : 2.0 * a;
  if (!(x1 > fa) || !(x2 > ga)) throw DomainError("proposition_pair: positivity of the perturbed values fails");
  auto build = [](double base, double amp, const std::vector<double>& shape) {
    std::vector<double> v(shape.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = base + amp * shape[i];
    return StepFunction(3, v);
  };
  auto h = proposition_haar(), phi = proposition_phi(), psi = proposition_psi(), psi3 = proposition_psi_p3();
  double sa = sign >= 0 ? a : -a;
  PropositionPairs r;
  r.base = make_pair(build(x1, a, h), build(x2, a, h), e);
  switch (kind) {
    case PropositionKind::psi_standard:
      r.perturbed = make_pair(build(x1, a, phi), build(x2, a, psi), e);
      r.predicted_difference = pw(x2, e.p) * lambda_p(a / x2, e);
      break;
    case PropositionKind::roles_swapped:
      r.perturbed = make_pair(build(x1, a, psi), build(x2, a, phi), e);
      r.predicted_difference = pw(x1, e.p) * lambda_p(a / x1, e);
      break;
    case PropositionKind::p3_variant:
      r.perturbed = make_pair(build(x1, sa, phi), build(x2, sa, psi3), e);
      r.predicted_difference = -(sign >= 0 ? 1.0 : -1.0) * 0.75 * a * a * a;
      break;
  }
  return r;
}

// Self-similar extremal pair. With roles_exchanged == false (p >= 2) the
// point is (0, m, x3), f carries the +-c pattern and g the d pattern; for
// p < 2 the point is (m, 0, x3) and the roles of f and g are swapped.
struct ExtremalSequence {
  double p {2.0};
  double m {1.0};
  double x3 {1.0};
  double eps {0.0};
  bool roles_exchanged {false};
  double c {0.0};
  double gamma {1.0};
  double d_minus {0.0};
  double d_plus {0.0};
  double c0 {0.0};
  double r {0.0};           // (1 - 2 eps) gamma^p, the per-level mass factor
  long long levels {0};
  double predicted_limit {0.0};
  double achieved {0.0};     // p-average of the transform side of the truncated pair
  double achieved_infinite {0.0};
  double tail_bound {0.0};
  OmegaPoint point;          // averages of the truncated pair

  struct Segment {
    double start, length, f, g;
  };

  // Segments in increasing order of start. At most max_levels levels are
  // emitted, and emission stops early once a length or a p-th power would
  // leave the double range; the inner piece then sits at that level.
  std::vector<Segment> segments(long long max_levels) const {
    long long k_max = std::min(levels, max_levels);
    std::vector<Segment> left, right;
    double len = 1.0, start = 0.0, scale = 1.0;
    double fm = roles_exchanged ? d_minus : -c, fp = roles_exchanged ? d_plus : c;
    double gm = roles_exchanged ? -c : d_minus, gp = roles_exchanged ? c : d_plus;
    double vmax = std::max({std::fabs(c), std::fabs(d_minus), std::fabs(d_plus), m});
    for (long long k = 0; k < k_max; ++k) {
      if (eps * len < 1e-290 || p * std::log(scale * gamma * vmax) > 690.0) break;
      left.push_back({start, eps * len, scale * fm, scale * gm});
      right.push_back({start + (1.0 - eps) * len, eps * len, scale * fp, scale * gp});
      start += eps * len;
      len *= 1.0 - 2.0 * eps;
      scale *= gamma;
    }
    std::vector<Segment> out(left);
    double inner_f = roles_exchanged ? scale * m : 0.0;
    double inner_g = roles_exchanged ? 0.0 : scale * m;
    out.push_back({start, len, inner_f, inner_g});
    out.insert(out.end(), right.rbegin(), right.rend());
    return out;
  }
};

namespace detail {

struct ExtremalConstants {
  double gamma, d_minus, d_plus, r;
};

inline ExtremalConstants extremal_constants(double c, double m, double eps, double p) {
  double gamma = 1.0 + 2.0 * eps * c / ((1.0 - eps) * m);
  return {gamma, gamma * m - c, gamma * m - c * (1.0 + eps) / (1.0 - eps),
          (1.0 - 2.0 * eps) * std::pow(gamma, p)};
}

}  // namespace detail

inline double extremal_c0(double m, double x3, const ExponentParams& e, bool roles_exchanged) {
  double p = e.p;
  auto f = [&](double c) {
    double lhs = roles_exchanged ? pw(m - c, p) : pw(c, p);
    return lhs - (1.0 - p * c / m) * x3;
  };
  return bisect(f, 0.0, m / e.p).x;
}

inline ExtremalSequence extremal_sequence(double m, double x3, double eps, const ExponentParams& e,
                                          long long depth_cap = 100000000LL) {
  if (!(m > 0.0) || !(x3 > 0.0)) throw DomainError("extremal_sequence: need m > 0 and x3 > 0");
  if (!(eps > 0.0 && eps < 0.25)) throw DomainError("extremal_sequence: eps must lie in (0, 1/4)");
  double p = e.p;
  bool exch = p < 2.0;
  if (exch && pw(m, p) >= x3) throw DomainError("extremal_sequence: point must be interior");
  ExtremalSequence s;
  s.p = p;
  s.m = m;
  s.x3 = x3;
  s.eps = eps;
  s.roles_exchanged = exch;
  s.c0 = extremal_c0(m, x3, e, exch);

  // Mass balance for the p-average of the +-c side (or the d side when the
  // roles are exchanged) fixes c.
  auto h = [&](double c) {
    auto k = detail::extremal_constants(c, m, eps, p);
    if (!exch) return 2.0 * eps * pw(c, p) - (1.0 - k.r) * x3;
    return eps * (pw(std::fabs(k.d_minus), p) + pw(std::fabs(k.d_plus), p)) - (1.0 - k.r) * x3;
  };
  const int n_scan = 4000;
  double lo = -1.0, hi = -1.0;
  double prev_c = m * 1e-9, prev_h = h(prev_c);
  for (int i = 1; i <= n_scan; ++i) {
    double ci = m * double(i) / n_scan;
    double hi_val = h(ci);
    if ((prev_h <= 0.0) != (hi_val <= 0.0)) { lo = prev_c; hi = ci; break; }
    prev_c = ci;
    prev_h = hi_val;
  }
  if (lo < 0.0) throw ConvergenceError("extremal_sequence: no admissible c for this eps", n_scan, 0.0);
  s.c = bisect(h, lo, hi).x;
  auto k = detail::extremal_constants(s.c, m, eps, p);
  s.gamma = k.gamma;
  s.d_minus = k.d_minus;
  s.d_plus = k.d_plus;
  s.r = k.r;
  if (!(s.r < 1.0)) throw ConvergenceError("extremal_sequence: mass factor is not below 1", 0, s.r);

  double need = std::ceil(40.0 * std::log(2.0) / -std::log(s.r));
  s.levels = std::min<long long>(depth_cap, static_cast<long long>(need));
  double rK = std::exp(double(s.levels) * std::log(s.r));

  double dpat = eps * (pw(std::fabs(s.d_minus), p) + pw(std::fabs(s.d_plus), p));
  double cpat = 2.0 * eps * pw(s.c, p);
  double transform_step = exch ? cpat : dpat;
  double source_step = exch ? dpat : cpat;
  double geom = (1.0 - rK) / (1.0 - s.r);
  double inner = rK * pw(m, p);  // the inner constant m gamma^K on a piece of length (1-2eps)^K
  s.achieved_infinite = transform_step / (1.0 - s.r);
  s.achieved = transform_step * geom + (exch ? 0.0 : inner);
  double source_avg = source_step * geom + (exch ? inner : 0.0);
  s.tail_bound = rK * std::max(s.achieved_infinite, pw(m, p));
  s.point = exch ? OmegaPoint{m, 0.0, source_avg} : OmegaPoint{0.0, m, source_avg};
  s.predicted_limit = exch ? x3 * pw(s.c0, p) / pw(m - s.c0, p) : x3 * pw(m - s.c0, p) / pw(s.c0, p);
  return s;
}

// Checks |delta avg f| = |delta avg g| on both splits of every level of the
// truncated extremal pair; averages are propagated from the innermost level in
// units of gamma^k. Returns the largest relative violation.
inline double extremal_admissibility(const ExtremalSequence& s) {
  double eps = s.eps;
  double fm = s.roles_exchanged ? s.d_minus : -s.c, fp = s.roles_exchanged ? s.d_plus : s.c;
  double gm = s.roles_exchanged ? -s.c : s.d_minus, gp = s.roles_exchanged ? s.c : s.d_plus;
  double af = s.roles_exchanged ? s.m : 0.0, ag = s.roles_exchanged ? 0.0 : s.m;
  double worst = 0.0;
  double scale = std::max({std::fabs(s.c), std::fabs(s.d_minus), std::fabs(s.d_plus), s.m});
  for (long long k = s.levels - 1; k >= 0; --k) {
    // middle piece averages in level-k units
    double mf = s.gamma * af, mg = s.gamma * ag;
    // split at eps inside [0, 1 - eps]
    double v2 = std::fabs(std::fabs(mf - fm) - std::fabs(mg - gm));
    double lf = (eps * fm + (1.0 - 2.0 * eps) * mf) / (1.0 - eps);
    double lg = (eps * gm + (1.0 - 2.0 * eps) * mg) / (1.0 - eps);
    double v1 = std::fabs(std::fabs(fp - lf) - std::fabs(gp - lg));
    worst = std::max({worst, v1 / scale, v2 / scale});
    af = eps * (fm + fp) + (1.0 - 2.0 * eps) * mf;
    ag = eps * (gm + gp) + (1.0 - 2.0 * eps) * mg;
  }
  return worst;
}

}  // namespace bmt
