#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bellman_solver.hpp"
#include "dyadic_martingale.hpp"
#include "majorant_oracle.hpp"
#include "rng.hpp"
#include "special_functions.hpp"
#include "trajectories.hpp"

namespace bmt {

// worst is the largest violation divided by its tolerance; a suite passes
// when no check exceeds 1.
struct SuiteResult {
  std::string name;
  long checks {0};
  long failures {0};
  double worst {0.0};
  bool passed() const { return failures == 0; }
};

namespace detail {

struct Tally {
  SuiteResult r;
  explicit Tally(std::string name) { r.name = std::move(name); }
  // Records violation <= tol.
  void check(double violation, double tol) {
    ++r.checks;
    double ratio = violation / tol;
    if (!(ratio <= 1.0)) ++r.failures;
    if (std::isnan(ratio)) ratio = HUGE_VAL;
    r.worst = std::max(r.worst, ratio);
  }
};

inline OmegaPoint random_omega_point(SplitMix64& rng, double p) {
  double x1 = rng.uniform(-2.0, 2.0), x2 = rng.uniform(-2.0, 2.0);
  return {x1, x2, pw(std::fabs(x1), p) + 4.0 * rng.uniform() * rng.uniform()};
}

}  // namespace detail

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names {"special-functions", "solver-residual", "zigzag",
                                               "simulation", "envelope", "hessian"};
  return names;
}

inline SuiteResult verify_special_functions(const ExponentParams& e, std::uint64_t seed) {
  detail::Tally t("special-functions");
  SplitMix64 rng(seed);
  double p = e.p, q = e.p_star - 1.0;
  for (int k = 0; k < 5000; ++k) {
    PlanePoint x {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    double hm = h_max(x, e), ph = phi_max(x, e), up = u_p(x, e);
    double sc = std::max(1.0, pw(std::fabs(x.x1), p) * e.beta + pw(std::fabs(x.x2), p));
    t.check(hm - ph, 1e-12 * sc);
    t.check(ph - up, 1e-12 * sc);
    // phi_max = u_p on the K-branch of F(|x2|, |x1|)
    if (!f_power_branch(std::fabs(x.x2), std::fabs(x.x1), e)) t.check(std::fabs(ph - up), 1e-12 * sc);
    // homogeneity of degree p
    double s = 0.5 + 2.0 * rng.uniform();
    PlanePoint y {s * x.x1, s * x.x2};
    t.check(std::fabs(phi_max(y, e) - pw(s, p) * ph), 1e-11 * pw(s, p) * sc);
    // partials against central differences, away from the cone
    double z1 = 0.2 + 2.0 * rng.uniform(), z2 = 0.2 + 2.0 * rng.uniform();
    if (std::fabs(z1 - q * z2) > 0.05 * z2 && std::fabs(z1 - z2 / q) > 0.05 * z2) {
      auto d = f_p_partials(z1, z2, e);
      double h = 1e-6;
      double d1 = (f_p(z1 + h, z2, e) - f_p(z1 - h, z2, e)) / (2 * h);
      double d2 = (f_p(z1, z2 + h, e) - f_p(z1, z2 - h, e)) / (2 * h);
      double dsc = std::max(1.0, std::fabs(d.first) + std::fabs(d.second));
      t.check(std::fabs(d1 - d.first), 1e-6 * dsc);
      t.check(std::fabs(d2 - d.second), 1e-6 * dsc);
    }
  }
  return t.r;
}

inline SuiteResult verify_solver_residual(const ExponentParams& e, std::uint64_t seed) {
  detail::Tally t("solver-residual");
  SplitMix64 rng(seed);
  for (int k = 0; k < 20000; ++k) {
    OmegaPoint x = detail::random_omega_point(rng, e.p);
    for (Which w : {Which::max, Which::min}) {
      double sc = 1.0;
      auto b = bellman(x, e, w);
      double res = equation_residual(x, b.value, e, w, &sc);
      t.check(std::fabs(res), 1e-11 * sc);
      if (e.p == 2.0) {
        double cf = x.x2 * x.x2 + x.x3 - x.x1 * x.x1;
        t.check(std::fabs(b.value - cf), 1e-12 * std::max(1.0, std::fabs(cf)));
      }
    }
    double hi = bellman_max(x, e).value, lo = bellman_min(x, e).value;
    t.check(lo - hi, 1e-12 * std::max(1.0, hi));
  }
  return t.r;
}

inline SuiteResult verify_zigzag(const ExponentParams& e, std::uint64_t seed) {
  detail::Tally t("zigzag");
  SplitMix64 rng(seed);
  double p = e.p;
  for (int k = 0; k < 10000; ++k) {
    double a1 = rng.uniform(-2, 2), a2 = rng.uniform(-2, 2);
    double d = rng.uniform(-1.5, 1.5), sg = rng.sign();
    OmegaPoint xm {a1, a2, pw(std::fabs(a1), p) + 3.0 * rng.uniform()};
    OmegaPoint xp {a1 + d, a2 + sg * d, 0.0};
    xp.x3 = pw(std::fabs(xp.x1), p) + 3.0 * rng.uniform();
    OmegaPoint x {0.5 * (xm.x1 + xp.x1), 0.5 * (xm.x2 + xp.x2), 0.5 * (xm.x3 + xp.x3)};
    double bm = bellman_max(xm, e).value, bp = bellman_max(xp, e).value;
    double sc = std::max({1.0, bm, bp});
    t.check(0.5 * (bm + bp) - bellman_max(x, e).value, 1e-9 * sc);
    double cm = bellman_min(xm, e).value, cp = bellman_min(xp, e).value;
    t.check(bellman_min(x, e).value - 0.5 * (cm + cp), 1e-9 * sc);
  }
  return t.r;
}

inline SuiteResult verify_simulation(const ExponentParams& e, std::uint64_t seed, int pairs = 2000) {
  detail::Tally t("simulation");
  SplitMix64 rng(seed);
  for (int k = 0; k < pairs; ++k) {
    int depth = 4 + int(rng.next() % 9);
    auto f = random_step_function(depth, rng.uniform(-1.0, 1.0), rng);
    auto pair = random_transform(f, rng.next(), e, rng.uniform(-1.0, 1.0));
    auto adm = admissibility_check(pair);
    t.check(adm.ok ? 0.0 : 1.0, 0.5);
    double gp = pair.g.p_mean(e.p);
    double hi = bellman_max(pair.point, e).value, lo = bellman_min(pair.point, e).value;
    double sc = std::max(1.0, hi);
    t.check(gp - hi, 1e-9 * sc);
    t.check(lo - gp, 1e-9 * sc);
  }
  return t.r;
}

inline SuiteResult verify_envelope(const ExponentParams& e, double L = 4.0, int n = 129) {
  detail::Tally t("envelope");
  for (double sign : {1.0, -1.0}) {
    Sampler h = sign > 0 ? Sampler([e](PlanePoint x) { return h_max(x, e); })
                         : Sampler([e](PlanePoint x) { return h_min(x, e); });
    Sampler bs = boundary_sampler(BoundaryMode::pin_closed_form, e, sign);
    EnvelopeResult r = sign > 0 ? least_zigzag_majorant(h, L, n, bs) : greatest_zigzag_minorant(h, L, n, bs);
    double err = 0.0, sc = 0.0, fsc = 1.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        PlanePoint x {r.field.coord(i), r.field.coord(j)};
        fsc = std::max(fsc, std::fabs(r.field.at(i, j)));
        t.check(sign * (h(x) - r.field.at(i, j)), 1e-12 * std::max(1.0, std::fabs(h(x))));
        if (std::max(std::fabs(x.x1), std::fabs(x.x2)) > L / 4.0) continue;
        double ref = sign > 0 ? phi_max(x, e) : phi_min(x, e);
        err = std::max(err, std::fabs(r.field.at(i, j) - ref));
        sc = std::max(sc, std::fabs(ref));
      }
    }
    t.check(err, 0.02 * std::max(sc, 1e-300));
    // the sweeps stop at a nodal change of 1e-10 scale
    t.check(zigzag_defect(r.field, sign), 1e-9 * fsc);
  }
  return t.r;
}

// Implicit-branch points of B_max in the sector x1, x2 >= 0, kept a margin
// away from the linear branch where M_33 vanishes.
inline SuiteResult verify_hessian(const ExponentParams& e, std::uint64_t seed, int points = 300) {
  detail::Tally t("hessian");
  SplitMix64 rng(seed);
  double p = e.p;
  int got = 0;
  for (int tries = 0; got < points && tries < 100 * points; ++tries) {
    // x2 / x1 on the implicit side of the cone |x2| = (p* - 1)|x1|
    double q = e.p_star - 1.0;
    double s = p >= 2.0 ? 1.0 + 3.0 * rng.uniform() : rng.uniform();
    double x1 = 0.05 + 1.5 * rng.uniform(), x2 = q * s * x1;
    OmegaPoint x {x1, x2, pw(x1, p) + 0.05 + 4.0 * rng.uniform()};
    HessianReport r;
    try {
      r = hessian_check(x, e, Which::max);
    } catch (const StepSizeError&) {
      continue;
    }
    auto b = bellman_max(x, e);
    if (p == 2.0) {
      // M = 4 y1 y2 + y3: both blocks vanish identically
      t.check(std::max({std::fabs(r.D1), std::fabs(r.D2), std::fabs(r.M33)}), 1e-5);
      ++got;
      continue;
    }
    if (b.sector != Sector::implicit_branch) continue;
    if (std::fabs(b.omega - (e.p_star - 1.0)) < 0.05 * (e.p_star - 1.0)) continue;
    ++got;
    double s2 = std::fabs(r.H[1][1] * r.H[2][2]) + r.H[1][2] * r.H[1][2];
    double s1 = std::fabs(r.H[0][0] * r.H[2][2]) + r.H[0][2] * r.H[0][2];
    t.check(std::fabs(r.D2), 1e-3 * s2);
    t.check(-r.D1, 1e-3 * s1);
    t.check(r.M33 < 0.0 ? 0.0 : 1.0, 0.5);
  }
  t.check(got < points ? 1.0 : 0.0, 0.5);
  return t.r;
}

inline SuiteResult run_suite(const std::string& name, const ExponentParams& e, std::uint64_t seed) {
  if (name == "special-functions") return verify_special_functions(e, seed);
  if (name == "solver-residual") return verify_solver_residual(e, seed);
  if (name == "zigzag") return verify_zigzag(e, seed);
  if (name == "simulation") return verify_simulation(e, seed);
  if (name == "envelope") return verify_envelope(e);
  if (name == "hessian") return verify_hessian(e, seed);
  throw DomainError("unknown suite: " + name);
}

}  // namespace bmt
