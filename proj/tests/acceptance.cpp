// Acceptance suite: one PASS/FAIL line per criterion. A criterion passes when
// its measured quantity is within tolerance and it ran within its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "bellman/bellman.hpp"
#include "oracles.hpp"

using namespace bmt;

namespace {

struct Outcome {
  bool ok {true};
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = dt < budget_s;
  bool pass = o.ok && in_time;
  if (!pass) ++failures;
  std::printf("AC%-2d %s  %s: %s  [%.2f s, budget %.0f s%s]\n", id, pass ? "PASS" : "FAIL", title, o.detail.c_str(), dt,
              budget_s, in_time ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

using ld = long double;

// Lambda_p written out directly.
ld lambda_ref(ld a, ld p) {
  return (std::pow(1 + 2 * a, p) + std::pow(1 - 2 * a, p)) / 8 + 0.75L - (std::pow(1 + a, p) + std::pow(1 - a, p)) / 2;
}

ld u_ref(ld x1, ld x2, ld p) {
  ld ps = oracle::pstar(p);
  ld K = p * std::pow(1 - 1 / ps, p - 1);
  ld a = std::fabs(x1), b = std::fabs(x2);
  return K * (b - (ps - 1) * a) * std::pow(a + b, p - 1);
}

Outcome ac1() {
  auto e = exponent_params(2.0);
  SplitMix64 rng(1001);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    OmegaPoint x = oracle::random_point(rng, 2.0, 3.0, 6.0);
    ld ref = (ld)x.x2 * x.x2 + x.x3 - (ld)x.x1 * x.x1;
    for (double v : {bellman_max(x, e).value, bellman_min(x, e).value}) {
      worst = std::max(worst, double(std::fabs(v - ref) / std::max<ld>(1, std::fabs(ref))));
    }
  }
  return {worst <= 1e-12, fmt("1e5 points, max rel err %.2e (tol 1e-12)", worst)};
}

Outcome ac2() {
  SplitMix64 rng(1002);
  double worst = 0.0;
  for (double p : {2.5, 3.0, 4.0, 8.0}) {
    auto e = exponent_params(p);
    ld C = std::pow((ld)p - 1, (ld)p), Cmin = std::pow(1 / ((ld)p - 1), (ld)p);
    for (int k = 0; k < 10000; ++k) {
      // max: |x2| <= (p-1)|x1|
      double x1 = rng.uniform(-2, 2), x2 = (p - 1) * std::fabs(x1) * rng.uniform(-1, 1);
      double x3 = std::pow(std::fabs(x1), p) * (1.0 + 3.0 * rng.uniform()) + rng.uniform();
      ld ref = std::pow(std::fabs((ld)x2), (ld)p) + C * (x3 - std::pow(std::fabs((ld)x1), (ld)p));
      double v = bellman_max({x1, x2, x3}, e).value;
      worst = std::max(worst, double(std::fabs(v - ref) / std::max<ld>(1, ref)));
      // min: |x1| <= (p-1)|x2|
      double y2 = rng.uniform(-2, 2), y1 = (p - 1) * std::fabs(y2) * rng.uniform(-1, 1);
      double y3 = std::pow(std::fabs(y1), p) * (1.0 + 3.0 * rng.uniform()) + rng.uniform();
      ld rmin = std::pow(std::fabs((ld)y2), (ld)p) + Cmin * (y3 - std::pow(std::fabs((ld)y1), (ld)p));
      double w = bellman_min({y1, y2, y3}, e).value;
      worst = std::max(worst, double(std::fabs(w - rmin) / std::max<ld>(1, rmin)));
    }
  }
  return {worst <= 1e-10, fmt("p in {2.5,3,4,8}, 1e4 points each, max and min, max rel err %.2e (tol 1e-10)", worst)};
}

// Residual of the defining equation in long double, normalized so the largest
// of |x1|, |x2|, x3^(1/p) is 1, against the branch term magnitudes.
double residual_ratio(const OmegaPoint& x, double B, double p, bool max) {
  ld tau = std::max({(ld)std::fabs(x.x1), (ld)std::fabs(x.x2), std::pow((ld)x.x3, 1 / (ld)p)});
  ld a = std::fabs(x.x1) / tau, b = std::fabs(x.x2) / tau, s = std::pow((ld)x.x3, 1 / (ld)p) / tau;
  ld w = std::pow((ld)B, 1 / (ld)p) / tau;
  ld be = oracle::beta(p);
  auto mag = [&](ld z1, ld z2) { return std::pow(z1, (ld)p) + be * std::pow(z2, (ld)p); };
  ld r, sc;
  if (max) {
    r = oracle::F(w, s, p) - oracle::F(b, a, p);
    sc = std::max({(ld)1, mag(w, s), mag(b, a)});
  } else {
    r = oracle::F(s, w, p) - oracle::F(a, b, p);
    sc = std::max({(ld)1, mag(s, w), mag(a, b)});
  }
  return double(std::fabs(r) / sc);
}

Outcome ac3() {
  SplitMix64 rng(1003);
  double worst = 0.0;
  const std::vector<double> ps {1.2, 1.5, 2.5, 3.0, 4.0, 8.0};
  for (int k = 0; k < 100000; ++k) {
    double p = ps[std::size_t(k) % ps.size()];
    auto e = exponent_params(p);
    OmegaPoint x = oracle::random_point(rng, p, 2.0, 4.0);
    worst = std::max(worst, residual_ratio(x, bellman_max(x, e).value, p, true));
    worst = std::max(worst, residual_ratio(x, bellman_min(x, e).value, p, false));
  }
  return {worst <= 1e-11, fmt("1e5 points over p in {1.2,1.5,2.5,3,4,8}, max residual/scale %.2e (tol 1e-11)", worst)};
}

Outcome ac4() {
  bool ok = true;
  std::string d;
  for (double p : {4.0 / 3.0, 3.0}) {
    auto e = exponent_params(p);
    double target = (double)std::pow(oracle::pstar(p) - 1, (ld)p);
    double hi = sharp_constant_scan(e, Which::max, 200);
    double lo = sharp_constant_scan(e, Which::min, 200, ScanRegion::standard);
    double lo_opp = sharp_constant_scan(e, Which::min, 200, ScanRegion::opposite);
    double r1 = std::fabs(hi - target) / target, r2 = std::fabs(lo - 1 / target) * target;
    ok = ok && r1 <= 5e-3 && r2 <= 5e-3;
    char buf[256];
    std::snprintf(buf, sizeof buf, "p=%.4g: sup %.6g vs %.6g (rel %.1e), inf %.6g vs %.6g (rel %.1e; |x2|<=|x1| inf %.3g); ",
                  p, hi, target, r1, lo, 1 / target, r2, lo_opp);
    d += buf;
  }
  d += "tol 0.5%";
  return {ok, d};
}

Outcome ac5() {
  SplitMix64 rng(1005);
  long violations = 0;
  double worst = HUGE_VAL;
  for (double p : {1.5, 3.0}) {
    auto e = exponent_params(p);
    for (int k = 0; k < 100000; ++k) {
      double a1 = rng.uniform(-2, 2), a2 = rng.uniform(-2, 2);
      double d = rng.uniform(-1.5, 1.5), sg = rng.sign();
      OmegaPoint xm {a1, a2, std::pow(std::fabs(a1), p) + 3.0 * rng.uniform()};
      OmegaPoint xp {a1 + d, a2 + sg * d, 0.0};
      xp.x3 = std::pow(std::fabs(xp.x1), p) + 3.0 * rng.uniform();
      OmegaPoint x {0.5 * (xm.x1 + xp.x1), 0.5 * (xm.x2 + xp.x2), 0.5 * (xm.x3 + xp.x3)};
      double bm = bellman_max(xm, e).value, bp = bellman_max(xp, e).value, b = bellman_max(x, e).value;
      double cm = bellman_min(xm, e).value, cp = bellman_min(xp, e).value, c = bellman_min(x, e).value;
      double sc = std::max({1.0, bm, bp});
      double s1 = (b - 0.5 * (bm + bp)) / sc, s2 = (0.5 * (cm + cp) - c) / sc;
      worst = std::min({worst, s1, s2});
      if (s1 < -1e-9) ++violations;
      if (s2 < -1e-9) ++violations;
    }
  }
  return {violations == 0, fmt("1e5 triples for p in {1.5,3}, %.0f violations, min slack/scale %.2e (tol -1e-9)",
                               double(violations), worst)};
}

Outcome ac6() {
  SplitMix64 rng(1006);
  long violations = 0, inadmissible = 0;
  double worst = -HUGE_VAL;
  for (double p : {1.5, 2.5, 3.0, 4.0}) {
    auto e = exponent_params(p);
    for (int k = 0; k < 10000; ++k) {
      int depth = 4 + int(rng.next() % 9);
      auto f = random_step_function(depth, rng.uniform(-1, 1), rng);
      auto pair = random_transform(f, rng.next(), e, rng.uniform(-1, 1));
      if (!admissibility_check(pair).ok) ++inadmissible;
      double gp = pair.g.p_mean(p);
      double hi = bellman_max(pair.point, e).value, lo = bellman_min(pair.point, e).value;
      double sc = std::max(1.0, hi);
      worst = std::max({worst, (gp - hi) / sc, (lo - gp) / sc});
      if (gp > hi + 1e-9 * sc || gp < lo - 1e-9 * sc) ++violations;
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "1e4 pairs per p in {1.5,2.5,3,4}, depths 4-12: %ld bound violations, %ld inadmissible, "
                "max excess/scale %.2e (tol 1e-9)", violations, inadmissible, worst);
  return {violations == 0 && inadmissible == 0, buf};
}

Outcome ac7() {
  auto e = exponent_params(3.0);
  ld ref = oracle::bmax(0, 1, 1, 3);
  // c0 solves c^3 = 1 - 3c
  ld c0 = oracle::bisect([](ld c) { return c * c * c - (1 - 3 * c); }, 0, 1.0L / 3);
  ld limit_ref = std::pow((1 - c0) / c0, (ld)3);
  double bm = bellman_max({0, 1, 1}, e).value;
  bool ok = std::fabs(bm - ref) <= 1e-9 * ref && std::fabs(limit_ref - ref) <= 1e-9 * ref;
  double prev = HUGE_VAL, last = 0.0, limit = 0.0;
  bool monotone = true;
  for (double eps : {0.1, 0.03, 0.01, 0.003, 0.001}) {
    auto s = extremal_sequence(1.0, 1.0, eps, e);
    limit = s.predicted_limit;
    ok = ok && std::fabs(s.predicted_limit - bm) <= 1e-9 * bm && extremal_admissibility(s) <= 1e-12;
    double err = std::fabs(s.achieved - bm) / bm;
    monotone = monotone && err < prev;
    prev = err;
    last = err;
  }
  ok = ok && monotone && last <= 0.01;
  char buf[256];
  std::snprintf(buf, sizeof buf, "limit %.12g vs B_max %.12g; rel gap at eps=1e-3 %.2e (tol 1e-2), decreasing along eps: %s",
                limit, bm, last, monotone ? "yes" : "no");
  return {ok, buf};
}

Outcome ac8() {
  double worst = 0.0;
  for (double p : {1.5, 2.5, 3.5, 4.0}) {
    auto e = exponent_params(p);
    for (double ratio : {0.01, 0.05, 0.1}) {
      double x2 = 1.0, a = ratio * x2;
      auto r = proposition_pair(PropositionKind::psi_standard, 1.0, x2, a, e);
      double diff = r.perturbed.g.p_mean(p) - r.base.g.p_mean(p);
      double ref = double(std::pow((ld)x2, (ld)p) * lambda_ref(ratio, p));
      worst = std::max(worst, std::fabs(diff - ref));
    }
  }
  double l3 = 0.0;
  auto e3 = exponent_params(3.0);
  for (int k = 0; k < 100; ++k) l3 = std::max(l3, std::fabs(lambda_p(0.4999 * k / 99.0, e3)));
  double v3 = 0.0;
  for (int sign : {1, -1}) {
    auto r = proposition_pair(PropositionKind::p3_variant, 1.0, 1.0, 0.1, e3, sign);
    double diff = r.perturbed.g.p_mean(3.0) - r.base.g.p_mean(3.0);
    v3 = std::max(v3, std::fabs(diff + sign * 0.75e-3));
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "max |diff - x2^p lambda| %.2e, max |lambda_3| %.2e, p=3 variant err %.2e (tol 1e-12)",
                worst, l3, v3);
  return {worst <= 1e-12 && l3 <= 1e-12 && v3 <= 1e-12, buf};
}

Outcome ac9() {
  auto e = exponent_params(3.0);
  SplitMix64 rng(1009);
  int got = 0;
  long bad = 0;
  double worst_rel = 0.0, worst_C = 0.0, max_m33 = -HUGE_VAL, min_d1 = HUGE_VAL;
  double q = e.p_star - 1.0;
  while (got < 1000) {
    double x1 = 0.05 + 1.5 * rng.uniform(), x2 = q * (1.0 + 3.0 * rng.uniform()) * x1;
    OmegaPoint x {x1, x2, std::pow(x1, 3.0) + 0.05 + 4.0 * rng.uniform()};
    auto b = bellman_max(x, e);
    if (b.sector != Sector::implicit_branch || std::fabs(b.omega - q) < 0.05 * q) continue;
    HessianReport r;
    try {
      r = hessian_check(x, e, Which::max);
    } catch (const StepSizeError&) {
      continue;
    }
    ++got;
    double s2 = std::fabs(r.H[1][1] * r.H[2][2]) + r.H[1][2] * r.H[1][2];
    double s1 = std::fabs(r.H[0][0] * r.H[2][2]) + r.H[0][2] * r.H[0][2];
    double rel = std::fabs(r.D2) / s2;
    worst_rel = std::max(worst_rel, rel);
    worst_C = std::max(worst_C, std::fabs(r.D2) / (r.h * r.h));
    max_m33 = std::max(max_m33, r.M33);
    min_d1 = std::min(min_d1, r.D1 / s1);
    if (rel > 1e-3 || !(r.M33 < 0.0) || r.D1 < -1e-3 * s1) ++bad;
  }
  // rejected cases: indefinite
  int rej = 0;
  long rej_bad = 0;
  double max_rej_d2 = -HUGE_VAL;
  while (rej < 200) {
    double y1 = 0.3 + rng.uniform(), y2 = y1 * rng.uniform(-0.9, 0.9);
    XiPoint y {y1, y2, std::pow(std::fabs(y1 - y2), 3.0) * (1.2 + 2.0 * rng.uniform()) + 0.05};
    HessianReport r;
    try {
      r = hessian_check_rejected(y, e, y2 > 0 ? CaseId::c3_1 : CaseId::c4_1);
    } catch (const StepSizeError&) {
      continue;
    }
    ++rej;
    max_rej_d2 = std::max(max_rej_d2, r.D2);
    if (!(r.D2 < 0.0)) ++rej_bad;
  }
  char buf[400];
  std::snprintf(buf, sizeof buf,
                "1000 implicit points: degenerate minor |D2| <= %.1e of its terms (tol 1e-3), |D2|/h^2 <= %.2g, "
                "max M33 %.2e (< 0), min D1/terms %.2e; %ld bad; 200 rejected-case points: max D2 %.2e (< 0), %ld bad",
                worst_rel, worst_C, max_m33, min_d1, bad, max_rej_d2, rej_bad);
  return {bad == 0 && rej_bad == 0, buf};
}

Outcome ac10() {
  auto e = exponent_params(3.0);
  const double L = 4.0;
  const int n = 257;
  double rel[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    double sign = k == 0 ? 1.0 : -1.0;
    Sampler h = sign > 0 ? Sampler([e](PlanePoint x) { return h_max(x, e); })
                         : Sampler([e](PlanePoint x) { return h_min(x, e); });
    Sampler bs = boundary_sampler(BoundaryMode::pin_closed_form, e, sign);
    auto r = sign > 0 ? least_zigzag_majorant(h, L, n, bs) : greatest_zigzag_minorant(h, L, n, bs);
    double err = 0.0, sc = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        ld x1 = r.field.coord(i), x2 = r.field.coord(j);
        if (std::max(std::fabs(x1), std::fabs(x2)) > 1.0) continue;
        ld ref = sign > 0 ? oracle::F(std::fabs(x2), std::fabs(x1), 3) : -oracle::F(std::fabs(x1), std::fabs(x2), 3) / 8;
        err = std::max(err, double(std::fabs(r.field.at(i, j) - ref)));
        sc = std::max(sc, double(std::fabs(ref)));
      }
    }
    rel[k] = err / sc;
  }
  return {rel[0] <= 0.02 && rel[1] <= 0.02,
          fmt("p=3, L=4, n=257 on |x|<=1: majorant rel err %.2e, minorant rel err %.2e (tol 2e-2)", rel[0], rel[1])};
}

Outcome ac11() {
  bool ok = true;
  std::string d;
  for (double p : {3.0, 2.0}) {
    auto e = exponent_params(p);
    auto r = critical_constant(e, default_ladder(), default_test_point(e), 0.02 * e.beta, 0.5 * e.beta, 2.0 * e.beta);
    double rel = std::fabs(r.c_star - e.beta) / e.beta;
    ok = ok && rel <= 0.1;
    char buf[160];
    std::snprintf(buf, sizeof buf, "p=%g: c* %.4g vs %.4g (rel %.1e, %zu probes); ", p, r.c_star, e.beta, rel,
                  r.probes.size());
    d += buf;
  }
  d += "tol 10%";
  return {ok, d};
}

Outcome ac12() {
  auto e = exponent_params(3.0);
  SplitMix64 rng(1012);
  long order_bad = 0, eq_bad = 0, ref_bad = 0;
  double worst_eq = 0.0, worst_ref = 0.0;
  for (int k = 0; k < 100000; ++k) {
    PlanePoint x {rng.uniform(-3, 3), rng.uniform(-3, 3)};
    double hm = h_max(x, e), ph = phi_max(x, e), up = u_p(x, e);
    double sc = std::max(1.0, std::pow(std::fabs(x.x2), 3.0) + 8.0 * std::pow(std::fabs(x.x1), 3.0));
    if (hm > ph + 1e-13 * sc || ph > up + 1e-13 * sc) ++order_bad;
    double dref = double(std::fabs(ph - oracle::F(std::fabs(x.x2), std::fabs(x.x1), 3)) / sc);
    worst_ref = std::max(worst_ref, dref);
    if (dref > 1e-13) ++ref_bad;
    bool in_eq = std::fabs(x.x2) >= 2.0 * std::fabs(x.x1);
    double gap = double(std::fabs((ld)ph - u_ref(x.x1, x.x2, 3)) / sc);
    if (in_eq) {
      worst_eq = std::max(worst_eq, gap);
      if (gap > 1e-13) ++eq_bad;
    } else if (!(gap > 1e-13)) {
      ++eq_bad;  // strict outside the equality region
    }
  }
  long route_bad = 0;
  double worst_route = 0.0;
  for (int k = 0; k < 100000; ++k) {
    OmegaPoint x = oracle::random_point(rng, 3.0, 2.0, 4.0);
    for (Which w : {Which::max, Which::min}) {
      double a = bellman(x, e, w).value, b = b_from_phi(x, e, w);
      double rel = std::fabs(a - b) / std::max(1.0, std::fabs(a));
      worst_route = std::max(worst_route, rel);
      if (rel > 1e-9) ++route_bad;
    }
  }
  char buf[400];
  std::snprintf(buf, sizeof buf,
                "p=3, 1e5 plane points: %ld order violations, phi_max=u_p gap %.1e on |x2|>=2|x1| with strict "
                "inequality elsewhere (%ld bad), phi_max vs reference %.1e; 1e5 domain points: b_from_phi vs solver "
                "max rel %.1e (tol 1e-9, %ld bad)",
                order_bad, worst_eq, eq_bad, worst_ref, worst_route, route_bad);
  return {order_bad == 0 && eq_bad == 0 && ref_bad == 0 && route_bad == 0, buf};
}

}  // namespace

int main() {
  run(1, "p=2 closed form", 1, ac1);
  run(2, "linear-sector exactness", 5, ac2);
  run(3, "implicit-equation residual", 30, ac3);
  run(4, "sharp constants", 60, ac4);
  run(5, "zigzag concavity/convexity", 60, ac5);
  run(6, "simulation bounds", 120, ac6);
  run(7, "extremal-sequence attainment", 30, ac7);
  run(8, "counterexample identities", 5, ac8);
  run(9, "Monge-Ampere degeneracy and signs", 60, ac9);
  run(10, "envelope recovery", 120, ac10);
  run(11, "critical constant", 300, ac11);
  run(12, "phi/u_p structure and b_from_phi", 10, ac12);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
