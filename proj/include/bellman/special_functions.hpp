#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "errors.hpp"

namespace bmt {

// ExponentParams: p and every constant derived from it.
struct ExponentParams {
  double p {2.0};
  double p_conj {2.0};
  double p_star {2.0};
  double beta {1.0};
  double K {1.0};  // p (1 - 1/p*)^(p-1), the slope constant of the Burkholder branch
};

inline ExponentParams exponent_params(double p) {
  if (!std::isfinite(p) || !(p > 1.0)) {
    throw DomainError("exponent_params: p must be finite and > 1, got " + std::to_string(p));
  }
  ExponentParams e;
  e.p = p;
  e.p_conj = p / (p - 1.0);
  e.p_star = std::max(p, e.p_conj);
  e.beta = std::pow(e.p_star - 1.0, p);
  e.K = p * std::pow(1.0 - 1.0 / e.p_star, p - 1.0);
  return e;
}

struct PlanePoint {
  double x1 {0.0};
  double x2 {0.0};
};

// x^e for x >= 0; an exact zero base returns 0 for positive exponents.
inline double pw(double x, double e) {
  if (x == 0.0) return e > 0.0 ? 0.0 : (e == 0.0 ? 1.0 : HUGE_VAL);
  return std::pow(x, e);
}

namespace detail {

inline void check_quadrant(double z1, double z2, const char* who) {
  if (!(z1 >= 0.0) || !(z2 >= 0.0)) {
    throw DomainError(std::string(who) + ": arguments must be >= 0");
  }
}

}  // namespace detail

// True where F_p takes its pure power form z1^p - beta z2^p. The cone
// z1 = (p*-1) z2 separates the branches; for p < 2 the power form sits on the
// side z1 >= (p*-1) z2.
inline bool f_power_branch(double z1, double z2, const ExponentParams& e) {
  double cone = (e.p_star - 1.0) * z2;
  return e.p >= 2.0 ? z1 <= cone : z1 >= cone;
}

inline double f_power_form(double z1, double z2, const ExponentParams& e) {
  return pw(z1, e.p) - e.beta * pw(z2, e.p);
}

inline double f_burkholder_form(double z1, double z2, const ExponentParams& e) {
  return e.K * pw(z1 + z2, e.p - 1.0) * (z1 - (e.p_star - 1.0) * z2);
}

inline double f_p(double z1, double z2, const ExponentParams& e) {
  detail::check_quadrant(z1, z2, "f_p");
  return f_power_branch(z1, z2, e) ? f_power_form(z1, z2, e) : f_burkholder_form(z1, z2, e);
}

inline std::pair<double, double> f_power_partials(double z1, double z2, const ExponentParams& e) {
  return {e.p * pw(z1, e.p - 1.0), -e.p * e.beta * pw(z2, e.p - 1.0)};
}

inline std::pair<double, double> f_burkholder_partials(double z1, double z2, const ExponentParams& e) {
  double s = z1 + z2;
  if (s == 0.0) return {0.0, 0.0};
  double q = e.p_star - 1.0;
  double c = e.K * std::pow(s, e.p - 2.0);
  return {c * (e.p * z1 - ((e.p - 1.0) * q - 1.0) * z2),
          -c * ((e.p_star - e.p) * z1 + e.p * q * z2)};
}

inline std::pair<double, double> f_p_partials(double z1, double z2, const ExponentParams& e) {
  detail::check_quadrant(z1, z2, "f_p_partials");
  return f_power_branch(z1, z2, e) ? f_power_partials(z1, z2, e) : f_burkholder_partials(z1, z2, e);
}

// G_p with the break at z1 = (p-1) z2. Continuous; its slope jumps by the
// factor K across the break unless p = 2.
inline double g_p(double z1, double z2, const ExponentParams& e) {
  detail::check_quadrant(z1, z2, "g_p");
  double p = e.p;
  if (z1 <= (p - 1.0) * z2) return pw(z1, p) - pw(p - 1.0, p) * pw(z2, p);
  return pw(z1 + z2, p - 1.0) * (z1 - (p - 1.0) * z2);
}

inline double u_p(PlanePoint x, const ExponentParams& e) {
  double a = std::fabs(x.x1), b = std::fabs(x.x2);
  return e.K * pw(a + b, e.p - 1.0) * (b - (e.p_star - 1.0) * a);
}

inline double h_c(PlanePoint x, double c, const ExponentParams& e) {
  if (!(c > 0.0)) throw DomainError("h_c: c must be > 0");
  return pw(std::fabs(x.x2), e.p) - c * pw(std::fabs(x.x1), e.p);
}

inline double h_max(PlanePoint x, const ExponentParams& e) { return h_c(x, e.beta, e); }
inline double h_min(PlanePoint x, const ExponentParams& e) { return h_c(x, 1.0 / e.beta, e); }

inline double lambda_p(double alpha, const ExponentParams& e) {
  if (!(alpha >= 0.0) || !(alpha < 0.5)) throw DomainError("lambda_p: alpha must lie in [0, 1/2)");
  double p = e.p;
  return 0.125 * (std::pow(1.0 + 2.0 * alpha, p) + std::pow(1.0 - 2.0 * alpha, p)) + 0.75
       - 0.5 * (std::pow(1.0 + alpha, p) + std::pow(1.0 - alpha, p));
}

inline double phi_max(PlanePoint x, const ExponentParams& e) {
  return f_p(std::fabs(x.x2), std::fabs(x.x1), e);
}

inline double phi_min(PlanePoint x, const ExponentParams& e) {
  return -f_p(std::fabs(x.x1), std::fabs(x.x2), e) / e.beta;
}

}  // namespace bmt
