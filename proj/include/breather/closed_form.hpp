#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "breather/jet.hpp"
#include "breather/params.hpp"

namespace breather {

/// Beyond this |beta y2| every exponentially decaying field is below
/// double-precision underflow relative to O(1) and is returned as zero.
inline constexpr double kDecayCutoff = 300.0;

namespace detail {

/// Breather profile as a function of the phase variables y1, y2, written in
/// the quotient form with cosh/sinh pre-scaled by exp(-|beta y2|) so that no
/// intermediate overflows.  T may be double or a Jet.
template <class T>
T breather_profile(const T& alpha, const T& beta, const T& y1, const T& y2) {
  using std::exp;
  const T z = beta * y2;
  const double a = std::abs(value_of(z));
  if (a > kDecayCutoff) return T(0.0);
  const T ep = exp(z - a);
  const T em = exp(-z - a);
  const T ch = 0.5 * (ep + em);
  const T sh = 0.5 * (ep - em);
  const double eps = std::exp(-a);
  T s, c;
  sincos(alpha * y1, s, c);
  const T num = alpha * c * ch - beta * s * sh;
  const T den = alpha * alpha * ch * ch + (eps * eps) * (beta * beta * s * s);
  return (2.0 * std::numbers::sqrt2 * eps) * alpha * beta * num / den;
}

/// Same profile with (alpha, beta) possibly carrying derivative information;
/// the phases are rebuilt from (t, x, x1, x2) so that delta and gamma follow
/// the parameters.
template <class T>
T breather_at(const T& alpha, const T& beta, double t, double x, double x1, double x2) {
  const T delta = alpha * alpha - 3.0 * (beta * beta);
  const T gamma = 3.0 * (alpha * alpha) - beta * beta;
  const T y1 = x + delta * t + x1;
  const T y2 = x + gamma * t + x2;
  return breather_profile(alpha, beta, y1, y2);
}

}  // namespace detail

/// Phase variables y1 = x + delta t + x1 and y2 = x + gamma t + x2.
struct Phases {
  double y1;
  double y2;
};
Phases phases(const BreatherParams& p, PointQuery q);

double eval_breather(const BreatherParams& p, PointQuery q);

double eval_direction(const BreatherParams& p, Direction d, PointQuery q);

/// Q_c(x - c t - x0) with Q(s) = sqrt(2) sech(s).
double eval_soliton(const SolitonParams& s, PointQuery q);

struct SpacetimeShift {
  double t0;
  double x0;
};

/// (t0, x0) with B(t, x; x1, x2) = B(t - t0, x - x0; 0, 0).
SpacetimeShift shift_to_spacetime(const BreatherParams& p);

/// Inverse of shift_to_spacetime for fixed (alpha, beta).
BreatherParams shifts_from_spacetime(double alpha, double beta, SpacetimeShift s);

/// B, B_x, ..., d^D B / dx^D at one point, exact to round-off.
template <int D>
std::array<double, D + 1> breather_x_derivatives(const BreatherParams& p, PointQuery q) {
  const Phases ph = phases(p, q);
  const auto j = detail::breather_profile(Jet<D>(p.alpha), Jet<D>(p.beta), Jet<D>::variable(ph.y1),
                                          Jet<D>::variable(ph.y2));
  std::array<double, D + 1> out{};
  for (int k = 0; k <= D; ++k) out[k] = j.derivative(k);
  return out;
}

/// Directional derivatives of the profile along (dy1, dy2) = (a1, a2); with
/// (1, 0) this is d/dx1, with (0, 1) d/dx2, with (1, 1) d/dx.
template <int D>
std::array<double, D + 1> breather_phase_derivatives(const BreatherParams& p, PointQuery q, double a1,
                                                     double a2) {
  const Phases ph = phases(p, q);
  const auto j = detail::breather_profile(Jet<D>(p.alpha), Jet<D>(p.beta), Jet<D>::variable(ph.y1, a1),
                                          Jet<D>::variable(ph.y2, a2));
  std::array<double, D + 1> out{};
  for (int k = 0; k <= D; ++k) out[k] = j.derivative(k);
  return out;
}

/// d B / d alpha and d B / d beta at fixed (t, x, x1, x2).
double lambda_alpha(const BreatherParams& p, PointQuery q);
double lambda_beta(const BreatherParams& p, PointQuery q);

/// Velocity-split time derivative of the potential tilde B: delta B~1 + gamma B~2.
double tilde_bt(const BreatherParams& p, PointQuery q);

/// Time derivative of the mass profile, (4 alpha^2 beta^2 h~) / g^2.
double mass_profile_t(const BreatherParams& p, PointQuery q);

/// Closed-form Wronskian det [[B1, B2], [B1_x, B2_x]] =
/// 16 a^3 b^3 (a^2 + b^2) [b sin(2 a y1) - a sinh(2 b y2)] / g^2.
double wronskian_closed_form(const BreatherParams& p, PointQuery q);

}  // namespace breather
