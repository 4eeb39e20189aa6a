#include "breather/closed_form.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace breather {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

/// sech(z), tanh(z) without overflow.
struct Hyperbolic {
  double sech;
  double tanh;
};

Hyperbolic hyperbolic(double z) {
  const double e = std::exp(-std::abs(z));
  return {2.0 * e / (1.0 + e * e), std::tanh(z)};
}

/// cosh(2z), sinh(2z) scaled by exp(-2|z|), plus the scale itself.
struct DoubleAngle {
  double ch2;
  double sh2;
  double scale;
};

DoubleAngle double_angle(double z) {
  const double e = std::exp(-2.0 * std::abs(z));
  const double sg = z >= 0.0 ? 1.0 : -1.0;
  return {0.5 * (1.0 + e * e), sg * 0.5 * (1.0 - e * e), e};
}

double b1_explicit(const BreatherParams& p, const Phases& ph) {
  const double a = p.alpha;
  const double b = p.beta;
  const double z = b * ph.y2;
  if (std::abs(z) > kDecayCutoff) return 0.0;
  const auto [sech, th] = hyperbolic(z);
  const double s = std::sin(a * ph.y1);
  const double c = std::cos(a * ph.y1);
  const double dh = a * a + b * b * s * s * sech * sech;
  const double first = (a * s + b * c * th) * sech / dh;
  const double second = 2.0 * b * b * s * c * (a * c - b * s * th) * sech * sech * sech / (dh * dh);
  return -2.0 * kSqrt2 * a * a * b * (first + second);
}

double b2_explicit(const BreatherParams& p, const Phases& ph) {
  const double a = p.alpha;
  const double b = p.beta;
  const double z = b * ph.y2;
  if (std::abs(z) > kDecayCutoff) return 0.0;
  const auto [sech, th] = hyperbolic(z);
  const double s = std::sin(a * ph.y1);
  const double c = std::cos(a * ph.y1);
  const double dh = a * a + b * b * s * s * sech * sech;
  const double first = (a * c * th - b * s) * sech / dh;
  const double second = 2.0 * a * a * th * (a * c - b * s * th) * sech / (dh * dh);
  return 2.0 * kSqrt2 * a * b * b * (first - second);
}

double tilde_b(const BreatherParams& p, const Phases& ph) {
  const auto [sech, th] = hyperbolic(p.beta * ph.y2);
  return 2.0 * kSqrt2 * std::atan(p.beta / p.alpha * std::sin(p.alpha * ph.y1) * sech);
}

double mass_profile(const BreatherParams& p, const Phases& ph) {
  const double a = p.alpha;
  const double b = p.beta;
  const double z = b * ph.y2;
  const auto [ch2, sh2, e] = double_angle(z);
  const double s2 = std::sin(2.0 * a * ph.y1);
  const double c2 = std::cos(2.0 * a * ph.y1);
  const double sw = a * a + b * b;
  // e^{2z} e^{-2|z|}
  const double growth = z >= 0.0 ? 1.0 : e * e;
  const double num = (sw + a * b * s2 - b * b * c2) * e + a * a * growth;
  const double den = (sw - b * b * c2) * e + a * a * ch2;
  return 2.0 * b * num / den;
}

double double_pole(const BreatherParams& p, PointQuery q) {
  const double b = p.beta;
  const double y1 = q.x - 3.0 * b * b * q.t + p.x1;
  const double y2 = q.x - b * b * q.t + p.x2;
  if (std::abs(b * y2) > kDecayCutoff) return 0.0;
  const auto [sech, th] = hyperbolic(b * y2);
  const double by1 = b * y1;
  return 2.0 * kSqrt2 * b * (sech - by1 * th * sech) / (1.0 + by1 * by1 * sech * sech);
}

}  // namespace

std::string to_string(Direction d) {
  switch (d) {
    case Direction::B: return "B";
    case Direction::TildeB: return "TildeB";
    case Direction::B1: return "B1";
    case Direction::B2: return "B2";
    case Direction::LambdaAlpha: return "LambdaAlpha";
    case Direction::LambdaBeta: return "LambdaBeta";
    case Direction::B0: return "B0";
    case Direction::TildeBt: return "TildeBt";
    case Direction::MassProfile: return "MassProfile";
    case Direction::DoublePole: return "DoublePole";
  }
  throw std::invalid_argument("unknown direction");
}

Direction direction_from_string(const std::string& s) {
  for (auto d : {Direction::B, Direction::TildeB, Direction::B1, Direction::B2, Direction::LambdaAlpha,
                 Direction::LambdaBeta, Direction::B0, Direction::TildeBt, Direction::MassProfile,
                 Direction::DoublePole}) {
    if (to_string(d) == s) return d;
  }
  throw std::invalid_argument("unknown direction '" + s + "'");
}

Phases phases(const BreatherParams& p, PointQuery q) {
  return {q.x + p.delta() * q.t + p.x1, q.x + p.gamma() * q.t + p.x2};
}

double eval_breather(const BreatherParams& p, PointQuery q) {
  const Phases ph = phases(p, q);
  return detail::breather_profile(p.alpha, p.beta, ph.y1, ph.y2);
}

double lambda_alpha(const BreatherParams& p, PointQuery q) {
  const auto a = Jet<1>::variable(p.alpha);
  return detail::breather_at(a, Jet<1>(p.beta), q.t, q.x, p.x1, p.x2).c[1];
}

double lambda_beta(const BreatherParams& p, PointQuery q) {
  const auto b = Jet<1>::variable(p.beta);
  return detail::breather_at(Jet<1>(p.alpha), b, q.t, q.x, p.x1, p.x2).c[1];
}

double tilde_bt(const BreatherParams& p, PointQuery q) {
  const Phases ph = phases(p, q);
  const double a = p.alpha;
  const double b = p.beta;
  const double z = b * ph.y2;
  if (std::abs(z) > kDecayCutoff) return 0.0;
  const auto [sech, th] = hyperbolic(z);
  const double s = std::sin(a * ph.y1);
  const double c = std::cos(a * ph.y1);
  const double dh = a * a + b * b * s * s * sech * sech;
  return 2.0 * kSqrt2 * a * b * (a * p.delta() * c - b * p.gamma() * s * th) * sech / dh;
}

double mass_profile_t(const BreatherParams& p, PointQuery q) {
  const Phases ph = phases(p, q);
  const double a = p.alpha;
  const double b = p.beta;
  const double dl = p.delta();
  const double gm = p.gamma();
  const double z = b * ph.y2;
  if (std::abs(z) > kDecayCutoff) return 0.0;
  const auto [ch2, sh2, e] = double_angle(z);
  const double s2 = std::sin(2.0 * a * ph.y1);
  const double c2 = std::cos(2.0 * a * ph.y1);
  const double sw = a * a + b * b;
  // h~ and g, both multiplied by exp(-2|z|)
  const double ht = (gm * a * a - dl * b * b + sw * dl * c2) * e + sw * gm * ch2 +
                    (dl * a * a - gm * b * b) * c2 * ch2 - a * b * (dl + gm) * s2 * sh2;
  const double g = (sw - b * b * c2) * e + a * a * ch2;
  return 4.0 * a * a * b * b * ht * e / (g * g);
}

double wronskian_closed_form(const BreatherParams& p, PointQuery q) {
  const Phases ph = phases(p, q);
  const double a = p.alpha;
  const double b = p.beta;
  const double z = b * ph.y2;
  if (std::abs(z) > kDecayCutoff) return 0.0;
  const auto [ch2, sh2, e] = double_angle(z);
  const double s2 = std::sin(2.0 * a * ph.y1);
  const double c2 = std::cos(2.0 * a * ph.y1);
  const double sw = a * a + b * b;
  const double g = (sw - b * b * c2) * e + a * a * ch2;
  // B1 (B2)_x - B2 (B1)_x carries the factor [beta sin(2 alpha y1) - alpha sinh(2 beta y2)]
  return 16.0 * a * a * a * b * b * b * sw * (b * s2 * e - a * sh2) * e / (g * g);
}

double eval_direction(const BreatherParams& p, Direction d, PointQuery q) {
  switch (d) {
    case Direction::B: return eval_breather(p, q);
    case Direction::TildeB: return tilde_b(p, phases(p, q));
    case Direction::B1: return b1_explicit(p, phases(p, q));
    case Direction::B2: return b2_explicit(p, phases(p, q));
    case Direction::LambdaAlpha: return lambda_alpha(p, q);
    case Direction::LambdaBeta: return lambda_beta(p, q);
    case Direction::B0: {
      const double a = p.alpha;
      const double b = p.beta;
      return (a * lambda_beta(p, q) + b * lambda_alpha(p, q)) / (8.0 * a * b * p.scaling_weight());
    }
    case Direction::TildeBt: return tilde_bt(p, q);
    case Direction::MassProfile: return mass_profile(p, phases(p, q));
    case Direction::DoublePole: return double_pole(p, q);
  }
  throw std::invalid_argument("unknown direction");
}

double eval_soliton(const SolitonParams& s, PointQuery q) {
  s.check();
  const double rc = std::sqrt(s.c);
  const double arg = rc * (q.x - s.c * q.t - s.x0);
  return rc * kSqrt2 * hyperbolic(arg).sech;
}

SpacetimeShift shift_to_spacetime(const BreatherParams& p) {
  const double w = 2.0 * p.scaling_weight();
  return {(p.x1 - p.x2) / w, (p.delta() * p.x2 - p.gamma() * p.x1) / w};
}

BreatherParams shifts_from_spacetime(double alpha, double beta, SpacetimeShift s) {
  BreatherParams p{alpha, beta, 0.0, 0.0};
  p.x1 = -s.x0 - p.delta() * s.t0;
  p.x2 = -s.x0 - p.gamma() * s.t0;
  return p;
}

}  // namespace breather
