#pragma once

#include <stdexcept>
#include <string>

namespace breather {

/// Four-parameter breather family: scalings (alpha, beta) and shifts (x1, x2).
///
/// The closed forms accept any nonzero alpha, beta (the family is even in
/// alpha and odd in beta); the analysis modules require both positive and
/// call check_positive().
struct BreatherParams {
  double alpha = 1.0;
  double beta = 1.0;
  double x1 = 0.0;
  double x2 = 0.0;

  /// Phase velocity coefficient of y1 = x + delta t + x1.
  [[nodiscard]] double delta() const { return alpha * alpha - 3.0 * beta * beta; }
  /// Envelope coefficient of y2 = x + gamma t + x2; the breather moves at -gamma.
  [[nodiscard]] double gamma() const { return 3.0 * alpha * alpha - beta * beta; }
  /// beta^2 - alpha^2, the weight of E in the Lyapunov functional (halved).
  [[nodiscard]] double dispersion_weight() const { return beta * beta - alpha * alpha; }
  /// alpha^2 + beta^2.
  [[nodiscard]] double scaling_weight() const { return alpha * alpha + beta * beta; }

  [[nodiscard]] BreatherParams shifted(double a) const { return {alpha, beta, x1 + a, x2 + a}; }

  void check_positive() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0, got " + std::to_string(alpha));
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0, got " + std::to_string(beta));
  }
};

/// Soliton Q_c(x - c t - x0).
struct SolitonParams {
  double c = 1.0;
  double x0 = 0.0;

  void check() const {
    if (!(c > 0.0)) throw std::invalid_argument("soliton speed c must be > 0, got " + std::to_string(c));
  }
};

struct PointQuery {
  double t = 0.0;
  double x = 0.0;
};

/// Derived fields of the breather that eval_direction knows how to evaluate.
enum class Direction {
  B,
  TildeB,
  B1,
  B2,
  LambdaAlpha,
  LambdaBeta,
  B0,
  TildeBt,
  MassProfile,
  DoublePole,
};

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

}  // namespace breather
