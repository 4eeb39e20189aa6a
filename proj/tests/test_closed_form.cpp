#include <cmath>
#include <numbers>
#include <random>

#include "breather/closed_form.hpp"
#include "breather/grid.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace breather;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("breather at the origin equals 2 sqrt2 beta") {
  CHECK(eval_breather({1, 1, 0, 0}, {0, 0}) == doctest::Approx(2 * std::numbers::sqrt2).epsilon(1e-15));
  CHECK(eval_breather({1.7, 0.6, 0, 0}, {0, 0}) == doctest::Approx(2 * std::numbers::sqrt2 * 0.6).epsilon(1e-14));
}

TEST_CASE("breather matches the arctan-derivative form in long double") {
  const long double ref = oracle::breather_arctan(2.0L, 0.5L, 0.3L, 1.2L, 0.4L, -0.7L);
  const double v = eval_breather({2, 0.5, 0.4, -0.7}, {0.3, 1.2});
  CHECK(std::abs(v - static_cast<double>(ref)) <= 1e-12 * std::abs(static_cast<double>(ref)));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(0.3, 2.5), ux(-6, 6), ut(-0.5, 0.5);
  for (int i = 0; i < 200; ++i) {
    const BreatherParams p{ua(rng), ua(rng), ux(rng), ux(rng)};
    const PointQuery q{ut(rng), ux(rng)};
    const double r = static_cast<double>(oracle::breather_arctan(p.alpha, p.beta, q.t, q.x, p.x1, p.x2));
    CHECK(std::abs(eval_breather(p, q) - r) <= 1e-12 * std::max(1.0, std::abs(r)));
  }
}

TEST_CASE("sign symmetries in alpha and beta") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ua(0.3, 2.5), ux(-8, 8), ut(-1, 1);
  for (int i = 0; i < 200; ++i) {
    const BreatherParams p{ua(rng), ua(rng), ux(rng), ux(rng)};
    const PointQuery q{ut(rng), ux(rng)};
    const double b = eval_breather(p, q);
    CHECK(std::abs(eval_breather({-p.alpha, p.beta, p.x1, p.x2}, q) - b) <= 1e-14 * std::max(1.0, std::abs(b)));
    CHECK(std::abs(eval_breather({p.alpha, -p.beta, p.x1, p.x2}, q) + b) <= 1e-14 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("scaling symmetry") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ua(0.4, 1.8), ux(-4, 4), ut(-0.3, 0.3), uc(0.5, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double a = ua(rng), b = ua(rng), c = uc(rng), t = ut(rng), x = ux(rng);
    const double rc = std::sqrt(c);
    const double lhs = rc * eval_breather({a, b, 0, 0}, {c * rc * t, rc * x});
    const double rhs = eval_breather({rc * a, rc * b, 0, 0}, {t, x});
    CHECK(rel(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("soliton values") {
  CHECK(eval_soliton({1, 0}, {0, 0}) == doctest::Approx(std::numbers::sqrt2).epsilon(1e-15));
  CHECK(eval_soliton({4, 0}, {0, 0}) == doctest::Approx(2 * std::numbers::sqrt2).epsilon(1e-15));
  CHECK(eval_soliton({1, 0}, {0, 2}) == doctest::Approx(std::numbers::sqrt2 / std::cosh(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(eval_soliton({0, 0}, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(eval_soliton({-1, 0}, {0, 0}), std::invalid_argument);
}

TEST_CASE("shift to spacetime") {
  auto z = shift_to_spacetime({1.3, 0.8, 0, 0});
  CHECK(z.t0 == 0.0);
  CHECK(z.x0 == 0.0);

  const BreatherParams p{1, 1, 4, 0};
  const auto s = shift_to_spacetime(p);
  CHECK(s.t0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.x0 == doctest::Approx(-2.0).epsilon(1e-15));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(0.4, 2.0), ux(-5, 5), ut(-1, 1);
  for (int i = 0; i < 20; ++i) {
    const BreatherParams pr{ua(rng), ua(rng), ux(rng), ux(rng)};
    const auto st = shift_to_spacetime(pr);
    const BreatherParams back = shifts_from_spacetime(pr.alpha, pr.beta, st);
    CHECK(std::abs(back.x1 - pr.x1) < 1e-12);
    CHECK(std::abs(back.x2 - pr.x2) < 1e-12);
    const PointQuery q{ut(rng), ux(rng)};
    const double lhs = eval_breather(pr, q);
    const double rhs = eval_breather({pr.alpha, pr.beta, 0, 0}, {q.t - st.t0, q.x - st.x0});
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("half-period shift in x1 flips the sign") {
  const BreatherParams p{1.5, 1, 0.3, -0.2};
  const BreatherParams f{p.alpha, p.beta, p.x1 + std::numbers::pi / p.alpha, p.x2};
  for (double x = -5; x <= 5; x += 0.37) {
    const double b = eval_breather(p, {0.1, x});
    CHECK(std::abs(eval_breather(f, {0.1, x}) + b) < 1e-13 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("translation directions and chain rule") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ua(0.5, 2.0), ux(-3, 3), ut(-0.3, 0.3);
  for (int i = 0; i < 40; ++i) {
    const BreatherParams p{ua(rng), ua(rng), ux(rng), ux(rng)};
    const PointQuery q{ut(rng), ux(rng)};
    const double b1 = eval_direction(p, Direction::B1, q);
    const double b2 = eval_direction(p, Direction::B2, q);
    const double fd1 = oracle::richardson([&](double s) { return eval_breather({p.alpha, p.beta, s, p.x2}, q); }, p.x1, 1e-3);
    const double fd2 = oracle::richardson([&](double s) { return eval_breather({p.alpha, p.beta, p.x1, s}, q); }, p.x2, 1e-3);
    const double fdx = oracle::richardson([&](double s) { return eval_breather(p, {q.t, s}); }, q.x, 1e-3);
    const double fdt = oracle::richardson([&](double s) { return eval_breather(p, {s, q.x}); }, q.t, 1e-4);
    const double scale = std::max(1.0, std::pow(p.scaling_weight(), 1.5));
    CHECK(std::abs(b1 - fd1) < 1e-8 * scale);
    CHECK(std::abs(b2 - fd2) < 1e-8 * scale);
    CHECK(std::abs(b1 + b2 - fdx) < 1e-8 * scale);
    CHECK(std::abs(p.delta() * b1 + p.gamma() * b2 - fdt) < 1e-7 * scale * p.scaling_weight());
  }
}

TEST_CASE("x-derivative jets agree with finite differences") {
  const BreatherParams p{1.5, 1, 0.2, -0.4};
  for (double x : {-2.1, -0.3, 0.0, 0.8, 2.7}) {
    const auto d = breather_x_derivatives<4>(p, {0.15, x});
    CHECK(d[0] == doctest::Approx(eval_breather(p, {0.15, x})).epsilon(1e-14));
    auto first = [&](double s) { return breather_x_derivatives<4>(p, {0.15, s})[1]; };
    auto third = [&](double s) { return breather_x_derivatives<4>(p, {0.15, s})[3]; };
    CHECK(std::abs(oracle::richardson([&](double s) { return eval_breather(p, {0.15, s}); }, x, 1e-3) - d[1]) < 1e-8);
    CHECK(std::abs(oracle::richardson(first, x, 1e-3) - d[2]) < 1e-8);
    CHECK(std::abs(oracle::richardson(third, x, 1e-3) - d[4]) < 1e-7);
  }
}

TEST_CASE("B1 at the half-period points") {
  const double a = 1.3, b = 0.9;
  for (int k = 0; k < 4; ++k) {
    // y2 = 0 at t = 0 with x = -x2; y1 = k pi / (2 alpha)
    const double x = 0.0;
    const BreatherParams p{a, b, k * std::numbers::pi / (2 * a), 0.0};
    const double sk = std::sin(k * std::numbers::pi / 2);
    const double expect = -2 * std::numbers::sqrt2 * a * a * a * b * sk / (a * a + b * b * sk * sk);
    CHECK(std::abs(eval_direction(p, Direction::B1, {0, x}) - expect) < 1e-13);
  }
}

TEST_CASE("scaling directions agree with Richardson differences") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ua(0.5, 2.0), ux(-3, 3), ut(-0.3, 0.3);
  for (int i = 0; i < 30; ++i) {
    const BreatherParams p{ua(rng), ua(rng), ux(rng), ux(rng)};
    const PointQuery q{ut(rng), ux(rng)};
    const double la = oracle::richardson([&](double s) { return eval_breather({s, p.beta, p.x1, p.x2}, q); },
                                         p.alpha, 1e-3 * std::max(1.0, p.alpha));
    const double lb = oracle::richardson([&](double s) { return eval_breather({p.alpha, s, p.x1, p.x2}, q); },
                                         p.beta, 1e-3 * std::max(1.0, p.beta));
    CHECK(std::abs(eval_direction(p, Direction::LambdaAlpha, q) - la) < 1e-7 * std::max(1.0, std::abs(la)));
    CHECK(std::abs(eval_direction(p, Direction::LambdaBeta, q) - lb) < 1e-7 * std::max(1.0, std::abs(lb)));
  }
}

TEST_CASE("scaling directions integrate against B to 0 and 4") {
  for (const BreatherParams p : {BreatherParams{1, 1, 0, 0}, BreatherParams{1.5, 1, 0.3, -0.2},
                                 BreatherParams{2, 0.5, 0.1, 0.4}}) {
    const PeriodicGrid g = default_grid(p.beta, 2048);
    auto dir = [&](Direction d) { return sample([&](double t, double x) { return eval_direction(p, d, {t, x}); }, g, 0.1); };
    const GridField b = dir(Direction::B);
    CHECK(std::abs(inner(b, dir(Direction::LambdaAlpha))) < 1e-7);
    CHECK(std::abs(inner(b, dir(Direction::LambdaBeta)) - 4.0) < 1e-7);
    if (p.alpha == 1 && p.beta == 1) CHECK(std::abs(inner(b, dir(Direction::B0)) - 0.25) < 1e-9);
  }
}

TEST_CASE("mass profile limits and derivative") {
  for (const BreatherParams p : {BreatherParams{1.5, 1, 0.3, -0.4}, BreatherParams{0.7, 0.5, -1, 2}}) {
    CHECK(std::abs(eval_direction(p, Direction::MassProfile, {0.2, 50 / p.beta}) - 4 * p.beta) < 1e-10);
    CHECK(std::abs(eval_direction(p, Direction::MassProfile, {0.2, -50 / p.beta})) < 1e-10);
    for (double x = -4; x <= 4; x += 0.5) {
      const double fd = oracle::richardson(
          [&](double s) { return eval_direction(p, Direction::MassProfile, {0.2, s}); }, x, 1e-3);
      const double b = eval_breather(p, {0.2, x});
      CHECK(std::abs(fd - 0.5 * b * b) < 1e-8);
      const double fdt = oracle::richardson(
          [&](double s) { return eval_direction(p, Direction::MassProfile, {s, x}); }, 0.2, 1e-4);
      CHECK(std::abs(fdt - mass_profile_t(p, {0.2, x})) < 1e-7);
    }
  }
}

TEST_CASE("potential time derivative") {
  const BreatherParams p{1.5, 1, 0.3, -0.4};
  for (double x = -4; x <= 4; x += 0.5) {
    const double fd = oracle::richardson(
        [&](double s) { return eval_direction(p, Direction::TildeB, {s, x}); }, 0.2, 1e-4);
    CHECK(std::abs(fd - eval_direction(p, Direction::TildeBt, {0.2, x})) < 1e-7);
    const double fdx = oracle::richardson(
        [&](double s) { return eval_direction(p, Direction::TildeB, {0.2, s}); }, x, 1e-3);
    CHECK(std::abs(fdx - eval_breather(p, {0.2, x})) < 1e-8);
  }
}

TEST_CASE("closed-form Wronskian against jets") {
  const BreatherParams p{1.2, 0.8, 0.5, -0.3};
  for (double x = -6; x <= 6; x += 0.75) {
    const PointQuery q{0.1, x};
    const auto d1 = breather_phase_derivatives<2>(p, q, 1, 0);
    const auto d2 = breather_phase_derivatives<2>(p, q, 0, 1);
    // B1 = d1[1]; its x-derivative is the mixed second derivative
    const auto b1 = [&](double s) { return eval_direction(p, Direction::B1, {0.1, s}); };
    const auto b2 = [&](double s) { return eval_direction(p, Direction::B2, {0.1, s}); };
    const double w = b1(x) * oracle::richardson(b2, x, 1e-3) - b2(x) * oracle::richardson(b1, x, 1e-3);
    CHECK(std::abs(d1[1] - b1(x)) < 1e-12);
    CHECK(std::abs(d2[1] - b2(x)) < 1e-12);
    CHECK(std::abs(w - wronskian_closed_form(p, q)) < 1e-8);
  }
}

TEST_CASE("small alpha approaches the double pole") {
  const BreatherParams p{1e-5, 0.9, 0, 0};
  for (double x = -5; x <= 5; x += 0.5) {
    const double bp = eval_breather(p, {0.2, x});
    CHECK(std::abs(bp - eval_direction(p, Direction::DoublePole, {0.2, x})) < 1e-8);
  }
}

TEST_CASE("far field is exactly zero beyond the cutoff") {
  const BreatherParams p{1.5, 1, 0, 0};
  CHECK(eval_breather(p, {0, 400}) == 0.0);
  CHECK(eval_direction(p, Direction::B1, {0, -400}) == 0.0);
  CHECK(std::isfinite(eval_breather(p, {0, 299})));
}

TEST_CASE("direction names round-trip") {
  for (auto d : {Direction::B, Direction::TildeB, Direction::B1, Direction::B2, Direction::LambdaAlpha,
                 Direction::LambdaBeta, Direction::B0, Direction::TildeBt, Direction::MassProfile,
                 Direction::DoublePole})
    CHECK(direction_from_string(to_string(d)) == d);
  CHECK_THROWS(direction_from_string("nope"));
}
