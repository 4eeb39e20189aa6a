#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace breather {

/// Truncated Taylor series in one variable, stored as normalized
/// coefficients c[k] = f^(k)(s0) / k!.
///
/// Arithmetic and the elementary functions below propagate the series
/// exactly to degree D, so evaluating a closed form on a Jet gives its
/// derivatives to round-off without any differencing.
template <int D>
struct Jet {
  static_assert(D >= 0);
  std::array<double, D + 1> c{};

  constexpr Jet() = default;
  constexpr Jet(double v) { c[0] = v; }  // NOLINT: implicit constants are intended

  static constexpr Jet variable(double v, double slope = 1.0) {
    Jet j(v);
    if constexpr (D >= 1) j.c[1] = slope;
    return j;
  }

  [[nodiscard]] constexpr double value() const { return c[0]; }

  /// k-th derivative with respect to the jet variable.
  [[nodiscard]] double derivative(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c[static_cast<std::size_t>(k)] * f;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k <= D; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k <= D; ++k) c[k] -= o.c[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
};

template <int D>
Jet<D> operator-(Jet<D> a) {
  for (auto& v : a.c) v = -v;
  return a;
}
template <int D>
Jet<D> operator+(Jet<D> a, const Jet<D>& b) {
  return a += b;
}
template <int D>
Jet<D> operator-(Jet<D> a, const Jet<D>& b) {
  return a -= b;
}
template <int D>
Jet<D> operator+(Jet<D> a, double b) {
  a.c[0] += b;
  return a;
}
template <int D>
Jet<D> operator+(double b, Jet<D> a) {
  a.c[0] += b;
  return a;
}
template <int D>
Jet<D> operator-(Jet<D> a, double b) {
  a.c[0] -= b;
  return a;
}
template <int D>
Jet<D> operator-(double b, const Jet<D>& a) {
  Jet<D> r = -a;
  r.c[0] += b;
  return r;
}
template <int D>
Jet<D> operator*(Jet<D> a, double s) {
  return a *= s;
}
template <int D>
Jet<D> operator*(double s, Jet<D> a) {
  return a *= s;
}
template <int D>
Jet<D> operator/(Jet<D> a, double s) {
  return a *= (1.0 / s);
}

template <int D>
Jet<D> operator*(const Jet<D>& a, const Jet<D>& b) {
  Jet<D> r;
  for (int k = 0; k <= D; ++k) {
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
    r.c[k] = s;
  }
  return r;
}

template <int D>
Jet<D> operator/(const Jet<D>& a, const Jet<D>& b) {
  Jet<D> q;
  for (int k = 0; k <= D; ++k) {
    double s = a.c[k];
    for (int j = 0; j < k; ++j) s -= q.c[j] * b.c[k - j];
    q.c[k] = s / b.c[0];
  }
  return q;
}

template <int D>
Jet<D> operator/(double a, const Jet<D>& b) {
  return Jet<D>(a) / b;
}

template <int D>
Jet<D> exp(const Jet<D>& a) {
  Jet<D> e;
  e.c[0] = std::exp(a.c[0]);
  for (int k = 1; k <= D; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a.c[j] * e.c[k - j];
    e.c[k] = s / k;
  }
  return e;
}

/// Sine and cosine share one recurrence.
template <int D>
void sincos(const Jet<D>& a, Jet<D>& s, Jet<D>& co) {
  s.c[0] = std::sin(a.c[0]);
  co.c[0] = std::cos(a.c[0]);
  for (int k = 1; k <= D; ++k) {
    double ss = 0.0;
    double cc = 0.0;
    for (int j = 1; j <= k; ++j) {
      ss += j * a.c[j] * co.c[k - j];
      cc -= j * a.c[j] * s.c[k - j];
    }
    s.c[k] = ss / k;
    co.c[k] = cc / k;
  }
}

template <int D>
Jet<D> sin(const Jet<D>& a) {
  Jet<D> s, c;
  sincos(a, s, c);
  return s;
}

template <int D>
Jet<D> cos(const Jet<D>& a) {
  Jet<D> s, c;
  sincos(a, s, c);
  return c;
}

inline double value_of(double v) { return v; }
template <int D>
double value_of(const Jet<D>& j) {
  return j.c[0];
}

inline void sincos(double a, double& s, double& c) {
  s = std::sin(a);
  c = std::cos(a);
}

}  // namespace breather
