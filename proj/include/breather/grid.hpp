#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace breather {

/// Uniform periodic grid on [-L, L) with N nodes.
class PeriodicGrid {
 public:
  PeriodicGrid(double half_length, int n_points);

  [[nodiscard]] double half_length() const { return half_length_; }
  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] double spacing() const { return 2.0 * half_length_ / n_; }
  [[nodiscard]] double x(int j) const { return -half_length_ + j * spacing(); }
  /// Wavenumber of real-to-complex mode j, 0 <= j <= N/2.
  [[nodiscard]] double wavenumber(int j) const;
  [[nodiscard]] int n_modes() const { return n_ / 2 + 1; }

  friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) {
    return a.n_ == b.n_ && a.half_length_ == b.half_length_;
  }

 private:
  double half_length_;
  int n_;
};

/// Default truncation L = 30 / min(beta, 1), N = 1024.
PeriodicGrid default_grid(double beta, int n_points = 1024);

/// Real samples of a field on a grid at time time_tag.
class GridField {
 public:
  GridField(PeriodicGrid grid, std::vector<double> values, double time_tag = 0.0);
  explicit GridField(PeriodicGrid grid, double time_tag = 0.0);

  [[nodiscard]] const PeriodicGrid& grid() const { return grid_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] std::vector<double>& values() { return values_; }
  [[nodiscard]] std::span<const double> span() const { return values_; }
  [[nodiscard]] double time() const { return time_; }
  void set_time(double t) { time_ = t; }
  [[nodiscard]] int size() const { return grid_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  double& operator[](std::size_t j) { return values_[j]; }

  [[nodiscard]] double sup_norm() const;
  /// max(|f(-L)|, |f(L - h)|); callers use it to assert domain adequacy.
  [[nodiscard]] double boundary_magnitude() const;
  [[nodiscard]] bool all_finite() const;

  GridField& operator+=(const GridField& o);
  GridField& operator-=(const GridField& o);
  GridField& operator*=(double s);

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
  double time_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(GridField a, double s);
GridField operator*(double s, GridField a);
/// Pointwise product.
GridField hadamard(const GridField& a, const GridField& b);

/// Pointwise evaluation f(t, x_j) at the grid nodes.
template <class F>
GridField sample(F&& f, const PeriodicGrid& grid, double t) {
  std::vector<double> v(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) v[static_cast<std::size_t>(j)] = f(t, grid.x(j));
  return GridField(grid, std::move(v), t);
}

/// Deterministic smooth random field: Gaussian random Fourier modes with
/// |k| <= k_max, multiplied by the envelope exp(-x²/(2 width²)).
GridField band_limited_random(const PeriodicGrid& grid, std::uint64_t seed, double k_max, double width);

using Modes = std::vector<std::complex<double>>;

/// Real-to-complex transform (unnormalized) and its normalized inverse.
Modes to_modes(std::span<const double> values);
std::vector<double> from_modes(const Modes& modes, int n);

/// Fourier spectral derivative, order 1..4.  Odd orders drop the Nyquist mode.
GridField derivative(const GridField& f, int order);

/// Periodic trapezoid rule: spacing * sum(values).
double quadrature(const GridField& f);
/// quadrature(f * g) without forming the product field.
double inner(const GridField& f, const GridField& g);

/// order 0: L2; order 1: sqrt(|f|^2 + |f_x|^2); order 2 adds |f_xx|^2.
double sobolev_norm(const GridField& f, int order);

/// Spectral antiderivative F(x) = ∫_{-L}^{x} f, exact for band-limited f.
GridField cumulative_integral(const GridField& f);

/// CSV with header "x,value", 17 significant digits.
void write_csv(std::ostream& os, const GridField& f);
std::string to_csv(const GridField& f);

/// Binary checkpoint: int64 N, float64 L, float64 t, N x float64 values
/// (host byte order, little-endian on supported platforms).
void write_binary(std::ostream& os, const GridField& f);
GridField read_binary(std::istream& is);

}  // namespace breather
