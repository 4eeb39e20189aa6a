#include "breather/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace breather {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// One pair of FFTW plans per size.  Planning is serialized; the plans are
/// created unaligned so they can be executed concurrently on any buffers
/// through the new-array interface.
struct PlanPair {
  fftw_plan forward;
  fftw_plan backward;
};

const PlanPair& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> real(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> cplx(static_cast<std::size_t>(n / 2 + 1));
  auto* cp = reinterpret_cast<fftw_complex*>(cplx.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair pp{fftw_plan_dft_r2c_1d(n, real.data(), cp, flags), fftw_plan_dft_c2r_1d(n, cp, real.data(), flags)};
  if (pp.forward == nullptr || pp.backward == nullptr) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(n, pp).first->second;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PeriodicGrid::PeriodicGrid(double half_length, int n_points) : half_length_(half_length), n_(n_points) {
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw std::invalid_argument("grid half_length must be positive and finite");
  if (n_points < 16 || !is_power_of_two(n_points))
    throw std::invalid_argument("grid n_points must be a power of two >= 16, got " + std::to_string(n_points));
}

double PeriodicGrid::wavenumber(int j) const { return std::numbers::pi * j / half_length_; }

PeriodicGrid default_grid(double beta, int n_points) {
  return PeriodicGrid(30.0 / std::min(beta, 1.0), n_points);
}

GridField::GridField(PeriodicGrid grid, std::vector<double> values, double time_tag)
    : grid_(grid), values_(std::move(values)), time_(time_tag) {
  if (values_.size() != static_cast<std::size_t>(grid_.size()))
    throw std::invalid_argument("GridField: value count does not match grid size");
}

GridField::GridField(PeriodicGrid grid, double time_tag)
    : grid_(grid), values_(static_cast<std::size_t>(grid.size()), 0.0), time_(time_tag) {}

double GridField::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridField::boundary_magnitude() const { return std::max(std::abs(values_.front()), std::abs(values_.back())); }

bool GridField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

GridField& GridField::operator+=(const GridField& o) {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("GridField: grid mismatch");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
  return *this;
}

GridField& GridField::operator-=(const GridField& o) {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("GridField: grid mismatch");
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(GridField a, double s) { return a *= s; }
GridField operator*(double s, GridField a) { return a *= s; }

GridField hadamard(const GridField& a, const GridField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("GridField: grid mismatch");
  GridField r = a;
  for (std::size_t j = 0; j < r.values().size(); ++j) r[j] *= b[j];
  return r;
}

Modes to_modes(std::span<const double> values) {
  const int n = static_cast<int>(values.size());
  const PlanPair& pp = plans_for(n);
  Modes out(static_cast<std::size_t>(n / 2 + 1));
  // r2c leaves its input intact
  fftw_execute_dft_r2c(pp.forward, const_cast<double*>(values.data()), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> from_modes(const Modes& modes, int n) {
  if (modes.size() != static_cast<std::size_t>(n / 2 + 1)) throw std::invalid_argument("from_modes: size mismatch");
  const PlanPair& pp = plans_for(n);
  Modes work = modes;  // c2r destroys its input
  std::vector<double> out(static_cast<std::size_t>(n));
  fftw_execute_dft_c2r(pp.backward, reinterpret_cast<fftw_complex*>(work.data()), out.data());
  const double inv = 1.0 / n;
  for (double& v : out) v *= inv;
  return out;
}

GridField derivative(const GridField& f, int order) {
  if (order < 1 || order > 4) throw std::invalid_argument("derivative order must be in 1..4");
  const PeriodicGrid& g = f.grid();
  Modes m = to_modes(f.span());
  const int nyq = g.size() / 2;
  for (int j = 0; j <= nyq; ++j) {
    const double k = g.wavenumber(j);
    std::complex<double> ik{0.0, k};
    std::complex<double> factor = 1.0;
    for (int o = 0; o < order; ++o) factor *= ik;
    m[static_cast<std::size_t>(j)] *= factor;
  }
  if (order % 2 == 1) m[static_cast<std::size_t>(nyq)] = 0.0;
  return GridField(g, from_modes(m, g.size()), f.time());
}

double quadrature(const GridField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return f.grid().spacing() * s;
}

double inner(const GridField& f, const GridField& g) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("inner: grid mismatch");
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) s += f[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
  return f.grid().spacing() * s;
}

double sobolev_norm(const GridField& f, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("sobolev order must be in 0..2");
  double sq = inner(f, f);
  if (order >= 1) {
    const GridField fx = derivative(f, 1);
    sq += inner(fx, fx);
  }
  if (order >= 2) {
    const GridField fxx = derivative(f, 2);
    sq += inner(fxx, fxx);
  }
  return std::sqrt(sq);
}

GridField cumulative_integral(const GridField& f) {
  const PeriodicGrid& g = f.grid();
  const int n = g.size();
  Modes m = to_modes(f.span());
  const double mean = m[0].real() / n;
  m[0] = 0.0;
  m[static_cast<std::size_t>(n / 2)] = 0.0;
  for (int j = 1; j < n / 2; ++j) m[static_cast<std::size_t>(j)] /= std::complex<double>(0.0, g.wavenumber(j));
  std::vector<double> periodic = from_modes(m, n);
  const double base = periodic[0];
  for (int j = 0; j < n; ++j) {
    auto& v = periodic[static_cast<std::size_t>(j)];
    v = v - base + mean * (g.x(j) + g.half_length());
  }
  return GridField(g, std::move(periodic), f.time());
}

GridField band_limited_random(const PeriodicGrid& grid, std::uint64_t seed, double k_max, double width) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = grid.size();
  Modes m(static_cast<std::size_t>(n / 2 + 1), 0.0);
  for (int j = 1; j < n / 2 && grid.wavenumber(j) <= k_max; ++j) m[static_cast<std::size_t>(j)] = {normal(rng), normal(rng)};
  std::vector<double> v = from_modes(m, n);
  for (int j = 0; j < n; ++j) {
    const double x = grid.x(j);
    v[static_cast<std::size_t>(j)] *= std::exp(-0.5 * x * x / (width * width));
  }
  return GridField(grid, std::move(v), 0.0);
}

void write_csv(std::ostream& os, const GridField& f) {
  os << "x,value\n";
  for (int j = 0; j < f.size(); ++j) os << fmt17(f.grid().x(j)) << ',' << fmt17(f[static_cast<std::size_t>(j)]) << '\n';
}

std::string to_csv(const GridField& f) {
  std::ostringstream os;
  write_csv(os, f);
  return os.str();
}

void write_binary(std::ostream& os, const GridField& f) {
  const std::int64_t n = f.size();
  const double l = f.grid().half_length();
  const double t = f.time();
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&l), sizeof l);
  os.write(reinterpret_cast<const char*>(&t), sizeof t);
  os.write(reinterpret_cast<const char*>(f.values().data()), static_cast<std::streamsize>(sizeof(double) * f.values().size()));
  if (!os) throw std::runtime_error("write_binary: stream failure");
}

GridField read_binary(std::istream& is) {
  std::int64_t n = 0;
  double l = 0.0;
  double t = 0.0;
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&l), sizeof l);
  is.read(reinterpret_cast<char*>(&t), sizeof t);
  if (!is || n < 16 || n > (std::int64_t{1} << 26)) throw std::runtime_error("read_binary: malformed header");
  PeriodicGrid grid(l, static_cast<int>(n));
  std::vector<double> v(static_cast<std::size_t>(n));
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * v.size()));
  if (!is) throw std::runtime_error("read_binary: truncated payload");
  return GridField(grid, std::move(v), t);
}

}  // namespace breather
