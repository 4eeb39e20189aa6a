#include "breather/evolution.hpp"

#include <cmath>
#include <complex>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "breather/functionals.hpp"

namespace breather {

namespace {

constexpr double kBlowUp = 1e6;
constexpr int kContourPoints = 32;

using cplx = std::complex<double>;

/// Largest mode index that enters the cubic term (the Nyquist mode is dropped).
int active_modes(const PeriodicGrid& g) { return g.size() / 2 - 1; }

void check_field(const GridField& u, double t) {
  if (!u.all_finite()) throw EvolutionError("non-finite field", t);
  if (u.sup_norm() > kBlowUp) throw EvolutionError("blow-up: |u| exceeds 1e6", t);
}

/// Centroid of u² on [-L, L).
double centroid(const GridField& u) {
  const auto& g = u.grid();
  double num = 0.0, den = 0.0;
  for (int j = 0; j < g.size(); ++j) {
    const double w = u[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(j)];
    num += g.x(j) * w;
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

double rel_drift(double x, double x0) {
  const double scale = std::abs(x0) > 1e-300 ? std::abs(x0) : 1.0;
  return std::abs(x - x0) / scale;
}

}  // namespace

void IntegratorConfig::check() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be positive");
  if (monitor_stride < 1) throw std::invalid_argument("monitor_stride must be >= 1");
  if (boundary_margin < 0.0) throw std::invalid_argument("boundary_margin must be >= 0");
  if (!std::isfinite(frame_speed)) throw std::invalid_argument("frame_speed must be finite");
}

long long IntegratorConfig::n_steps() const {
  const double r = t_end / dt;
  const auto n = static_cast<long long>(std::llround(r));
  if (n >= 1 && std::abs(static_cast<double>(n) - r) <= 1e-9 * r) return n;
  return static_cast<long long>(std::ceil(r));
}

double nonlinear_cfl(const GridField& u, const IntegratorConfig& cfg) {
  const double kmax = u.grid().wavenumber(active_modes(u.grid()));
  const double s = u.sup_norm();
  return cfg.dt * kmax * 3.0 * s * s;
}

Etdrk4Stepper::Etdrk4Stepper(const PeriodicGrid& grid, const IntegratorConfig& cfg)
    : grid_(grid), padded_(cfg.dealias ? 3 * grid.size() / 2 : grid.size()) {
  cfg.check();
  dt_ = cfg.t_end / static_cast<double>(cfg.n_steps());
  const int m = grid.n_modes();
  const auto um = static_cast<std::size_t>(m);
  e_.resize(um);
  e2_.resize(um);
  q_.resize(um);
  f1_.resize(um);
  f2_.resize(um);
  f3_.resize(um);
  k_.resize(um);
  mask_.assign(um, 0.0);
  const int kept = active_modes(grid);
  const double h = dt_;
  for (int j = 0; j < m; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const double k = grid.wavenumber(j);
    k_[uj] = k;
    if (j <= kept) mask_[uj] = 1.0;
    // symbol of -∂³ + c ∂ is i k³ + i c k
    const cplx lin(0.0, k * k * k + cfg.frame_speed * k);
    e_[uj] = std::exp(h * lin);
    e2_[uj] = std::exp(0.5 * h * lin);
    cplx q = 0.0, a = 0.0, b = 0.0, c = 0.0;
    for (int r = 0; r < kContourPoints; ++r) {
      const cplx root = std::exp(cplx(0.0, std::numbers::pi * (r + 0.5) / (0.5 * kContourPoints)));
      const cplx z = h * lin + root;
      const cplx ez = std::exp(z);
      const cplx z3 = z * z * z;
      q += (std::exp(0.5 * z) - 1.0) / z;
      a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      b += (2.0 + z + ez * (-2.0 + z)) / z3;
      c += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    const double inv = h / kContourPoints;
    q_[uj] = q * inv;
    f1_[uj] = a * inv;
    f2_[uj] = b * inv;
    f3_[uj] = c * inv;
  }
}

Modes Etdrk4Stepper::nonlinear(const Modes& v) const {
  // u³ on a grid of 3N/2 points is free of aliasing in the lowest N/2 modes
  const int n = grid_.size();
  const double up = static_cast<double>(padded_) / n;
  Modes w(static_cast<std::size_t>(padded_ / 2 + 1), 0.0);
  for (std::size_t j = 0; j < v.size(); ++j) w[j] = v[j] * (mask_[j] * up);
  std::vector<double> u = from_modes(w, padded_);
  for (double& x : u) x = x * x * x;
  const Modes cubed = to_modes(u);
  Modes out(v.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = cubed[j] * cplx(0.0, -k_[j]) * (mask_[j] / up);
  return out;
}

void Etdrk4Stepper::advance(Modes& v) const {
  const std::size_t m = v.size();
  const Modes nv = nonlinear(v);
  Modes a(m), b(m), c(m);
  for (std::size_t j = 0; j < m; ++j) a[j] = e2_[j] * v[j] + q_[j] * nv[j];
  const Modes na = nonlinear(a);
  for (std::size_t j = 0; j < m; ++j) b[j] = e2_[j] * v[j] + q_[j] * na[j];
  const Modes nb = nonlinear(b);
  for (std::size_t j = 0; j < m; ++j) c[j] = e2_[j] * a[j] + q_[j] * (2.0 * nb[j] - nv[j]);
  const Modes nc = nonlinear(c);
  for (std::size_t j = 0; j < m; ++j)
    v[j] = e_[j] * v[j] + f1_[j] * nv[j] + 2.0 * f2_[j] * (na[j] + nb[j]) + f3_[j] * nc[j];
  // the Nyquist mode of a real field carries no derivative information
  v[m - 1] = 0.0;
}

GridField step(const GridField& u, const IntegratorConfig& cfg) {
  IntegratorConfig one = cfg;
  one.t_end = cfg.dt;
  Etdrk4Stepper st(u.grid(), one);
  Modes v = to_modes(u.span());
  st.advance(v);
  GridField out(u.grid(), from_modes(v, u.size()), u.time() + cfg.dt);
  check_field(out, out.time());
  return out;
}

EvolutionTrace evolve(const GridField& u0, const IntegratorConfig& cfg, const EvolutionObserver& observer) {
  cfg.check();
  check_field(u0, u0.time());
  const double cfl = nonlinear_cfl(u0, cfg);
  if (cfl > kNonlinearBudget) {
    std::ostringstream os;
    os << "dt too large: nonlinear CFL number " << cfl << " exceeds " << kNonlinearBudget;
    throw StabilityBudgetError(os.str(), u0.time());
  }
  const PeriodicGrid& g = u0.grid();
  const Etdrk4Stepper st(g, cfg);
  const long long n_steps = cfg.n_steps();
  const double t0 = u0.time();

  EvolutionTrace tr;
  tr.frame_speed = cfg.frame_speed;
  tr.dt = st.dt();

  auto record = [&](const GridField& u, long long k) {
    tr.times.push_back(u.time());
    tr.mass_series.push_back(mass(u));
    tr.energy_series.push_back(energy(u));
    tr.f_series.push_back(f_functional(u));
    tr.sup_series.push_back(u.sup_norm());
    if (cfg.store_fields) tr.fields.push_back(u);
    const std::size_t last = tr.times.size() - 1;
    tr.max_drift[0] = std::max(tr.max_drift[0], rel_drift(tr.mass_series[last], tr.mass_series[0]));
    tr.max_drift[1] = std::max(tr.max_drift[1], rel_drift(tr.energy_series[last], tr.energy_series[0]));
    tr.max_drift[2] = std::max(tr.max_drift[2], rel_drift(tr.f_series[last], tr.f_series[0]));
    if (observer) observer(u, k);
  };

  record(u0, 0);
  Modes v = to_modes(u0.span());
  for (long long k = 1; k <= n_steps; ++k) {
    const double t = t0 + static_cast<double>(k) * st.dt();
    st.advance(v);
    if (k % cfg.monitor_stride != 0 && k != n_steps) {
      // cheap guard between monitors
      for (const auto& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw EvolutionError("non-finite field", t);
      continue;
    }
    GridField u(g, from_modes(v, g.size()), t);
    check_field(u, t);
    if (cfg.boundary_margin > 0.0) {
      const double xc = centroid(u);
      if (g.half_length() - std::abs(xc) < cfg.boundary_margin) {
        std::ostringstream os;
        os << "structure left the domain: centroid " << xc << " within " << cfg.boundary_margin << " of the boundary";
        throw EvolutionError(os.str(), t);
      }
    }
    record(u, k);
  }
  return tr;
}

void write_trace_csv(std::ostream& os, const EvolutionTrace& tr) {
  os << "t,mass,energy,f,sup_u\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    os << tr.times[i] << ',' << tr.mass_series[i] << ',' << tr.energy_series[i] << ',' << tr.f_series[i] << ','
       << tr.sup_series[i] << '\n';
}

GridField reflect(const GridField& u) {
  const int n = u.size();
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = u[static_cast<std::size_t>((n - j) % n)];
  return GridField(u.grid(), std::move(v), u.time());
}

}  // namespace breather
