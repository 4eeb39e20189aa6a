#include "breather/stability.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "breather/closed_form.hpp"
#include "breather/functionals.hpp"

namespace breather {

namespace {

constexpr double kMonitorInterval = 0.01;

GridField direction_field(const BreatherParams& p, Direction d, const PeriodicGrid& g, double t) {
  return sample([&](double tt, double x) { return eval_direction(p, d, {tt, x}); }, g, t);
}

GridField breather_field(const BreatherParams& p, const PeriodicGrid& g, double t) {
  return sample([&](double tt, double x) { return eval_breather(p, {tt, x}); }, g, t);
}

struct Residual {
  std::array<double, 2> f{};
  GridField z{PeriodicGrid(1.0, 16)};
};

Residual residual(const GridField& u, const BreatherParams& q, double t, GridField& b1, GridField& b2) {
  const PeriodicGrid& g = u.grid();
  b1 = direction_field(q, Direction::B1, g, t);
  b2 = direction_field(q, Direction::B2, g, t);
  GridField z = u - breather_field(q, g, t);
  return {{inner(z, b1), inner(z, b2)}, std::move(z)};
}

double max_abs(const std::array<double, 2>& a) { return std::max(std::abs(a[0]), std::abs(a[1])); }

double l2(const GridField& f) { return std::sqrt(inner(f, f)); }

ModulationState newton(const GridField& u, BreatherParams q, double t, const ModulationOptions& opts) {
  GridField b1(u.grid()), b2(u.grid());
  Residual r = residual(u, q, t, b1, b2);
  int it = 0;
  while (max_abs(r.f) > opts.newton_tol) {
    if (it == opts.max_iterations) {
      std::ostringstream os;
      os << "modulation did not converge in " << opts.max_iterations << " iterations (residuals " << r.f[0] << ", "
         << r.f[1] << ")";
      throw ModulationError(os.str(), r.f, it);
    }
    // J = -[[∫B1², ∫B1B2], [∫B1B2, ∫B2²]]
    const double g11 = inner(b1, b1), g12 = inner(b1, b2), g22 = inner(b2, b2);
    const double det = g11 * g22 - g12 * g12;
    if (std::abs(det) < 1e-10 * g11 * g22) throw ModulationError("singular modulation Jacobian", r.f, it);
    // Δ = -J⁻¹ F = Gram⁻¹ F
    q.x1 += (g22 * r.f[0] - g12 * r.f[1]) / det;
    q.x2 += (g11 * r.f[1] - g12 * r.f[0]) / det;
    if (!std::isfinite(q.x1) || !std::isfinite(q.x2)) throw ModulationError("modulation diverged", r.f, it);
    r = residual(u, q, t, b1, b2);
    ++it;
  }
  ModulationState s;
  s.x1 = q.x1;
  s.x2 = q.x2;
  s.z_h2 = sobolev_norm(r.z, 2);
  s.z = std::move(r.z);
  s.ortho_residuals = r.f;
  s.iterations = it;
  return s;
}

GridField unit_h2(GridField f) { return f * (1.0 / sobolev_norm(f, 2)); }

std::vector<double> centered_rate(const std::vector<double>& t, const std::vector<double>& x) {
  std::vector<double> r(x.size(), 0.0);
  const std::size_t n = x.size();
  if (n < 2) return r;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    r[i] = (x[hi] - x[lo]) / (t[hi] - t[lo]);
  }
  return r;
}

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

ModulationState modulate(const GridField& u, const BreatherParams& p_guess, double t, const ModulationOptions& opts) {
  p_guess.check_positive();
  if (!u.all_finite()) throw ModulationError("non-finite field", {0.0, 0.0}, 0);
  BreatherParams q = p_guess;
  int branch = 0;
  if (opts.resolve_branch) {
    // B(x1 + π/α) = -B: start from whichever translate is closer to u
    BreatherParams flipped = q;
    flipped.x1 += std::numbers::pi / q.alpha;
    if (l2(u - breather_field(flipped, u.grid(), t)) < l2(u - breather_field(q, u.grid(), t))) {
      q = flipped;
      branch = 1;
    }
  }
  ModulationState s = newton(u, q, t, opts);
  s.sign_branch = branch;
  return s;
}

std::string to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::Sech: return "sech";
    case PerturbationKind::SechCos3: return "sech_cos3";
    case PerturbationKind::Random: return "random";
  }
  return "?";
}

PerturbationKind perturbation_kind_from_string(const std::string& s) {
  for (auto k : kAllPerturbations)
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown perturbation '" + s + "' (expected sech, sech_cos3 or random)");
}

GridField make_perturbation(PerturbationKind kind, const PeriodicGrid& grid, std::uint64_t seed) {
  switch (kind) {
    case PerturbationKind::Sech:
      return unit_h2(sample([](double, double x) { return 1.0 / std::cosh(x); }, grid, 0));
    case PerturbationKind::SechCos3:
      return unit_h2(sample([](double, double x) { return std::cos(3.0 * x) / std::cosh(x); }, grid, 0));
    case PerturbationKind::Random:
      return unit_h2(band_limited_random(grid, seed, 3.0, 3.0));
  }
  throw std::invalid_argument("unknown perturbation kind");
}

IntegratorConfig stability_integrator(const BreatherParams& p, double dt, double t_end) {
  IntegratorConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.frame_speed = -p.gamma();
  c.monitor_stride = std::max(1, static_cast<int>(std::lround(kMonitorInterval / dt)));
  c.boundary_margin = 5.0 / p.beta;
  c.store_fields = false;
  return c;
}

StabilityRunReport stability_experiment(const BreatherParams& p, const GridField& perturbation, double eta,
                                        const IntegratorConfig& cfg, const StabilityOptions& opts) {
  p.check_positive();
  cfg.check();
  if (!(eta >= 0.0 && eta <= 0.05)) throw std::invalid_argument("eta must lie in [0, 0.05]");
  if (std::abs(sobolev_norm(perturbation, 2) - 1.0) > 1e-6)
    throw std::invalid_argument("perturbation must have unit H2 norm");

  const PeriodicGrid& g = perturbation.grid();
  StabilityRunReport rep;
  rep.params = p;
  rep.eta = eta;
  rep.frame_speed = cfg.frame_speed;

  GridField u0 = breather_field(p, g, 0.0) + perturbation * eta;
  u0.set_time(0.0);

  IntegratorConfig ic = cfg;
  ic.store_fields = false;
  BreatherParams warm = p;  // grid-frame shifts
  ModulationOptions mopts = opts.modulation;
  mopts.resolve_branch = false;  // warm starts stay on their branch
  int branch = 0;
  bool first = true;

  auto observe = [&](const GridField& u, long long) {
    const double t = u.time();
    ModulationState s;
    try {
      if (first) {
        ModulationOptions o0 = opts.modulation;
        s = modulate(u, warm, t, o0);
        branch = s.sign_branch;
        first = false;
      } else {
        s = modulate(u, warm, t, mopts);
      }
    } catch (const ModulationError& e) {
      throw EvolutionError(std::string("modulation failed: ") + e.what(), t);
    }
    warm.x1 = s.x1;
    warm.x2 = s.x2;
    const double shift = cfg.frame_speed * t;
    rep.times.push_back(t);
    rep.z_h2_series.push_back(s.z_h2);
    rep.x1_series.push_back(s.x1 - shift);
    rep.x2_series.push_back(s.x2 - shift);
    rep.sign_branch_series.push_back(branch);

    const LinearizedCoefficients c(warm, g, t);
    rep.h_u_series.push_back(lyapunov_h(u, p));
    rep.h_b_series.push_back(lyapunov_h(c.breather.b(), p));
    rep.q_z_series.push_back(quadratic_form(s.z, c));
    rep.n_z_series.push_back(remainder_n(s.z, c));
    rep.mass_pairing_series.push_back(inner(s.z, c.breather.b()));
    rep.ortho_series.push_back(max_abs(s.ortho_residuals));
  };

  try {
    evolve(u0, ic, observe);
  } catch (const EvolutionError& e) {
    rep.failed = true;
    rep.failure_time = e.time();
    rep.failure_reason = e.what();
  }

  for (double v : rep.z_h2_series) rep.sup_z_h2 = std::max(rep.sup_z_h2, v);
  if (eta > 0.0) rep.a0_observed = rep.sup_z_h2 / eta;
  const auto r1 = centered_rate(rep.times, rep.x1_series);
  const auto r2 = centered_rate(rep.times, rep.x2_series);
  for (std::size_t i = 0; i < r1.size(); ++i)
    rep.shift_rate_sup = std::max(rep.shift_rate_sup, std::abs(r1[i]) + std::abs(r2[i]));
  rep.stable = !rep.failed && (!rep.a0_observed || *rep.a0_observed < opts.stable_threshold);
  return rep;
}

AuditTable lyapunov_audit(const StabilityRunReport& run, const BreatherParams& p) {
  p.check_positive();
  AuditTable a;
  const std::size_t n = run.times.size();
  if (n == 0) return a;
  const double hu0 = run.h_u_series[0];
  const double hb0 = run.h_b_series[0];
  const double q0 = run.q_z_series[0];
  const double z0 = run.z_h2_series[0];
  const double hscale = std::max(std::abs(hu0), 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    AuditRow row;
    row.t = run.times[i];
    row.h_u = run.h_u_series[i];
    row.h_b = run.h_b_series[i];
    row.half_q = 0.5 * run.q_z_series[i];
    row.n_z = run.n_z_series[i];
    row.closure = std::abs(row.h_u - row.h_b - row.half_q - row.n_z) / hscale;
    row.flagged = row.closure > 1e-8;
    a.max_closure = std::max(a.max_closure, row.closure);
    a.h_u_drift = std::max(a.h_u_drift, std::abs(row.h_u - hu0) / hscale);
    a.h_b_drift = std::max(a.h_b_drift, std::abs(row.h_b - hb0) / hscale);
    const double zt = run.z_h2_series[i];
    const double denom = zt * zt * zt + z0 * z0 * z0;
    if (denom > 0.0) a.q_growth_k = std::max(a.q_growth_k, (run.q_z_series[i] - q0) / denom);
    a.ortho_max = std::max(a.ortho_max, run.ortho_series[i]);
    a.rows.push_back(row);
  }
  double pairing = 0.0;
  for (double v : run.mass_pairing_series) pairing = std::max(pairing, std::abs(v));
  if (run.eta > 0.0 && run.a0_observed) {
    const double a0 = *run.a0_observed;
    a.mass_pairing_k = pairing / (run.eta + run.eta * run.eta * a0 * a0);
    a.shift_rate_k = run.shift_rate_sup / (a0 * run.eta);
  }
  const bool flagged = std::any_of(a.rows.begin(), a.rows.end(), [](const AuditRow& r) { return r.flagged; });
  a.passed = !flagged && a.h_u_drift < 1e-8 && std::isfinite(a.q_growth_k) && a.mass_pairing_k < 100.0 &&
             a.shift_rate_k < 100.0;
  return a;
}

void write_stability_csv(std::ostream& os, const StabilityRunReport& r) {
  os << "t,z_h2,x1,x2,H_u,Q_z,N_z\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < r.times.size(); ++i)
    os << r.times[i] << ',' << r.z_h2_series[i] << ',' << r.x1_series[i] << ',' << r.x2_series[i] << ','
       << r.h_u_series[i] << ',' << r.q_z_series[i] << ',' << r.n_z_series[i] << '\n';
}

nlohmann::json to_json(const StabilityRunReport& r) {
  nlohmann::json j;
  j["params"] = to_json(r.params);
  j["eta"] = r.eta;
  j["sup_z_h2"] = r.sup_z_h2;
  j["a0_observed"] = opt_json(r.a0_observed);
  j["shift_rate_sup"] = r.shift_rate_sup;
  j["frame_speed"] = r.frame_speed;
  j["n_monitors"] = r.times.size();
  j["t_final"] = r.times.empty() ? 0.0 : r.times.back();
  j["failed"] = r.failed;
  j["failure_time"] = opt_json(r.failure_time);
  j["failure_reason"] = r.failure_reason;
  j["stable_flag"] = r.stable;
  return j;
}

nlohmann::json to_json(const AuditTable& a) {
  nlohmann::json j;
  j["max_closure"] = a.max_closure;
  j["h_u_drift"] = a.h_u_drift;
  j["h_b_drift"] = a.h_b_drift;
  j["q_growth_k"] = a.q_growth_k;
  j["mass_pairing_k"] = a.mass_pairing_k;
  j["shift_rate_k"] = a.shift_rate_k;
  j["ortho_max"] = a.ortho_max;
  j["flagged_rows"] = std::count_if(a.rows.begin(), a.rows.end(), [](const AuditRow& r) { return r.flagged; });
  j["passed"] = a.passed;
  return j;
}

}  // namespace breather
