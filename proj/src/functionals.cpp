#include "breather/functionals.hpp"

#include <cmath>
#include <stdexcept>

#include "breather/richardson.hpp"

namespace breather {

namespace {

double integrate(const GridField& g, auto&& integrand) {
  double s = 0.0;
  for (int j = 0; j < g.size(); ++j) s += integrand(static_cast<std::size_t>(j));
  return g.grid().spacing() * s;
}

GridField from_fn(const PeriodicGrid& grid, double t, auto&& fn) {
  std::vector<double> v(static_cast<std::size_t>(grid.size()));
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = fn(j);
  return GridField(grid, std::move(v), t);
}

GridField sample_direction(const BreatherParams& p, Direction d, const PeriodicGrid& grid, double t) {
  return sample([&](double tt, double x) { return eval_direction(p, d, {tt, x}); }, grid, t);
}

}  // namespace

double mass(const GridField& u) { return 0.5 * inner(u, u); }

double energy(const GridField& u) {
  const GridField ux = derivative(u, 1);
  return integrate(u, [&](std::size_t j) {
    const double v = u[j];
    return 0.5 * ux[j] * ux[j] - 0.25 * v * v * v * v;
  });
}

double f_functional(const GridField& u) {
  const GridField ux = derivative(u, 1);
  const GridField uxx = derivative(u, 2);
  return integrate(u, [&](std::size_t j) {
    const double v2 = u[j] * u[j];
    return 0.5 * uxx[j] * uxx[j] - 2.5 * v2 * ux[j] * ux[j] + 0.25 * v2 * v2 * v2;
  });
}

FunctionalReport functional_report(const GridField& u, const BreatherParams& p) {
  FunctionalReport r;
  r.mass = mass(u);
  r.energy = energy(u);
  r.f_value = f_functional(u);
  const double s = p.scaling_weight();
  r.h_value = r.f_value + 2.0 * p.dispersion_weight() * r.energy + s * s * r.mass;
  r.params_used = p;
  return r;
}

double lyapunov_h(const GridField& u, const BreatherParams& p) { return functional_report(u, p).h_value; }

BreatherSamples sample_breather(const BreatherParams& p, const PeriodicGrid& grid, double t) {
  const int n = grid.size();
  std::array<std::vector<double>, 5> v;
  for (auto& a : v) a.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto d = breather_x_derivatives<4>(p, {t, grid.x(j)});
    for (int k = 0; k < 5; ++k) v[k][static_cast<std::size_t>(j)] = d[k];
  }
  return BreatherSamples{{GridField(grid, std::move(v[0]), t), GridField(grid, std::move(v[1]), t),
                          GridField(grid, std::move(v[2]), t), GridField(grid, std::move(v[3]), t),
                          GridField(grid, std::move(v[4]), t)}};
}

LinearizedCoefficients::LinearizedCoefficients(const BreatherParams& p, const PeriodicGrid& grid, double t)
    : params(p),
      time(t),
      w(p.dispersion_weight()),
      s(p.scaling_weight()),
      breather(sample_breather(p, grid, t)),
      five_b_sq(grid, t),
      potential(grid, t) {
  const auto& d = breather.d;
  for (std::size_t j = 0; j < static_cast<std::size_t>(grid.size()); ++j) {
    const double b = d[0][j];
    const double bx = d[1][j];
    const double b2 = b * b;
    five_b_sq[j] = 5.0 * b2;
    potential[j] = 5.0 * bx * bx + 10.0 * b * d[2][j] + 7.5 * b2 * b2 - 6.0 * w * b2;
  }
}

GridField apply_L(const GridField& z, const LinearizedCoefficients& c) {
  if (!(z.grid() == c.potential.grid())) throw std::invalid_argument("apply_L: grid mismatch");
  // 5B²z_xx + 10BB_x z_x is applied as the divergence ∂_x(5B² z_x): equal in
  // the continuum, and discretely self-adjoint with the spectral ∂_x.
  const GridField flux = hadamard(c.five_b_sq, derivative(z, 1));
  const GridField div = derivative(flux, 1);
  const GridField zxx = derivative(z, 2);
  const GridField z4 = derivative(z, 4);
  const double s2 = c.s * c.s;
  return from_fn(z.grid(), z.time(), [&](std::size_t j) {
    return z4[j] - 2.0 * c.w * zxx[j] + s2 * z[j] + div[j] + c.potential[j] * z[j];
  });
}

GridField apply_L(const GridField& z, const BreatherParams& p, double t) {
  return apply_L(z, LinearizedCoefficients(p, z.grid(), t));
}

double quadratic_form(const GridField& z, const LinearizedCoefficients& c) {
  if (!(z.grid() == c.potential.grid())) throw std::invalid_argument("quadratic_form: grid mismatch");
  const GridField zx = derivative(z, 1);
  const GridField zxx = derivative(z, 2);
  const double s2 = c.s * c.s;
  return integrate(z, [&](std::size_t j) {
    const double z2 = z[j] * z[j];
    const double zx2 = zx[j] * zx[j];
    return zxx[j] * zxx[j] + 2.0 * c.w * zx2 + s2 * z2 - c.five_b_sq[j] * zx2 + c.potential[j] * z2;
  });
}

double quadratic_form(const GridField& z, const BreatherParams& p, double t) {
  return quadratic_form(z, LinearizedCoefficients(p, z.grid(), t));
}

double remainder_n(const GridField& z, const LinearizedCoefficients& c) {
  if (!(z.grid() == c.potential.grid())) throw std::invalid_argument("remainder_n: grid mismatch");
  const GridField zx = derivative(z, 1);
  const auto& b = c.breather.d[0];
  const auto& bxx = c.breather.d[2];
  const double w = c.w;
  return integrate(z, [&](std::size_t j) {
    const double zz = z[j];
    const double z2 = zz * zz;
    const double z3 = z2 * zz;
    const double bb = b[j];
    const double zx2 = zx[j] * zx[j];
    return 5.0 * bb * bb * bb * z3 - 2.0 * w * bb * z3 + (5.0 / 3.0) * bxx[j] * z3 - 5.0 * bb * zx2 * zz +
           3.75 * bb * bb * z2 * z2 - 0.5 * w * z2 * z2 - 2.5 * z2 * zx2 + 1.5 * bb * z3 * z2 +
           0.25 * z3 * z3;
  });
}

double remainder_n(const GridField& z, const BreatherParams& p, double t) {
  return remainder_n(z, LinearizedCoefficients(p, z.grid(), t));
}

std::string to_string(IdentityKind k) {
  switch (k) {
    case IdentityKind::Stationary: return "Stationary";
    case IdentityKind::SecondOrder: return "SecondOrder";
    case IdentityKind::FirstOrder: return "FirstOrder";
    case IdentityKind::Mixed: return "Mixed";
    case IdentityKind::MassProfile: return "MassProfile";
    case IdentityKind::WronskianClosedForm: return "WronskianClosedForm";
    case IdentityKind::SolitonOde: return "SolitonOde";
  }
  throw std::invalid_argument("unknown identity kind");
}

IdentityKind identity_kind_from_string(const std::string& s) {
  for (auto k : kAllIdentities)
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown identity kind '" + s + "'");
}

GridField identity_residual(IdentityKind kind, const BreatherParams& p, const PeriodicGrid& grid, double t,
                            const IdentityOptions& opts) {
  const auto node = [&](std::size_t j) { return PointQuery{t, grid.x(static_cast<int>(j))}; };
  switch (kind) {
    case IdentityKind::Stationary: {
      double w = p.dispersion_weight();
      double s = p.scaling_weight();
      if (opts.gamma_override) {
        const double dl = p.delta();
        const double gm = *opts.gamma_override;
        w = -(dl + gm) / 4.0;
        s = (gm - dl) / 2.0;
      }
      const BreatherSamples bs = sample_breather(p, grid, t);
      const auto& d = bs.d;
      return from_fn(grid, t, [&](std::size_t j) {
        const double b = d[0][j];
        const double b2 = b * b;
        return d[4][j] - 2.0 * w * (d[2][j] + b2 * b) + s * s * b + 5.0 * d[1][j] * d[1][j] * b +
               5.0 * b2 * d[2][j] + 1.5 * b2 * b2 * b;
      });
    }
    case IdentityKind::SecondOrder: {
      return from_fn(grid, t, [&](std::size_t j) {
        const auto d = breather_x_derivatives<2>(p, node(j));
        return d[2] + tilde_bt(p, node(j)) + d[0] * d[0] * d[0];
      });
    }
    case IdentityKind::FirstOrder: {
      return from_fn(grid, t, [&](std::size_t j) {
        const auto d = breather_x_derivatives<1>(p, node(j));
        const double b2 = d[0] * d[0];
        return d[1] * d[1] + 0.5 * b2 * b2 + 2.0 * d[0] * tilde_bt(p, node(j)) - 2.0 * mass_profile_t(p, node(j));
      });
    }
    case IdentityKind::Mixed: {
      const GridField b1 = sample_direction(p, Direction::B1, grid, t);
      const GridField b2 = sample_direction(p, Direction::B2, grid, t);
      const GridField bxt = derivative(p.delta() * b1 + p.gamma() * b2, 1);
      const double w = p.dispersion_weight();
      const double s = p.scaling_weight();
      return from_fn(grid, t, [&](std::size_t j) {
        const double b = eval_breather(p, node(j));
        return bxt[j] + 2.0 * mass_profile_t(p, node(j)) * b - 2.0 * w * tilde_bt(p, node(j)) - s * s * b;
      });
    }
    case IdentityKind::MassProfile: {
      const GridField b = sample_direction(p, Direction::B, grid, t);
      const GridField cum = cumulative_integral(0.5 * hadamard(b, b));
      return from_fn(grid, t, [&](std::size_t j) {
        return cum[j] - eval_direction(p, Direction::MassProfile, node(j));
      });
    }
    case IdentityKind::WronskianClosedForm: {
      const GridField b1 = sample_direction(p, Direction::B1, grid, t);
      const GridField b2 = sample_direction(p, Direction::B2, grid, t);
      const GridField b1x = derivative(b1, 1);
      const GridField b2x = derivative(b2, 1);
      return from_fn(grid, t, [&](std::size_t j) {
        return b1[j] * b2x[j] - b2[j] * b1x[j] - wronskian_closed_form(p, node(j));
      });
    }
    case IdentityKind::SolitonOde: {
      const SolitonParams& sp = opts.soliton;
      sp.check();
      const GridField q = sample([&](double tt, double x) { return eval_soliton(sp, {tt, x}); }, grid, t);
      const GridField qxx = derivative(q, 2);
      return from_fn(grid, t, [&](std::size_t j) { return qxx[j] - sp.c * q[j] + q[j] * q[j] * q[j]; });
    }
  }
  throw std::invalid_argument("identity_residual: unknown kind");
}

ResidualSummary summarize_residual(IdentityKind kind, const BreatherParams& p, const PeriodicGrid& grid, double t,
                                   const IdentityOptions& opts) {
  const GridField r = identity_residual(kind, p, grid, t, opts);
  ResidualSummary s;
  s.kind = kind;
  s.params = p;
  s.grid = grid;
  s.time = t;
  s.sup_residual = r.sup_norm();
  s.l2_residual = sobolev_norm(r, 0);
  return s;
}

ParameterDerivatives weinstein_derivatives(const BreatherParams& p, const PeriodicGrid& grid, double t) {
  constexpr double kStep = 1e-4;
  auto field = [&](double a, double b) {
    return sample([&](double tt, double x) { return eval_breather({a, b, p.x1, p.x2}, {tt, x}); }, grid, t);
  };
  ParameterDerivatives r;
  r.dmass_dalpha = richardson_derivative([&](double a) { return mass(field(a, p.beta)); }, p.alpha, kStep, 1);
  r.dmass_dbeta = richardson_derivative([&](double b) { return mass(field(p.alpha, b)); }, p.beta, kStep, 1);
  r.denergy_dalpha = richardson_derivative([&](double a) { return energy(field(a, p.beta)); }, p.alpha, kStep, 1);
  r.denergy_dbeta = richardson_derivative([&](double b) { return energy(field(p.alpha, b)); }, p.beta, kStep, 1);
  return r;
}

nlohmann::json to_json(const BreatherParams& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"x1", p.x1}, {"x2", p.x2}};
}

nlohmann::json to_json(const PeriodicGrid& g) { return {{"half_length", g.half_length()}, {"n_points", g.size()}}; }

nlohmann::json to_json(const FunctionalReport& r) {
  return {{"mass", r.mass}, {"energy", r.energy}, {"f_value", r.f_value}, {"h_value", r.h_value},
          {"params_used", to_json(r.params_used)}};
}

nlohmann::json to_json(const ResidualSummary& r) {
  return {{"kind", to_string(r.kind)},       {"params", to_json(r.params)},
          {"grid", to_json(r.grid)},         {"t", r.time},
          {"sup_residual", r.sup_residual}, {"l2_residual", r.l2_residual}};
}

}  // namespace breather
