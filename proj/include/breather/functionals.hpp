#pragma once

#include <array>
#include <optional>
#include <string>

#include "breather/closed_form.hpp"
#include "breather/grid.hpp"
#include "json.hpp"

namespace breather {

/// M[u] = 1/2 ∫u².
double mass(const GridField& u);
/// E[u] = 1/2 ∫u_x² - 1/4 ∫u⁴.
double energy(const GridField& u);
/// F[u] = 1/2 ∫u_xx² - 5/2 ∫u²u_x² + 1/4 ∫u⁶.
double f_functional(const GridField& u);
/// H[u] = F + 2(β²-α²)E + (α²+β²)²M.
double lyapunov_h(const GridField& u, const BreatherParams& p);

struct FunctionalReport {
  double mass = 0.0;
  double energy = 0.0;
  double f_value = 0.0;
  double h_value = 0.0;
  BreatherParams params_used;
};

FunctionalReport functional_report(const GridField& u, const BreatherParams& p);

/// B and its x-derivatives up to order 4 at the grid nodes, from jets.
struct BreatherSamples {
  std::array<GridField, 5> d;

  [[nodiscard]] const GridField& b() const { return d[0]; }
};

BreatherSamples sample_breather(const BreatherParams& p, const PeriodicGrid& grid, double t);

/// Coefficients of the linearized operator
///   L z = z_4x - 2 w z_xx + s² z + ∂_x(5B² z_x) + V z,
///   V  = 5B_x² + 10 B B_xx + 15/2 B⁴ - 6 w B²,
/// with w = β²-α², s = α²+β².  Built once per (p, grid, t).
struct LinearizedCoefficients {
  BreatherParams params;
  double time = 0.0;
  double w = 0.0;
  double s = 0.0;
  BreatherSamples breather;
  GridField five_b_sq;  // 5B²
  GridField potential;  // V

  LinearizedCoefficients(const BreatherParams& p, const PeriodicGrid& grid, double t);
};

GridField apply_L(const GridField& z, const LinearizedCoefficients& c);
GridField apply_L(const GridField& z, const BreatherParams& p, double t);

/// Q[z] from the expanded integral form
///   ∫z_xx² + 2w∫z_x² + s²∫z² - 5∫B²z_x² + ∫V z².
double quadratic_form(const GridField& z, const LinearizedCoefficients& c);
double quadratic_form(const GridField& z, const BreatherParams& p, double t);

/// Cubic and higher part of H[B+z] - H[B] (nine terms).
double remainder_n(const GridField& z, const LinearizedCoefficients& c);
double remainder_n(const GridField& z, const BreatherParams& p, double t);

enum class IdentityKind {
  Stationary,
  SecondOrder,
  FirstOrder,
  Mixed,
  MassProfile,
  WronskianClosedForm,
  SolitonOde,
};

std::string to_string(IdentityKind k);
IdentityKind identity_kind_from_string(const std::string& s);
inline constexpr std::array<IdentityKind, 7> kAllIdentities = {
    IdentityKind::Stationary,  IdentityKind::SecondOrder,         IdentityKind::FirstOrder, IdentityKind::Mixed,
    IdentityKind::MassProfile, IdentityKind::WronskianClosedForm, IdentityKind::SolitonOde};

struct IdentityOptions {
  /// Soliton used by SolitonOde.
  SolitonParams soliton{2.0, 0.0};
  /// Fault injection: replaces γ when forming the weights of G[B].  The weights
  /// are then rebuilt from (δ, γ) as β²-α² = -(δ+γ)/4 and α²+β² = (γ-δ)/2.
  std::optional<double> gamma_override;
};

/// Pointwise residual of the named identity on the grid.
GridField identity_residual(IdentityKind kind, const BreatherParams& p, const PeriodicGrid& grid, double t,
                            const IdentityOptions& opts = {});

struct ResidualSummary {
  IdentityKind kind = IdentityKind::Stationary;
  BreatherParams params;
  PeriodicGrid grid{1.0, 16};
  double time = 0.0;
  double sup_residual = 0.0;
  double l2_residual = 0.0;
};

ResidualSummary summarize_residual(IdentityKind kind, const BreatherParams& p, const PeriodicGrid& grid, double t,
                                   const IdentityOptions& opts = {});

/// Parameter derivatives of M[B] and E[B] on a fixed grid: central
/// differences with step 1e-4 and one Richardson level.
struct ParameterDerivatives {
  double dmass_dalpha = 0.0;
  double dmass_dbeta = 0.0;
  double denergy_dalpha = 0.0;
  double denergy_dbeta = 0.0;
};

ParameterDerivatives weinstein_derivatives(const BreatherParams& p, const PeriodicGrid& grid, double t);

nlohmann::json to_json(const BreatherParams& p);
nlohmann::json to_json(const PeriodicGrid& g);
nlohmann::json to_json(const FunctionalReport& r);
nlohmann::json to_json(const ResidualSummary& r);

}  // namespace breather
