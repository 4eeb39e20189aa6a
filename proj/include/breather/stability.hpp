#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "breather/evolution.hpp"
#include "breather/grid.hpp"
#include "breather/params.hpp"
#include "json.hpp"

namespace breather {

struct ModulationOptions {
  /// Absolute tolerance on |∫zB1| and |∫zB2|.
  double newton_tol = 1e-10;
  int max_iterations = 50;
  /// Compare the guess with its half-period translate x1 + π/α.
  bool resolve_branch = true;
};

/// u = B(t; x1, x2) + z with ∫zB1 = ∫zB2 = 0.  Shifts are in the
/// coordinates of the grid u lives on.
struct ModulationState {
  double x1 = 0.0;
  double x2 = 0.0;
  GridField z{PeriodicGrid(1.0, 16)};
  double z_h2 = 0.0;
  std::array<double, 2> ortho_residuals{};
  /// 1 when the half-period branch (B -> -B) was taken relative to the guess.
  int sign_branch = 0;
  int iterations = 0;
};

class ModulationError : public std::runtime_error {
 public:
  ModulationError(const std::string& what, std::array<double, 2> residuals, int iterations)
      : std::runtime_error(what), residuals_(residuals), iterations_(iterations) {}
  [[nodiscard]] const std::array<double, 2>& residuals() const { return residuals_; }
  [[nodiscard]] int iterations() const { return iterations_; }

 private:
  std::array<double, 2> residuals_;
  int iterations_;
};

/// Newton iteration on (x1, x2) -> (∫(u-B)B1, ∫(u-B)B2) with the Jacobian
/// -Gram(B1, B2).  Only the shifts of p_guess are refined.  Expects u within
/// about 0.1 |B|_{H²} of a breather translate.
ModulationState modulate(const GridField& u, const BreatherParams& p_guess, double t,
                         const ModulationOptions& opts = {});

enum class PerturbationKind { Sech, SechCos3, Random };

std::string to_string(PerturbationKind k);
PerturbationKind perturbation_kind_from_string(const std::string& s);
inline constexpr std::array<PerturbationKind, 3> kAllPerturbations = {PerturbationKind::Sech, PerturbationKind::SechCos3,
                                                                        PerturbationKind::Random};

/// Default perturbation with unit H² norm.  The random field uses a fixed
/// seed unless one is given.
GridField make_perturbation(PerturbationKind kind, const PeriodicGrid& grid, std::uint64_t seed = 0x5eed);

struct StabilityOptions {
  ModulationOptions modulation;
  /// STABLE requires a0_observed below this.
  double stable_threshold = 100.0;
};

/// Integrator settings for a stability run: co-moving frame -γ, monitors
/// every 0.01 time units, domain-exit margin 5/β.
IntegratorConfig stability_integrator(const BreatherParams& p, double dt, double t_end);

struct StabilityRunReport {
  BreatherParams params;
  double eta = 0.0;
  double sup_z_h2 = 0.0;
  /// sup_z_h2 / eta; empty when eta = 0.
  std::optional<double> a0_observed;
  double shift_rate_sup = 0.0;
  double frame_speed = 0.0;
  std::vector<double> times;
  std::vector<double> z_h2_series;
  /// Lab-frame shifts.
  std::vector<double> x1_series;
  std::vector<double> x2_series;
  std::vector<int> sign_branch_series;
  // checkpoint quantities for the audit
  std::vector<double> h_u_series;
  std::vector<double> h_b_series;
  std::vector<double> q_z_series;
  std::vector<double> n_z_series;
  std::vector<double> mass_pairing_series;  // ∫Bz
  std::vector<double> ortho_series;         // max(|∫zB1|, |∫zB2|)
  bool failed = false;
  std::optional<double> failure_time;
  std::string failure_reason;
  bool stable = false;
};

/// Evolves u0 = B(0) + eta · perturbation and modulates at every monitor
/// time, warm-started from the previous shifts.  A modulation or step
/// failure truncates the report and is recorded with its time.
/// Throws std::invalid_argument unless |perturbation|_{H²} = 1 and
/// 0 <= eta <= 0.05.
StabilityRunReport stability_experiment(const BreatherParams& p, const GridField& perturbation, double eta,
                                        const IntegratorConfig& cfg, const StabilityOptions& opts = {});

struct AuditRow {
  double t = 0.0;
  double h_u = 0.0;
  double h_b = 0.0;
  double half_q = 0.0;
  double n_z = 0.0;
  /// |H[u] - H[B] - Q/2 - N| / |H[u]|.
  double closure = 0.0;
  bool flagged = false;
};

struct AuditTable {
  std::vector<AuditRow> rows;
  double max_closure = 0.0;
  double h_u_drift = 0.0;  // max |H[u](t) - H[u](0)| / |H[u](0)|
  double h_b_drift = 0.0;
  /// max over checkpoints of (Q(t) - Q(0)) / (|z(t)|³ + |z(0)|³), H² norms.
  double q_growth_k = 0.0;
  /// max |∫Bz| / (η + η² a0²).
  double mass_pairing_k = 0.0;
  /// shift_rate_sup / (a0 η).
  double shift_rate_k = 0.0;
  double ortho_max = 0.0;
  bool passed = false;
};

/// Tolerances: closure and H[u] drift 1e-8 relative.  passed also requires
/// every K finite and the mass-pairing and shift-rate constants below 100.
AuditTable lyapunov_audit(const StabilityRunReport& run, const BreatherParams& p);

/// CSV header t,z_h2,x1,x2,H_u,Q_z,N_z (17 significant digits).
void write_stability_csv(std::ostream& os, const StabilityRunReport& r);

nlohmann::json to_json(const StabilityRunReport& r);
nlohmann::json to_json(const AuditTable& a);

}  // namespace breather
