#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "breather/grid.hpp"

namespace breather {

/// Integration of u_t + (u_xx + u³)_x = 0 in the frame ξ = x - c_f t, where
/// the equation becomes v_t = -v_ξξξ - (v³)_ξ + c_f v_ξ.  A structure moving
/// at velocity c_f stays put on the grid; for the breather c_f = -γ.
struct IntegratorConfig {
  double dt = 1e-4;
  double t_end = 1.0;
  double frame_speed = 0.0;
  /// Evaluate the cubic term on a 3N/2-point grid (the 2/3 rule by zero
  /// padding); otherwise it is evaluated on the grid itself.
  bool dealias = true;
  int monitor_stride = 100;
  /// Abort when the centroid of u² comes within this distance of ±L (0 = off).
  double boundary_margin = 0.0;
  /// Keep every monitored field in the trace.
  bool store_fields = true;

  /// Throws std::invalid_argument on dt <= 0, t_end <= 0 or stride < 1.
  void check() const;
  [[nodiscard]] long long n_steps() const;
};

/// Step failure; carries the time at which it was detected.
class EvolutionError : public std::runtime_error {
 public:
  EvolutionError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  [[nodiscard]] double time() const { return time_; }

 private:
  double time_;
};

/// dt exceeds the explicit budget of the nonlinear term.
class StabilityBudgetError : public EvolutionError {
 public:
  using EvolutionError::EvolutionError;
};

/// Nonlinear stability budget dt · k_max · 3|u|∞² <= kNonlinearBudget, where
/// k_max is the largest resolved wavenumber.  The dispersive
/// part is integrated exactly and puts no constraint on dt.
inline constexpr double kNonlinearBudget = 2.5;
double nonlinear_cfl(const GridField& u, const IntegratorConfig& cfg);

/// Fourth-order exponential time differencing Runge-Kutta (Cox-Matthews),
/// with phi-function coefficients from contour integrals (Kassam-Trefethen).
class Etdrk4Stepper {
 public:
  Etdrk4Stepper(const PeriodicGrid& grid, const IntegratorConfig& cfg);

  /// Advances the Fourier modes by one dt in place.
  void advance(Modes& v) const;
  [[nodiscard]] const PeriodicGrid& grid() const { return grid_; }
  [[nodiscard]] double dt() const { return dt_; }

 private:
  [[nodiscard]] Modes nonlinear(const Modes& v) const;

  PeriodicGrid grid_;
  int padded_;
  double dt_ = 0.0;
  Modes e_, e2_, q_, f1_, f2_, f3_;
  std::vector<double> k_;
  std::vector<double> mask_;
};

/// One step of size cfg.dt.  Throws EvolutionError on non-finite output or
/// |u|∞ > 1e6.
GridField step(const GridField& u, const IntegratorConfig& cfg);

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<GridField> fields;
  std::vector<double> mass_series;
  std::vector<double> energy_series;
  std::vector<double> f_series;
  std::vector<double> sup_series;
  /// max_t |X(t) - X(0)| / |X(0)| for X = M, E, F.
  std::array<double, 3> max_drift{};
  double frame_speed = 0.0;
  double dt = 0.0;
};

/// Called at every monitored time (t = 0, every monitor_stride steps and
/// t_end) with the current field.  Exceptions propagate out of evolve.
using EvolutionObserver = std::function<void(const GridField& u, long long step)>;

/// Repeated stepping with conservation monitoring.  Step failures are
/// rethrown as EvolutionError with the failure time.  Throws
/// StabilityBudgetError up front if nonlinear_cfl(u0) > kNonlinearBudget.
EvolutionTrace evolve(const GridField& u0, const IntegratorConfig& cfg, const EvolutionObserver& observer = {});

/// CSV with header t,mass,energy,f,sup_u (17 significant digits).
void write_trace_csv(std::ostream& os, const EvolutionTrace& tr);

/// Reflection x -> -x on the grid (node j -> N - j).
GridField reflect(const GridField& u);

}  // namespace breather
