#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "breather/functionals.hpp"
#include "breather/grid.hpp"
#include "breather/params.hpp"
#include "json.hpp"

namespace breather {

/// Fourier differentiation matrix of the given order (1..4); applies the
/// same symbol as derivative(), so D1 drops the Nyquist mode.
Eigen::MatrixXd differentiation_matrix(const PeriodicGrid& grid, int order);

/// Dense discretization of L at fixed (p, t).  Immutable once built.
struct DiscreteOperator {
  PeriodicGrid grid;
  Eigen::MatrixXd matrix;
  BreatherParams params;
  double time_tag = 0.0;
  /// Relative max-norm mismatch between matrix * z and apply_L(z) on a
  /// band-limited random probe.
  double consistency_error = 0.0;
};

/// Thrown when the discrete operator is unusable (grid too short, apply_L
/// mismatch) or a computed constant violates its sign requirement.
class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wrong eigenvalue counts; carries the eigenvalues that broke the pattern
/// (all negative, near-zero and below-edge values).
class ClassificationError : public std::runtime_error {
 public:
  ClassificationError(const std::string& what, std::vector<double> offending)
      : std::runtime_error(what), offending_(std::move(offending)) {}
  [[nodiscard]] const std::vector<double>& offending() const { return offending_; }

 private:
  std::vector<double> offending_;
};

/// D4 - 2w D2 + s² I + D1 diag(5B²) D1 + diag(V); symmetrized.  Checks
/// consistency with apply_L (tolerance 1e-8) and boundary decay of B.
DiscreteOperator assemble(const BreatherParams& p, const PeriodicGrid& grid, double t);

/// Constant-coefficient part L0 = D4 - 2w D2 + s² I (B ≡ 0).
DiscreteOperator assemble_free(const BreatherParams& p, const PeriodicGrid& grid);

/// Bottom of the essential spectrum of L: min over real k of
/// k⁴ + 2(β²-α²)k² + (α²+β²)², i.e. (α²+β²)² if β >= α and 4α²β² otherwise.
double continuum_edge(const BreatherParams& p);

struct SpectrumReport {
  std::vector<double> eigenvalues;
  int negative_count = 0;
  double lambda0_sq = 0.0;
  std::array<double, 2> kernel_defect{};
  double kernel_angle = 0.0;
  double continuum_edge = 0.0;
  double nu0_estimate = 0.0;
  double mu0_estimate = 0.0;
  /// min Q/|z|²_{H²} on the complement of {B1, B2, B}.
  double mu0_orthogonal = 0.0;
  /// Lowest eigenvalue above the kernel cluster.
  double first_continuum = 0.0;
  BreatherParams params;
  double time_tag = 0.0;
  /// Eigenvector of the negative eigenvalue with unit L² norm (h |v|² = 1).
  std::vector<double> negative_mode;

  [[nodiscard]] GridField negative_mode_field(const PeriodicGrid& grid) const;
};

struct ClassificationThresholds {
  double kernel_fraction = 1e-3;  // ε_ker = ε_neg = fraction · edge
  double edge_fraction = 0.05;    // ε_edge
};

/// Full eigendecomposition and classification: one eigenvalue below -ε_neg,
/// two in (-ε_ker, ε_ker), the rest above edge - ε_edge.
SpectrumReport spectrum(const DiscreteOperator& op, const ClassificationThresholds& th = {});

struct CoercivityConstants {
  double nu0 = 0.0;
  double mu0 = 0.0;
  double mu0_orthogonal = 0.0;
};

/// nu0: smallest generalized eigenvalue of (Zᵀ A Z, Zᵀ G Z) on the complement
/// of {B₋₁, B1, B2}, with A = h L and G the H² Gram matrix.
/// mu0: largest μ with A - μG + b bᵀ/μ ⪰ 0 on the complement of {B1, B2}
/// (b = h B), i.e. the sharp constant in Q[z] >= μ|z|² - (1/μ)(∫zB)².
/// Throws SpectralError if any constant is not positive.
CoercivityConstants coercivity(const DiscreteOperator& op, const SpectrumReport& report);

/// Spectrum plus coercivity filled into the report.
SpectrumReport analyze(const DiscreteOperator& op, const ClassificationThresholds& th = {});

/// H² Gram matrix h (I + D1ᵀD1 + D2ᵀD2).
Eigen::MatrixXd h2_gram(const PeriodicGrid& grid);

struct WronskianReport {
  int root_count = 0;
  double root_location = 0.0;  // y2 of the first sign change
  double closed_form_max_err = 0.0;
  double exclusion_radius = 0.0;  // R0 with sinh(2βR0) = β/α
};

/// Counts sign changes of f(y2) = α sinh(2βy2) - β sin(2αy1) for x in
/// [x_lo, x_hi] (n_samples points), locates the first root by bisection,
/// and compares the numerically assembled det W (closed-form B1, B2 with
/// spectral x-derivatives on `grid`) with the closed form over the same
/// x-range.  closed_form_max_err is relative to max |det W|.
WronskianReport wronskian_analysis(const BreatherParams& p, double t, double x_lo, double x_hi, int n_samples,
                                   const PeriodicGrid& grid);

struct PhaseSweepEntry {
  double x1 = 0.0;
  double lambda0_sq = 0.0;
  int negative_count = 0;
  int root_count = 0;
};

/// λ0² over n_phases equally spaced x1 in [0, π/α) with x2 fixed; the
/// minimum estimates the uniform lower bound f0(α, β).
std::vector<PhaseSweepEntry> phase_sweep(const BreatherParams& p, const PeriodicGrid& grid, double t, int n_phases);

nlohmann::json to_json(const SpectrumReport& r);
nlohmann::json to_json(const WronskianReport& r);

}  // namespace breather
