#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "breather/closed_form.hpp"
#include "breather/functionals.hpp"
#include "breather/spectral.hpp"
#include "doctest.h"

using namespace breather;

namespace {

const PeriodicGrid kGrid(30, 512);

GridField direction_field(const BreatherParams& p, Direction d, const PeriodicGrid& g, double t) {
  return sample([&](double tt, double x) { return eval_direction(p, d, {tt, x}); }, g, t);
}

Eigen::VectorXd vec(const GridField& f) { return Eigen::Map<const Eigen::VectorXd>(f.values().data(), f.size()); }

GridField field(const PeriodicGrid& g, const Eigen::VectorXd& v) {
  return GridField(g, std::vector<double>(v.data(), v.data() + v.size()));
}

// Random smooth field with the Euclidean projection onto span(cons) removed,
// normalized to unit H² norm.
GridField constrained_sample(const PeriodicGrid& g, std::uint64_t seed, const Eigen::MatrixXd& cons) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uk(1.0, 6.0), uw(1.5, 8.0);
  Eigen::VectorXd z = vec(band_limited_random(g, seed, uk(rng), uw(rng)));
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(cons);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.size(), cons.cols());
  z -= q * (q.transpose() * z);
  GridField f = field(g, z);
  return f * (1.0 / sobolev_norm(f, 2));
}

const SpectrumReport& reference_report() {
  static const SpectrumReport r = analyze(assemble({1.5, 1, 0, 0}, kGrid, 0));
  return r;
}

}  // namespace

TEST_CASE("differentiation matrices reproduce the spectral derivative") {
  const PeriodicGrid g(10, 64);
  const GridField f = band_limited_random(g, 3, 4, 2);
  for (int o = 1; o <= 4; ++o) {
    const Eigen::VectorXd a = differentiation_matrix(g, o) * vec(f);
    const GridField b = derivative(f, o);
    CHECK((vec(b) - a).lpNorm<Eigen::Infinity>() < 1e-11 * std::max(1.0, b.sup_norm()));
  }
  const Eigen::MatrixXd d1 = differentiation_matrix(g, 1);
  CHECK((d1 + d1.transpose()).norm() < 1e-12 * d1.norm());
}

TEST_CASE("free operator is diagonalized by Fourier modes") {
  const BreatherParams p{1.3, 0.7, 0, 0};
  const PeriodicGrid g(12, 64);
  const DiscreteOperator op = assemble_free(p, g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix, Eigen::EigenvaluesOnly);
  std::vector<double> symbol;
  const double w = p.dispersion_weight(), s = p.scaling_weight();
  for (int j = -g.size() / 2 + 1; j <= g.size() / 2; ++j) {
    const double k = std::numbers::pi * j / g.half_length();
    symbol.push_back(k * k * k * k + 2 * w * k * k + s * s);
  }
  std::sort(symbol.begin(), symbol.end());
  for (int i = 0; i < g.size(); ++i)
    CHECK(std::abs(es.eigenvalues()(i) - symbol[i]) < 1e-9 * std::max(1.0, symbol[i]));
}

TEST_CASE("continuum edge") {
  CHECK(continuum_edge({1, 1, 0, 0}) == 4.0);
  CHECK(continuum_edge({1.5, 1, 0, 0}) == doctest::Approx(9.0));
  CHECK(continuum_edge({1, 1.5, 0, 0}) == doctest::Approx(std::pow(3.25, 2)));
  // the bottom of the symbol over a fine k-grid
  for (const BreatherParams p : {BreatherParams{1.5, 1, 0, 0}, BreatherParams{0.6, 1.2, 0, 0}}) {
    double m = 1e300;
    for (double k = 0; k < 5; k += 1e-5)
      m = std::min(m, k * k * k * k + 2 * p.dispersion_weight() * k * k + p.scaling_weight() * p.scaling_weight());
    CHECK(std::abs(m - continuum_edge(p)) < 1e-8);
  }
}

TEST_CASE("assembled matrix is symmetric and consistent with apply_L") {
  const BreatherParams p{1.5, 1, 0.3, -0.2};
  const DiscreteOperator op = assemble(p, kGrid, 0.1);
  CHECK((op.matrix - op.matrix.transpose()).norm() <= 1e-10 * op.matrix.norm());
  CHECK(op.consistency_error < 1e-9);
  const LinearizedCoefficients c(p, kGrid, 0.1);
  for (std::uint64_t seed : {1, 2, 3}) {
    const GridField z = band_limited_random(kGrid, seed, 5, 5);
    const GridField lz = apply_L(z, c);
    CHECK((op.matrix * vec(z) - vec(lz)).lpNorm<Eigen::Infinity>() < 1e-9 * lz.sup_norm());
  }
  CHECK_THROWS_AS(assemble(p, PeriodicGrid(12, 256), 0), SpectralError);
  CHECK_THROWS_AS(assemble({0, 1, 0, 0}, kGrid, 0), std::invalid_argument);
}

TEST_CASE("spectrum of the reference breather") {
  const SpectrumReport& r = reference_report();
  CHECK(r.negative_count == 1);
  CHECK(r.lambda0_sq > 0);
  const double opnorm = std::max(std::abs(r.eigenvalues.front()), std::abs(r.eigenvalues.back()));
  CHECK(std::abs(r.kernel_defect[0]) < 1e-4 * opnorm);
  CHECK(std::abs(r.kernel_defect[1]) < 1e-4 * opnorm);
  CHECK(r.kernel_angle < 1e-3);
  CHECK(r.nu0_estimate > 0);
  CHECK(r.mu0_estimate > 0);
  CHECK(r.mu0_estimate <= r.mu0_orthogonal);
  CHECK(r.first_continuum > r.continuum_edge * 0.95);
}

TEST_CASE("negative mode is a normalized eigenvector orthogonal to the kernel") {
  const SpectrumReport& r = reference_report();
  const DiscreteOperator op = assemble({1.5, 1, 0, 0}, kGrid, 0);
  const GridField v = r.negative_mode_field(kGrid);
  CHECK(std::abs(inner(v, v) - 1) < 1e-12);
  const Eigen::VectorXd x = vec(v);
  const double rq = x.dot(op.matrix * x) / x.dot(x);
  CHECK(std::abs(rq + r.lambda0_sq) < 1e-8 * r.lambda0_sq);
  const double b1n = sobolev_norm(direction_field(op.params, Direction::B1, kGrid, 0), 0);
  const double b2n = sobolev_norm(direction_field(op.params, Direction::B2, kGrid, 0), 0);
  CHECK(std::abs(inner(v, direction_field(op.params, Direction::B1, kGrid, 0))) < 1e-8 * b1n);
  CHECK(std::abs(inner(v, direction_field(op.params, Direction::B2, kGrid, 0))) < 1e-8 * b2n);
}

TEST_CASE("lambda0 squared stays positive in time and converges in N") {
  std::vector<double> vals;
  for (double t : {0.0, 0.1, 0.25}) vals.push_back(spectrum(assemble({1.5, 1, 0, 0}, kGrid, t)).lambda0_sq);
  for (double v : vals) CHECK(v > 1.0);
  const double fine = spectrum(assemble({1.5, 1, 0, 0}, PeriodicGrid(30, 1024), 0)).lambda0_sq;
  CHECK(std::abs(fine - vals[0]) < 1e-6 * fine);
}

TEST_CASE("translation and half-period invariance") {
  const BreatherParams p{1.5, 1, 0.2, -0.1};
  // an off-grid translation needs the finer grid to be invisible at 1e-8
  const PeriodicGrid fine(30, 1024);
  const SpectrumReport fa = spectrum(assemble(p, fine, 0));
  const SpectrumReport fb = spectrum(assemble(p.shifted(0.37), fine, 0));
  for (std::size_t i = 0; i < fa.eigenvalues.size(); ++i)
    CHECK(std::abs(fa.eigenvalues[i] - fb.eigenvalues[i]) < 1e-8 * std::max(1.0, std::abs(fa.eigenvalues[i])));
  const SpectrumReport a = analyze(assemble(p, kGrid, 0));
  const BreatherParams q{p.alpha, p.beta, p.x1 + std::numbers::pi / p.alpha, p.x2};
  const SpectrumReport c = analyze(assemble(q, kGrid, 0));
  CHECK(std::abs(a.lambda0_sq - c.lambda0_sq) < 1e-8 * a.lambda0_sq);
  CHECK(std::abs(a.nu0_estimate - c.nu0_estimate) < 1e-8);
  CHECK(std::abs(a.mu0_estimate - c.mu0_estimate) < 1e-8);
}

TEST_CASE("coincident continuum edges do not break classification") {
  const SpectrumReport r = spectrum(assemble({1, 1, 0.4, 0}, kGrid, 0));
  CHECK(r.continuum_edge == 4.0);
  CHECK(r.negative_count == 1);
}

TEST_CASE("classification failure carries the eigenvalues") {
  ClassificationThresholds th;
  th.kernel_fraction = 1e-14;  // kernel defects are larger than this
  try {
    (void)spectrum(assemble({1.5, 1, 0, 0}, kGrid, 0), th);
    FAIL("expected a classification error");
  } catch (const ClassificationError& e) {
    CHECK(!e.offending().empty());
  }
}

TEST_CASE("coercivity inequalities on random constrained samples") {
  const BreatherParams p{1.5, 1, 0, 0};
  const SpectrumReport& r = reference_report();
  const LinearizedCoefficients c(p, kGrid, 0);
  const GridField b = direction_field(p, Direction::B, kGrid, 0);
  Eigen::MatrixXd or1(kGrid.size(), 3), orthok(kGrid.size(), 2);
  or1.col(0) = vec(r.negative_mode_field(kGrid));
  or1.col(1) = orthok.col(0) = vec(direction_field(p, Direction::B1, kGrid, 0));
  or1.col(2) = orthok.col(1) = vec(direction_field(p, Direction::B2, kGrid, 0));
  double worst_nu = 1e300, worst_mu = 1e300;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const GridField z0 = constrained_sample(kGrid, 1000 + s, or1);
    worst_nu = std::min(worst_nu, quadratic_form(z0, c) - r.nu0_estimate * std::pow(sobolev_norm(z0, 2), 2));
    const GridField z = constrained_sample(kGrid, 5000 + s, orthok);
    const double zb = inner(z, b);
    worst_mu = std::min(worst_mu, quadratic_form(z, c) - r.mu0_estimate * std::pow(sobolev_norm(z, 2), 2) +
                                      zb * zb / r.mu0_estimate);
  }
  CHECK(worst_nu >= -1e-8);
  CHECK(worst_mu >= -1e-8);
}

TEST_CASE("mu0 on the B-complement against a direct generalized eigenproblem") {
  const BreatherParams p{1.5, 1, 0, 0};
  const DiscreteOperator op = assemble(p, kGrid, 0);
  Eigen::MatrixXd cons(kGrid.size(), 3);
  cons.col(0) = vec(direction_field(p, Direction::B1, kGrid, 0));
  cons.col(1) = vec(direction_field(p, Direction::B2, kGrid, 0));
  cons.col(2) = vec(direction_field(p, Direction::B, kGrid, 0));
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(cons);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(kGrid.size(), kGrid.size());
  const Eigen::MatrixXd z = q.rightCols(kGrid.size() - 3);
  const Eigen::MatrixXd a = z.transpose() * (kGrid.spacing() * op.matrix) * z;
  const Eigen::MatrixXd gm = z.transpose() * h2_gram(kGrid) * z;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (a + a.transpose()), 0.5 * (gm + gm.transpose()),
                                                                Eigen::EigenvaluesOnly);
  CHECK(std::abs(ges.eigenvalues()(0) - reference_report().mu0_orthogonal) < 1e-9);
}

TEST_CASE("Wronskian analysis") {
  // y1 = y2 = 0 at the origin
  CHECK(std::abs(wronskian_closed_form({1.5, 1, 0, 0}, {0, 0})) < 1e-15);
  const BreatherParams p{1.5, 1, 0.3, -0.1};
  const double t = 0.2;
  const double c = -(p.gamma() * t + p.x2);
  const WronskianReport w = wronskian_analysis(p, t, c - 10, c + 10, 4001, PeriodicGrid(30, 1024));
  CHECK(w.root_count == 1);
  CHECK(std::abs(w.root_location) <= w.exclusion_radius);
  CHECK(w.closed_form_max_err < 1e-8);
  CHECK_THROWS(wronskian_analysis(p, t, c + 1, c + 10, 100, kGrid));

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ua(0.9, 1.6), ub(0.9, 1.2), ux(-1, 1), ut(0, 0.3);
  for (int i = 0; i < 10; ++i) {
    const BreatherParams q{ua(rng), ub(rng), ux(rng), ux(rng)};
    const double tt = ut(rng);
    const double cc = -(q.gamma() * tt + q.x2);
    const int neg = spectrum(assemble(q, kGrid, tt)).negative_count;
    CHECK(wronskian_analysis(q, tt, cc - 10, cc + 10, 4001, kGrid).root_count == neg);
  }
}

TEST_CASE("phase sweep") {
  const auto rows = phase_sweep({1.5, 1, 0, 0}, kGrid, 0, 4);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.negative_count == 1);
    CHECK(r.root_count == 1);
    CHECK(r.lambda0_sq > 0);
  }
}

TEST_CASE("spectrum report json") {
  const auto j = to_json(reference_report());
  CHECK(j["negative_count"] == 1);
  CHECK(j["eigenvalues"].size() == 512);
  CHECK(j["kernel_defect"].size() == 2);
}
