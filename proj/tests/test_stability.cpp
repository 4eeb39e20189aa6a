#include <cmath>
#include <numbers>
#include <sstream>

#include "breather/closed_form.hpp"
#include "breather/functionals.hpp"
#include "breather/stability.hpp"
#include "doctest.h"

using namespace breather;

namespace {

GridField breather_field(const BreatherParams& p, const PeriodicGrid& g, double t) {
  return sample([&](double tt, double x) { return eval_breather(p, {tt, x}); }, g, t);
}

GridField direction_field(const BreatherParams& p, Direction d, const PeriodicGrid& g, double t) {
  return sample([&](double tt, double x) { return eval_direction(p, d, {tt, x}); }, g, t);
}

}  // namespace

TEST_CASE("modulation recovers known shifts") {
  const PeriodicGrid g(30, 1024);
  const BreatherParams truth{1.5, 1, 0.37, -0.21};
  const double t = 0.13;
  const ModulationState s = modulate(breather_field(truth, g, t), {1.5, 1, 0, 0}, t);
  CHECK(std::abs(s.x1 - 0.37) < 1e-10);
  CHECK(std::abs(s.x2 + 0.21) < 1e-10);
  CHECK(s.z_h2 < 1e-9);
  CHECK(s.sign_branch == 0);
  CHECK(std::abs(s.ortho_residuals[0]) <= 1e-10);
  CHECK(std::abs(s.ortho_residuals[1]) <= 1e-10);
  CHECK(s.iterations > 0);
}

TEST_CASE("modulation takes the half-period branch") {
  const PeriodicGrid g(30, 1024);
  const double a = 1.5;
  const BreatherParams truth{a, 1, std::numbers::pi / a, 0};
  const GridField u = breather_field(truth, g, 0);
  // the flipped translate is -B at the guess
  CHECK((u + breather_field({a, 1, 0, 0}, g, 0)).sup_norm() < 1e-12);
  const ModulationState s = modulate(u, {a, 1, 0, 0}, 0);
  CHECK(s.sign_branch == 1);
  CHECK(std::abs(s.x1 - std::numbers::pi / a) < 1e-10);
  CHECK(std::abs(s.x2) < 1e-10);
  CHECK(s.z_h2 < 1e-9);
  // without branch resolution the symmetric point is a spurious fixed point
  ModulationOptions o;
  o.resolve_branch = false;
  const ModulationState bad = modulate(u, {a, 1, 0, 0}, 0, o);
  CHECK(bad.sign_branch == 0);
  CHECK(bad.z_h2 > 1.0);
}

TEST_CASE("orthogonal perturbations leave the shifts unchanged") {
  const PeriodicGrid g(30, 1024);
  const BreatherParams p{1.5, 1, 0.2, 0.1};
  const double t = 0.05;
  const GridField b1 = direction_field(p, Direction::B1, g, t);
  const GridField b2 = direction_field(p, Direction::B2, g, t);
  GridField r = band_limited_random(g, 99, 3.0, 4.0);
  // Gram-Schmidt against span{B1, B2} in the discrete inner product
  const double g11 = inner(b1, b1), g12 = inner(b1, b2), g22 = inner(b2, b2);
  const double f1 = inner(r, b1), f2 = inner(r, b2);
  const double det = g11 * g22 - g12 * g12;
  r -= b1 * ((g22 * f1 - g12 * f2) / det);
  r -= b2 * ((g11 * f2 - g12 * f1) / det);
  r *= 1.0 / sobolev_norm(r, 2);
  const ModulationState s = modulate(breather_field(p, g, t) + r * 0.01, p, t);
  CHECK(std::abs(s.x1 - p.x1) < 1e-8);
  CHECK(std::abs(s.x2 - p.x2) < 1e-8);
  CHECK(s.z_h2 == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("modulation failures are structured") {
  const PeriodicGrid g(30, 1024);
  const BreatherParams truth{1.5, 1, 0.37, -0.21};
  ModulationOptions o;
  o.max_iterations = 1;
  try {
    modulate(breather_field(truth, g, 0), {1.5, 1, 0, 0}, 0, o);
    FAIL("expected non-convergence");
  } catch (const ModulationError& e) {
    CHECK(e.iterations() == 1);
    CHECK(std::max(std::abs(e.residuals()[0]), std::abs(e.residuals()[1])) > 1e-10);
  }
  GridField bad = breather_field(truth, g, 0);
  bad[5] = std::nan("");
  CHECK_THROWS_AS(modulate(bad, truth, 0), ModulationError);
}

TEST_CASE("perturbations are unit normalized and deterministic") {
  const PeriodicGrid g(30, 1024);
  for (auto k : kAllPerturbations) {
    const GridField f = make_perturbation(k, g);
    CHECK(sobolev_norm(f, 2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.values() == make_perturbation(k, g).values());
    CHECK(perturbation_kind_from_string(to_string(k)) == k);
  }
  CHECK(make_perturbation(PerturbationKind::Random, g, 1).values() !=
        make_perturbation(PerturbationKind::Random, g, 2).values());
  CHECK_THROWS_AS(perturbation_kind_from_string("gauss"), std::invalid_argument);
}

TEST_CASE("stability integrator settings") {
  const BreatherParams p{1.5, 1, 0, 0};
  const IntegratorConfig c = stability_integrator(p, 1e-4, 5);
  CHECK(c.frame_speed == -p.gamma());
  CHECK(c.monitor_stride == 100);
  CHECK(c.boundary_margin == 5.0);
}

TEST_CASE("pure breather tracking") {
  const BreatherParams p{1.5, 1, 0.1, -0.3};
  const PeriodicGrid g(30, 1024);
  const StabilityRunReport r =
      stability_experiment(p, make_perturbation(PerturbationKind::Sech, g), 0.0, stability_integrator(p, 1e-4, 0.5));
  REQUIRE_FALSE(r.failed);
  CHECK(r.times.size() == 51);
  CHECK(r.sup_z_h2 < 1e-7);
  CHECK_FALSE(r.a0_observed.has_value());
  CHECK(r.stable);
  // the closed form's shifts are constants
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    CHECK(std::abs(r.x1_series[i] - p.x1) < 1e-6);
    CHECK(std::abs(r.x2_series[i] - p.x2) < 1e-6);
  }
  const AuditTable a = lyapunov_audit(r, p);
  CHECK(a.max_closure < 1e-8);
  CHECK(a.h_u_drift < 1e-7);
  CHECK(a.h_b_drift < 1e-7);
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    CHECK(std::abs(r.q_z_series[i]) < 1e-7);
    CHECK(std::abs(r.n_z_series[i]) < 1e-7);
  }
}

TEST_CASE("perturbed run scales linearly in eta") {
  const BreatherParams p{1.5, 1, 0, 0};
  const PeriodicGrid g(30, 1024);
  const GridField pert = make_perturbation(PerturbationKind::Sech, g);
  const IntegratorConfig c = stability_integrator(p, 1e-4, 1.0);
  const StabilityRunReport r1 = stability_experiment(p, pert, 1e-3, c);
  const StabilityRunReport r2 = stability_experiment(p, pert, 5e-4, c);
  REQUIRE_FALSE(r1.failed);
  REQUIRE_FALSE(r2.failed);
  REQUIRE(r1.a0_observed.has_value());
  MESSAGE("a0 " << *r1.a0_observed << " shift rate " << r1.shift_rate_sup);
  CHECK(*r1.a0_observed < 50);
  CHECK(r1.stable);
  const double ratio = r2.sup_z_h2 / (0.5 * r1.sup_z_h2);
  CHECK(ratio > 0.3);
  CHECK(ratio < 3);
  const AuditTable a = lyapunov_audit(r1, p);
  MESSAGE("closure " << a.max_closure << " drift " << a.h_u_drift << " K " << a.q_growth_k << " mass K "
                     << a.mass_pairing_k << " shift K " << a.shift_rate_k);
  CHECK(a.max_closure < 1e-8);
  CHECK(a.h_u_drift < 1e-8);
  CHECK(std::isfinite(a.q_growth_k));
  CHECK(a.mass_pairing_k < 100);
  CHECK(a.shift_rate_k < 100);
  CHECK(a.ortho_max <= 1e-10);
  CHECK(a.passed);
}

TEST_CASE("stability preconditions and output") {
  const BreatherParams p{1.5, 1, 0, 0};
  const PeriodicGrid g(30, 256);
  const IntegratorConfig c = stability_integrator(p, 1e-3, 0.02);
  const GridField pert = make_perturbation(PerturbationKind::Sech, g);
  CHECK_THROWS_AS(stability_experiment(p, pert * 2.0, 1e-3, c), std::invalid_argument);
  CHECK_THROWS_AS(stability_experiment(p, pert, 0.1, c), std::invalid_argument);
  const StabilityRunReport r = stability_experiment(p, pert, 1e-3, c);
  std::ostringstream os;
  write_stability_csv(os, r);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,z_h2,x1,x2,H_u,Q_z,N_z\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(r.times.size()) + 1);
  const auto j = to_json(r);
  CHECK(j["eta"] == 1e-3);
  CHECK(j.contains("a0_observed"));
  CHECK(j["n_monitors"] == r.times.size());
}
