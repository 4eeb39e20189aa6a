#include "breather/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "breather/closed_form.hpp"

namespace breather {

namespace {

constexpr std::uint64_t kProbeSeed = 0x5eed;

// Orthonormal basis of the Euclidean complement of span(cols).
Eigen::MatrixXd complement(const Eigen::MatrixXd& cols) {
  const Eigen::Index n = cols.rows();
  const Eigen::Index m = cols.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(cols);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - m);
}

Eigen::VectorXd as_vector(const GridField& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.values().data(), f.size());
}

GridField direction_field(const BreatherParams& p, Direction d, const PeriodicGrid& g, double t) {
  return sample([&](double tt, double x) { return eval_direction(p, d, {tt, x}); }, g, t);
}

// Smallest eigenvalue of diag(lam) + rho d dᵀ (lam ascending); rho = +inf
// gives the limit on the complement of d.
double rank_one_min(const Eigen::VectorXd& lam, const Eigen::VectorXd& d, double rho) {
  const Eigen::Index n = lam.size();
  const double lo0 = lam(0);
  const double hi0 = n > 1 ? lam(1) : lam(0) + rho * d.squaredNorm();
  if (!(hi0 > lo0)) return lo0;
  const bool infinite = std::isinf(rho);
  auto secular = [&](double x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += d(i) * d(i) / (lam(i) - x);
    return infinite ? s : 1.0 / rho + s;
  };
  double lo = lo0;
  double hi = hi0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (secular(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Eigen::MatrixXd differentiation_matrix(const PeriodicGrid& grid, int order) {
  const int n = grid.size();
  GridField delta(grid);
  delta[0] = 1.0;
  const GridField col = derivative(delta, order);
  Eigen::MatrixXd d(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) d(i, j) = col[static_cast<std::size_t>((i - j + n) % n)];
  return d;
}

Eigen::MatrixXd h2_gram(const PeriodicGrid& grid) {
  const Eigen::MatrixXd d1 = differentiation_matrix(grid, 1);
  const Eigen::MatrixXd d2 = differentiation_matrix(grid, 2);
  Eigen::MatrixXd g = d1.transpose() * d1 + d2.transpose() * d2;
  g.diagonal().array() += 1.0;
  g *= grid.spacing();
  return 0.5 * (g + g.transpose());
}

double continuum_edge(const BreatherParams& p) {
  const double s = p.scaling_weight();
  return p.beta >= p.alpha ? s * s : 4.0 * p.alpha * p.alpha * p.beta * p.beta;
}

DiscreteOperator assemble_free(const BreatherParams& p, const PeriodicGrid& grid) {
  const double w = p.dispersion_weight();
  const double s = p.scaling_weight();
  Eigen::MatrixXd m = differentiation_matrix(grid, 4) - 2.0 * w * differentiation_matrix(grid, 2);
  m.diagonal().array() += s * s;
  return {grid, 0.5 * (m + m.transpose()), p, 0.0, 0.0};
}

DiscreteOperator assemble(const BreatherParams& p, const PeriodicGrid& grid, double t) {
  p.check_positive();
  const LinearizedCoefficients c(p, grid, t);
  const double edge = c.breather.b().boundary_magnitude();
  if (edge > 1e-10) {
    std::ostringstream os;
    os << "assemble: breather does not decay on the grid (boundary value " << edge << "); increase L";
    throw SpectralError(os.str());
  }
  DiscreteOperator op = assemble_free(p, grid);
  op.time_tag = t;
  const Eigen::MatrixXd d1 = differentiation_matrix(grid, 1);
  const Eigen::VectorXd fb = as_vector(c.five_b_sq);
  op.matrix.noalias() += d1 * fb.asDiagonal() * d1;
  op.matrix.diagonal() += as_vector(c.potential);
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();

  // consistency probe: a smooth field resolved well inside the band
  const double k_probe = 0.25 * grid.wavenumber(grid.size() / 2);
  const GridField z = band_limited_random(grid, kProbeSeed, k_probe, grid.half_length() / 4.0);
  const GridField lz = apply_L(z, c);
  const Eigen::VectorXd mz = op.matrix * as_vector(z);
  op.consistency_error = (mz - as_vector(lz)).lpNorm<Eigen::Infinity>() / lz.sup_norm();
  if (op.consistency_error > 1e-8) {
    std::ostringstream os;
    os << "assemble: matrix disagrees with apply_L (relative error " << op.consistency_error << ")";
    throw SpectralError(os.str());
  }
  return op;
}

GridField SpectrumReport::negative_mode_field(const PeriodicGrid& grid) const {
  return GridField(grid, negative_mode, time_tag);
}

SpectrumReport spectrum(const DiscreteOperator& op, const ClassificationThresholds& th) {
  const PeriodicGrid& g = op.grid;
  const BreatherParams& p = op.params;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
  if (es.info() != Eigen::Success) throw SpectralError("spectrum: eigensolver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();

  SpectrumReport r;
  r.params = p;
  r.time_tag = op.time_tag;
  r.continuum_edge = continuum_edge(p);
  r.eigenvalues.assign(ev.data(), ev.data() + ev.size());

  const double eps_ker = th.kernel_fraction * r.continuum_edge;
  const double eps_edge = th.edge_fraction * r.continuum_edge;
  std::vector<Eigen::Index> neg, ker;
  std::vector<double> offending;
  int gap = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double v = ev(i);
    if (v <= -eps_ker) {
      neg.push_back(i);
    } else if (v < eps_ker) {
      ker.push_back(i);
    } else if (v < r.continuum_edge - eps_edge) {
      ++gap;
    } else {
      continue;
    }
    offending.push_back(v);
  }
  r.negative_count = static_cast<int>(neg.size());
  if (neg.size() != 1 || ker.size() != 2 || gap != 0) {
    std::ostringstream os;
    os << "spectrum: expected 1 negative, 2 kernel and 0 gap eigenvalues, found " << neg.size() << ", "
       << ker.size() << ", " << gap << " (under-resolved grid or regression)";
    throw ClassificationError(os.str(), offending);
  }
  r.lambda0_sq = -ev(neg[0]);
  r.kernel_defect = {ev(ker[0]), ev(ker[1])};
  r.first_continuum = ev(ker[1] + 1);

  // principal angle between the numerical kernel and span{B1, B2}
  Eigen::MatrixXd y(g.size(), 2);
  y.col(0) = as_vector(direction_field(p, Direction::B1, g, op.time_tag));
  y.col(1) = as_vector(direction_field(p, Direction::B2, g, op.time_tag));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  const Eigen::MatrixXd yq = qr.householderQ() * Eigen::MatrixXd::Identity(g.size(), 2);
  Eigen::MatrixXd v(g.size(), 2);
  v.col(0) = es.eigenvectors().col(ker[0]);
  v.col(1) = es.eigenvectors().col(ker[1]);
  const Eigen::MatrixXd resid = yq - v * (v.transpose() * yq);
  const double smax = Eigen::JacobiSVD<Eigen::MatrixXd>(resid).singularValues()(0);
  r.kernel_angle = std::asin(std::min(1.0, smax));

  Eigen::VectorXd vn = es.eigenvectors().col(neg[0]);
  Eigen::Index imax = 0;
  vn.cwiseAbs().maxCoeff(&imax);
  if (vn(imax) < 0) vn = -vn;
  vn /= std::sqrt(g.spacing());
  r.negative_mode.assign(vn.data(), vn.data() + vn.size());
  return r;
}

CoercivityConstants coercivity(const DiscreteOperator& op, const SpectrumReport& report) {
  const PeriodicGrid& g = op.grid;
  const BreatherParams& p = op.params;
  const double h = g.spacing();
  const Eigen::MatrixXd a = h * op.matrix;
  const Eigen::MatrixXd gram = h2_gram(g);
  const Eigen::VectorXd b1 = as_vector(direction_field(p, Direction::B1, g, op.time_tag));
  const Eigen::VectorXd b2 = as_vector(direction_field(p, Direction::B2, g, op.time_tag));
  const Eigen::VectorXd bb = as_vector(direction_field(p, Direction::B, g, op.time_tag));
  CoercivityConstants out;

  {
    Eigen::MatrixXd cons(g.size(), 3);
    cons.col(0) = Eigen::Map<const Eigen::VectorXd>(report.negative_mode.data(), g.size());
    cons.col(1) = b1;
    cons.col(2) = b2;
    const Eigen::MatrixXd z = complement(cons);
    const Eigen::MatrixXd ar = z.transpose() * a * z;
    const Eigen::MatrixXd gr = z.transpose() * gram * z;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (ar + ar.transpose()),
                                                                  0.5 * (gr + gr.transpose()), Eigen::EigenvaluesOnly);
    if (ges.info() != Eigen::Success) throw SpectralError("coercivity: generalized eigensolver failed");
    out.nu0 = ges.eigenvalues()(0);
  }

  {
    Eigen::MatrixXd cons(g.size(), 2);
    cons.col(0) = b1;
    cons.col(1) = b2;
    const Eigen::MatrixXd z = complement(cons);
    const Eigen::MatrixXd ar = z.transpose() * a * z;
    const Eigen::MatrixXd gr = z.transpose() * gram * z;
    const Eigen::VectorXd br = z.transpose() * (h * bb);
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (gr + gr.transpose()));
    if (llt.info() != Eigen::Success) throw SpectralError("coercivity: Gram matrix is not positive definite");
    const auto l = llt.matrixL();
    Eigen::MatrixXd c = l.solve(ar);
    c = l.solve(c.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (c + c.transpose()));
    if (es.info() != Eigen::Success) throw SpectralError("coercivity: eigensolver failed");
    const Eigen::VectorXd d = es.eigenvectors().transpose() * l.solve(br);
    const Eigen::VectorXd& lam = es.eigenvalues();

    out.mu0_orthogonal = rank_one_min(lam, d, std::numeric_limits<double>::infinity());
    if (out.mu0_orthogonal > 0.0) {
      // g(μ) = λmin(C + ccᵀ/μ) - μ decreases from mu0_orthogonal to <= 0 on (0, mu0_orthogonal]
      double lo = 0.0;
      double hi = out.mu0_orthogonal;
      for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (rank_one_min(lam, d, 1.0 / mid) - mid >= 0.0)
          lo = mid;
        else
          hi = mid;
      }
      out.mu0 = lo;
    }
  }

  if (!(out.nu0 > 0.0) || !(out.mu0 > 0.0) || !(out.mu0_orthogonal > 0.0)) {
    std::ostringstream os;
    os << "coercivity: non-positive constant (nu0 = " << out.nu0 << ", mu0 = " << out.mu0
       << ", mu0 on B-complement = " << out.mu0_orthogonal << ")";
    throw SpectralError(os.str());
  }
  return out;
}

SpectrumReport analyze(const DiscreteOperator& op, const ClassificationThresholds& th) {
  SpectrumReport r = spectrum(op, th);
  const CoercivityConstants c = coercivity(op, r);
  r.nu0_estimate = c.nu0;
  r.mu0_estimate = c.mu0;
  r.mu0_orthogonal = c.mu0_orthogonal;
  return r;
}

WronskianReport wronskian_analysis(const BreatherParams& p, double t, double x_lo, double x_hi, int n_samples,
                                   const PeriodicGrid& grid) {
  p.check_positive();
  if (!(x_hi > x_lo) || n_samples < 3) throw std::invalid_argument("wronskian_analysis: bad sampling range");
  const double a = p.alpha;
  const double b = p.beta;
  WronskianReport r;
  r.exclusion_radius = std::asinh(b / a) / (2.0 * b);
  const double margin = 0.5 / b;
  const double shift2 = p.gamma() * t + p.x2;
  if (x_lo + shift2 > -r.exclusion_radius - margin || x_hi + shift2 < r.exclusion_radius + margin)
    throw std::invalid_argument("wronskian_analysis: x-range does not cover the root exclusion interval");

  auto f = [&](double x) {
    const Phases ph = phases(p, {t, x});
    return a * std::sinh(2.0 * b * ph.y2) - b * std::sin(2.0 * a * ph.y1);
  };
  int last_sign = 0;
  double last_x = x_lo;
  bool located = false;
  for (int i = 0; i < n_samples; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / (n_samples - 1);
    const double v = f(x);
    const int sg = (v > 0.0) - (v < 0.0);
    if (sg == 0) continue;
    if (last_sign != 0 && sg != last_sign) {
      ++r.root_count;
      if (!located) {
        double lo = last_x;
        double hi = x;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = f(mid);
          if (((fm > 0.0) - (fm < 0.0)) == last_sign)
            lo = mid;
          else
            hi = mid;
        }
        r.root_location = phases(p, {t, 0.5 * (lo + hi)}).y2;
        located = true;
      }
    }
    last_sign = sg;
    last_x = x;
  }

  const GridField w1 = direction_field(p, Direction::B1, grid, t);
  const GridField w2 = direction_field(p, Direction::B2, grid, t);
  const GridField w1x = derivative(w1, 1);
  const GridField w2x = derivative(w2, 1);
  double err = 0.0;
  double scale = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    if (x < x_lo || x > x_hi) continue;
    const auto k = static_cast<std::size_t>(j);
    const double closed = wronskian_closed_form(p, {t, x});
    err = std::max(err, std::abs(w1[k] * w2x[k] - w2[k] * w1x[k] - closed));
    scale = std::max(scale, std::abs(closed));
  }
  r.closed_form_max_err = scale > 0.0 ? err / scale : err;
  return r;
}

std::vector<PhaseSweepEntry> phase_sweep(const BreatherParams& p, const PeriodicGrid& grid, double t, int n_phases) {
  if (n_phases < 1) throw std::invalid_argument("phase_sweep: n_phases must be >= 1");
  std::vector<PhaseSweepEntry> out;
  for (int k = 0; k < n_phases; ++k) {
    BreatherParams q = p;
    q.x1 = p.x1 + k * std::numbers::pi / (p.alpha * n_phases);
    const SpectrumReport s = spectrum(assemble(q, grid, t));
    const double center = -(q.gamma() * t + q.x2);
    const double reach = std::asinh(q.beta / q.alpha) / (2.0 * q.beta) + 10.0 / q.beta;
    const WronskianReport w = wronskian_analysis(q, t, center - reach, center + reach, 4001, grid);
    out.push_back({q.x1, s.lambda0_sq, s.negative_count, w.root_count});
  }
  return out;
}

nlohmann::json to_json(const SpectrumReport& r) {
  return {{"eigenvalues", r.eigenvalues},
          {"negative_count", r.negative_count},
          {"lambda0_sq", r.lambda0_sq},
          {"kernel_defect", {r.kernel_defect[0], r.kernel_defect[1]}},
          {"kernel_angle", r.kernel_angle},
          {"continuum_edge", r.continuum_edge},
          {"first_continuum", r.first_continuum},
          {"nu0_estimate", r.nu0_estimate},
          {"mu0_estimate", r.mu0_estimate},
          {"mu0_orthogonal", r.mu0_orthogonal},
          {"params", to_json(r.params)},
          {"t", r.time_tag}};
}

nlohmann::json to_json(const WronskianReport& r) {
  return {{"root_count", r.root_count},
          {"root_location", r.root_location},
          {"closed_form_max_err", r.closed_form_max_err},
          {"exclusion_radius", r.exclusion_radius}};
}

}  // namespace breather
