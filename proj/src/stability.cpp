#include "mrtlb/stability.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mrtlb {

JacobianBundle build_jacobian(const ModelParams& model) {
  const LatticeSpec& spec = model.lattice;
  const int q = spec.q;
  const double dt_eta = model.disc.dt * model.pde.eta;
  if (dt_eta == 2.0) throw DegenerateSource("build_jacobian: dt * eta = 2");

  JacobianBundle jac;
  jac.weights = model.weights.expand(spec);
  jac.eta_factor = 2.0 * dt_eta / (2.0 - dt_eta);

  jac.E = linalg::Matrix(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) jac.E(i, j) = jac.weights[i];

  const linalg::Matrix lambda = collision_matrix(spec, model.rates);
  jac.J = linalg::Matrix(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      double acc = 0.0;
      for (int k = 0; k < q; ++k) acc += lambda(i, k) * (jac.E(k, j) - (k == j ? 1.0 : 0.0));
      jac.J(i, j) = acc + jac.eta_factor * jac.E(i, j);
    }
  return jac;
}

namespace {

bool rate_ties_hold(const ModelParams& model) {
  const LatticeSpec& spec = model.lattice;
  const int d = spec.d;
  const RelaxationSet& r = model.rates;
  if (!r.admissible(spec)) return false;
  if (spec.family != LatticeFamily::Full) return true;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      if (r.s3[third_order_index(d, i, j)] != r.s_axis[j]) return false;
    }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double s4 = r.s4[pair_index(d, i, j)];
      if (s4 != r.s2_diag[i] || s4 != r.s2_diag[j]) return false;
    }
  return true;
}

}  // namespace

StabilityReport check_structure(const ModelParams& model, double tol_sym, double tol_neg) {
  StabilityReport report;
  const JacobianBundle jac = build_jacobian(model);
  const int q = model.lattice.q;

  linalg::Matrix jw(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) jw(i, j) = jac.J(i, j) * jac.weights[j];

  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j)
      report.jw_asymmetry = std::max(report.jw_asymmetry, std::abs(jw(i, j) - jw(j, i)));

  report.rate_ranges_ok = rate_ties_hold(model);

  bool weights_positive = true;
  for (double w : jac.weights)
    if (!(w > 0.0)) weights_positive = false;

  if (weights_positive) {
    linalg::Matrix sim(q, q);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        sim(i, j) = jw(i, j) / std::sqrt(jac.weights[i] * jac.weights[j]);
    const auto ev = linalg::sym_eigenvalues(sim);
    report.jw_eigen_max = ev.back();
  } else {
    report.jw_eigen_max = std::numeric_limits<double>::infinity();
  }

  report.structure_ok = report.jw_asymmetry < tol_sym && report.jw_eigen_max <= tol_neg &&
                        report.rate_ranges_ok;
  return report;
}

linalg::CMatrix amplification(const JacobianBundle& jac, const LatticeSpec& spec,
                              const std::vector<double>& wavevector) {
  const int q = spec.q;
  linalg::CMatrix g(q);
  for (int k = 0; k < q; ++k) {
    double phase = 0.0;
    for (int l = 0; l < spec.d; ++l) phase += spec.velocities[k][l] * wavevector[l];
    const linalg::Complex t = std::exp(linalg::Complex(0.0, -phase));
    for (int j = 0; j < q; ++j) g(k, j) = t * (jac.J(k, j) + (k == j ? 1.0 : 0.0));
  }
  return g;
}

int default_scan_resolution(int d) {
  if (d <= 2) return 64;
  if (d == 3) return 32;
  return 16;
}

void von_neumann_scan(const ModelParams& model, int resolution, StabilityReport& report) {
  const LatticeSpec& spec = model.lattice;
  const int d = spec.d;
  const JacobianBundle jac = build_jacobian(model);

  long total = 1;
  for (int l = 0; l < d; ++l) total *= resolution;

  double max_modulus = 0.0;
  bool simple = true;
  bool solver_failed = false;
  const double conserved = 1.0 + jac.eta_factor;

#pragma omp parallel for schedule(static) reduction(max : max_modulus) \
    reduction(&& : simple) reduction(|| : solver_failed)
  for (long idx = 0; idx < total; ++idx) {
    if (solver_failed) continue;
    std::vector<double> theta(d);
    long rem = idx;
    for (int l = 0; l < d; ++l) {
      theta[l] = 2.0 * M_PI * double(rem % resolution) / resolution;
      rem /= resolution;
    }
    std::vector<linalg::Complex> eig;
    try {
      eig = linalg::complex_eigenvalues(amplification(jac, spec, theta));
    } catch (const linalg::NumericalFailure&) {
      solver_failed = true;
      continue;
    }

    // On-unit-circle roots, with the conserved eigenvalue exempted at zero
    // wavevector.
    std::vector<linalg::Complex> on_circle;
    bool conserved_dropped = false;
    const bool zero_wave = (idx == 0);
    for (const auto& ev : eig) {
      max_modulus = std::max(max_modulus, std::abs(ev));
      if (std::abs(ev) >= 1.0 - 1e-9) {
        if (zero_wave && !conserved_dropped && std::abs(ev - conserved) < 1e-7) {
          conserved_dropped = true;
          continue;
        }
        on_circle.push_back(ev);
      }
    }
    // Simple-root check: clusters of near-unit-modulus roots must be singletons.
    for (size_t a = 0; a < on_circle.size() && simple; ++a)
      for (size_t b = a + 1; b < on_circle.size(); ++b)
        if (std::abs(on_circle[a] - on_circle[b]) < 1e-7) {
          simple = false;
          break;
        }
  }

  if (solver_failed)
    throw linalg::NumericalFailure("von_neumann_scan: eigensolver failed on a wavevector");
  report.vn_max_modulus = max_modulus;
  report.vn_simple_roots = simple;
  report.scan_resolution = resolution;
}

RelaxationSet region_scan_rates(const LatticeSpec& spec) {
  const int d = spec.d;
  RelaxationSet r;
  r.s0 = 1.0;
  r.s_axis.assign(d, 1.2);
  r.s2_diag.assign(d, 1.0);
  if (spec.family == LatticeFamily::Full) {
    r.s2_cross.assign(spec.cross_pairs(), 1.1);
    r.s3.resize(d * (d - 1));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (j != i) r.s3[third_order_index(d, i, j)] = r.s_axis[j];
    r.s4.assign(spec.cross_pairs(), 1.0);
  }
  return r;
}

RegionRaster stability_region(int d, double omega_tilde, const RelaxationSet& rates,
                              const GridSpec& grid, int resolution) {
  const LatticeSpec spec = build_lattice(d, LatticeFamily::Full);
  RegionRaster raster;
  raster.xs.resize(grid.nx);
  raster.ys.resize(grid.ny);
  for (int ix = 0; ix < grid.nx; ++ix)
    raster.xs[ix] = grid.nx == 1 ? grid.x_min
                                 : grid.x_min + (grid.x_max - grid.x_min) * ix / (grid.nx - 1);
  for (int iy = 0; iy < grid.ny; ++iy)
    raster.ys[iy] = grid.ny == 1 ? grid.y_min
                                 : grid.y_min + (grid.y_max - grid.y_min) * iy / (grid.ny - 1);
  raster.verdict.assign(size_t(grid.nx) * grid.ny, 0);

  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      std::vector<double> omega(d, raster.ys[iy]);
      omega[0] = raster.xs[ix];
      if (d >= 2) omega[1] = raster.ys[iy];

      ModelParams model;
      model.lattice = spec;
      model.weights = WeightSet::closed(spec, omega, omega_tilde);
      model.rates = rates;
      model.s_tilde_axis = rates.s_axis;
      model.pde.d = d;
      model.pde.kappa.assign(d, 1.0);
      model.pde.eta = 0.0;
      model.disc.dx = 1.0;
      model.disc.dt = 1.0;

      StabilityReport report;
      von_neumann_scan(model, resolution, report);
      raster.verdict[size_t(iy) * grid.nx + ix] = report.scan_stable() ? 1 : 0;
    }
  return raster;
}

RegionRaster solvability_region(int d, double omega_tilde, double s2_axis, double eta,
                                double dt, const GridSpec& grid) {
  RegionRaster raster;
  raster.xs.resize(grid.nx);
  raster.ys.resize(grid.ny);
  for (int ix = 0; ix < grid.nx; ++ix)
    raster.xs[ix] = grid.nx == 1 ? grid.x_min
                                 : grid.x_min + (grid.x_max - grid.x_min) * ix / (grid.nx - 1);
  for (int iy = 0; iy < grid.ny; ++iy)
    raster.ys[iy] = grid.ny == 1 ? grid.y_min
                                 : grid.y_min + (grid.y_max - grid.y_min) * iy / (grid.ny - 1);
  raster.verdict.assign(size_t(grid.nx) * grid.ny, 0);

  Discretization disc;
  disc.dt = dt;
  disc.dx = std::sqrt(dt);  // xi = 1; eps_tilde supplied directly

#pragma omp parallel for schedule(dynamic)
  for (long cell = 0; cell < long(raster.verdict.size()); ++cell) {
    const int ix = int(cell % grid.nx);
    const int iy = int(cell / grid.nx);
    std::vector<double> eps(d, raster.ys[iy]);
    eps[0] = raster.xs[ix];
    if (d >= 2) eps[1] = raster.ys[iy];
    const auto model = solve_model_eps(d, eps, eta, 0.0, disc, omega_tilde, s2_axis);
    raster.verdict[cell] = model ? 1 : 0;
  }
  return raster;
}

}  // namespace mrtlb
