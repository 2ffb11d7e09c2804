#include <cmath>
#include <complex>

#include "doctest.h"
#include "mrtlb/stability.hpp"

using namespace mrtlb;

namespace {

Discretization disc_from_xi(double dx, double xi) { return Discretization{dx, xi * dx * dx}; }

ModelParams table1_model(const std::vector<double>& eps) {
  const auto m = solve_model_eps(int(eps.size()), eps, 0.0, 0.0, disc_from_xi(0.01, 250.0),
                                 default_omega_tilde(int(eps.size())), 1.0);
  REQUIRE(m);
  return *m;
}

}  // namespace

TEST_CASE("E is the rank-one weight projector and is idempotent") {
  const auto model = table1_model({0.40, 0.10});
  const auto jac = build_jacobian(model);
  const int q = model.lattice.q;
  // E x = (sum x) * weights
  std::vector<double> x(q);
  for (int k = 0; k < q; ++k) x[k] = 0.1 * k - 0.3;
  double sum = 0.0;
  for (double v : x) sum += v;
  const auto ex = jac.E.apply(x);
  for (int k = 0; k < q; ++k)
    CHECK(ex[k] == doctest::Approx(sum * jac.weights[k]).epsilon(1e-13));
  // E E = E
  const auto ee = jac.E * jac.E;
  CHECK((ee - jac.E).max_abs() < 1e-13);
}

TEST_CASE("jacobian reproduction and uniform-rate spectrum") {
  SUBCASE("eta = 0 gives J = Lambda (E - I)") {
    const auto model = table1_model({0.20, 0.20});
    const auto jac = build_jacobian(model);
    CHECK(jac.eta_factor == 0.0);
    const auto lambda = collision_matrix(model.lattice, model.rates);
    const int q = model.lattice.q;
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) {
        double acc = 0.0;
        for (int k = 0; k < q; ++k)
          acc += lambda(i, k) * (jac.E(k, j) - (k == j ? 1.0 : 0.0));
        CHECK(jac.J(i, j) == doctest::Approx(acc).epsilon(1e-13));
      }
  }
  SUBCASE("all rates s: J = s (E - I), eigenvalues {0, -s}") {
    auto model = table1_model({0.20, 0.20});
    const double s = 1.3;
    model.rates = RelaxationSet::uniform(model.lattice, s);
    const auto jac = build_jacobian(model);
    const int q = model.lattice.q;
    linalg::CMatrix a(q);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j) a(i, j) = jac.J(i, j);
    for (const auto& ev : linalg::complex_eigenvalues(a)) {
      const double d0 = std::abs(ev);
      const double ds = std::abs(ev + s);
      CHECK(std::min(d0, ds) < 1e-9);
    }
  }
}

TEST_CASE("eigenvalues of J are the eta factor plus the negated rates") {
  const double dt = 1.0 / 400;
  const auto m = solve_model_eps(2, {0.25, 0.10}, -M_PI * M_PI, 0.0,
                                 Discretization{std::sqrt(dt / 16.0), dt}, 1.0 / 36, 1.0);
  REQUIRE(m);
  const auto jac = build_jacobian(*m);
  const int q = m->lattice.q;
  linalg::CMatrix a(q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) a(i, j) = jac.J(i, j);
  const auto eig = linalg::complex_eigenvalues(a);

  std::vector<double> expected;
  expected.push_back(jac.eta_factor);
  const auto sdiag = m->rates.expand(m->lattice);
  for (int k = 1; k < q; ++k) expected.push_back(-sdiag[k]);
  for (double want : expected) {
    double best = 1e9;
    for (const auto& got : eig) best = std::min(best, std::abs(got - want));
    CHECK(best < 1e-10);
  }
}

TEST_CASE("structure check on synthesized models") {
  for (auto eps : {std::vector<double>{0.40, 0.10}, std::vector<double>{0.10, 0.30}}) {
    const auto model = table1_model(eps);
    const auto report = check_structure(model);
    CHECK(report.jw_asymmetry < 1e-12);
    CHECK(report.jw_eigen_max <= 1e-12);
    CHECK(report.rate_ranges_ok);
    CHECK(report.structure_ok);
  }
}

TEST_CASE("breaking a third-order tie breaks JW symmetry") {
  auto model = table1_model({0.40, 0.10});
  model.rates.s3[third_order_index(2, 0, 1)] = model.rates.s_axis[1] + 0.1;
  const auto report = check_structure(model);
  CHECK(report.jw_asymmetry > 1e-3);
  CHECK_FALSE(report.structure_ok);
}

TEST_CASE("amplification matrix basics") {
  const auto model = table1_model({0.40, 0.10});
  const auto jac = build_jacobian(model);

  SUBCASE("zero wavevector: G = I + J with unit spectral radius") {
    const auto g = amplification(jac, model.lattice, {0.0, 0.0});
    const auto eig = linalg::complex_eigenvalues(g);
    double rho = 0.0;
    for (const auto& ev : eig) rho = std::max(rho, std::abs(ev));
    CHECK(rho == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("structure-satisfying model stays on or inside the unit circle") {
    for (double tx : {0.3, 1.7, 3.1})
      for (double ty : {0.0, 0.9, 5.2}) {
        const auto g = amplification(jac, model.lattice, {tx, ty});
        for (const auto& ev : linalg::complex_eigenvalues(g))
          CHECK(std::abs(ev) <= 1.0 + 1e-10);
      }
  }
}

TEST_CASE("amplification eigenvalues against the cubic characteristic oracle, d = 1") {
  // All rates equal on D1Q3: the 3x3 characteristic polynomial is tractable
  // by direct expansion and acts as an independent oracle.
  const auto spec = build_lattice(1, LatticeFamily::Full);
  ModelParams model;
  model.lattice = spec;
  model.weights = WeightSet::closed(spec, {1.0 / 6}, 0.0);
  model.rates = RelaxationSet::uniform(spec, 1.1);
  model.s_tilde_axis = {1.1};
  model.pde.d = 1;
  model.pde.kappa = {1.0};
  model.disc = {1.0, 1.0};
  const auto jac = build_jacobian(model);

  const double theta = 0.7;
  const auto g = amplification(jac, spec, {theta});
  auto eig = linalg::complex_eigenvalues(g);

  // char poly coefficients of a 3x3 matrix via traces/determinant
  using C = linalg::Complex;
  auto at = [&](int i, int j) { return g(i, j); };
  const C tr = at(0, 0) + at(1, 1) + at(2, 2);
  C sum2(0, 0);  // sum of principal 2x2 minors
  sum2 += at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
  sum2 += at(0, 0) * at(2, 2) - at(0, 2) * at(2, 0);
  sum2 += at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1);
  const C det = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
                at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
                at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  for (const auto& ev : eig) {
    const C p = ev * ev * ev - tr * ev * ev + sum2 * ev - det;
    CHECK(std::abs(p) < 1e-10);
  }
}

TEST_CASE("von Neumann scan on pinned models") {
  SUBCASE("stable synthesized model at resolution 64") {
    const auto model = table1_model({0.40, 0.10});
    StabilityReport report;
    von_neumann_scan(model, 64, report);
    CHECK(report.vn_max_modulus <= 1.0 + 1e-10);
    CHECK(report.vn_simple_roots);
  }
  SUBCASE("weights out of range break the scan") {
    auto model = table1_model({0.40, 0.10});
    // Force omega_1 > 1 while keeping the sum closure.
    model.weights.omega_axis[0] = 1.2;
    model.weights.omega0 =
        1.0 - 2.0 * (model.weights.omega_axis[0] + model.weights.omega_axis[1]) -
        4.0 * model.weights.omega_diag;
    StabilityReport report;
    von_neumann_scan(model, 16, report);
    CHECK(report.vn_max_modulus > 1.0 + 1e-10);
  }
  SUBCASE("refinement consistency: resolutions 8 and 64 agree on a stable model") {
    const auto model = table1_model({0.20, 0.20});
    StabilityReport r8, r64;
    von_neumann_scan(model, 8, r8);
    von_neumann_scan(model, 64, r64);
    CHECK(r8.scan_stable() == r64.scan_stable());
  }
}

TEST_CASE("stability region: nesting across omega_tilde and degenerate grids") {
  const auto spec = build_lattice(2, LatticeFamily::Full);
  const auto rates = region_scan_rates(spec);
  GridSpec grid{0.02, 0.62, 0.02, 0.62, 9, 9};
  const auto r18 = stability_region(2, 1.0 / 18, rates, grid, 12);
  const auto r36 = stability_region(2, 1.0 / 36, rates, grid, 12);
  const auto r180 = stability_region(2, 1.0 / 180, rates, grid, 12);
  int n18 = 0, n36 = 0, n180 = 0;
  for (size_t i = 0; i < r18.verdict.size(); ++i) {
    n18 += r18.verdict[i];
    n36 += r36.verdict[i];
    n180 += r180.verdict[i];
    // nesting: stable at larger omega_tilde implies stable at smaller
    if (r18.verdict[i]) CHECK(r36.verdict[i]);
    if (r36.verdict[i]) CHECK(r180.verdict[i]);
  }
  CHECK(n18 > 0);      // some stable cells exist
  CHECK(n18 < n180);   // strictly larger region for smaller omega_tilde
  // omega_0 < 0 corner is unstable
  GridSpec corner{0.45, 0.45, 0.45, 0.45, 1, 1};
  const auto rc = stability_region(2, 1.0 / 18, rates, corner, 12);
  CHECK(rc.verdict.size() == 1);
  CHECK(rc.verdict[0] == 0);
}

TEST_CASE("solvability region: nesting and pinned feasible point") {
  GridSpec grid{0.05, 0.65, 0.05, 0.65, 7, 7};
  const auto r18 = solvability_region(2, 1.0 / 18, 1.0, 1.0, 1.0 / 40, grid);
  const auto r36 = solvability_region(2, 1.0 / 36, 1.0, 1.0, 1.0 / 40, grid);
  const auto r180 = solvability_region(2, 1.0 / 180, 1.0, 1.0, 1.0 / 40, grid);
  int n18 = 0, n180 = 0;
  for (size_t i = 0; i < r18.verdict.size(); ++i) {
    n18 += r18.verdict[i];
    n180 += r180.verdict[i];
    if (r18.verdict[i]) CHECK(r36.verdict[i]);
    if (r36.verdict[i]) CHECK(r180.verdict[i]);
  }
  CHECK(n18 > 0);
  CHECK(n18 <= n180);

  // the Table-1 point (0.40, 0.10) with eta = 0 is feasible
  GridSpec point{0.40, 0.40, 0.10, 0.10, 1, 1};
  const auto rp = solvability_region(2, 1.0 / 36, 1.0, 0.0, 1.0 / 40, point);
  CHECK(rp.verdict[0] == 1);
}
