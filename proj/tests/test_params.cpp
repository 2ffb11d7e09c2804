#include <cmath>

#include "doctest.h"
#include "mrtlb/params.hpp"

using namespace mrtlb;

namespace {

Discretization disc_from_xi(double dx, double xi) { return Discretization{dx, xi * dx * dx}; }

// Independent re-evaluation of the residual system on a synthesized model:
// the implementation must agree with the Appendix-B formulas recomputed from
// the output values alone.
double max_system_residual(const ModelParams& m) {
  const int d = m.lattice.d;
  const double ww = m.weights.omega_diag;
  const double s2 = m.rates.s2_diag[0];
  const auto dn = m.diffusion_numbers();
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    worst = std::max(worst, std::abs(residuals::weight_eq(dn.eps_tilde[i],
                                                          m.weights.omega_axis[i],
                                                          m.s_tilde_axis[i], ww, d)));
    worst = std::max(worst,
                     std::abs(residuals::axis_eq(dn.eps_tilde[i], m.s_tilde_axis[i], s2)));
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      worst = std::max(
          worst, std::abs(residuals::cross_eq(
                     dn.eps_tilde[i], dn.eps_tilde[j], m.weights.omega_axis[i],
                     m.weights.omega_axis[j], ww, d, m.s_tilde_axis[i], m.s_tilde_axis[j],
                     s2, m.rates.s2_cross[pair_index(d, i, j)])));
  return worst;
}

}  // namespace

TEST_CASE("tilde_to_s") {
  SUBCASE("eta = 0 passes through exactly") {
    CHECK(*tilde_to_s(1.37, 0.0, 0.01) == 1.37);
    CHECK(*tilde_to_s(0.2, 0.0, 100.0) == 0.2);
  }
  SUBCASE("axis-model value at eps = 0.2") {
    const double st = 6.0 / (3.0 + std::sqrt(3.0));
    const auto s = tilde_to_s(st, -M_PI * M_PI, 1.0 / 400);
    REQUIRE(s);
    CHECK(*s == doctest::Approx(1.261464647585203).epsilon(1e-12));
  }
  SUBCASE("negative radicand is infeasible") {
    // radicand = s_tilde (1 + eta dt)^2 - 4 eta dt < 0 for small s_tilde
    CHECK_FALSE(tilde_to_s(0.5, 1.0, 1.0).has_value());
  }
  SUBCASE("correction is O(dx^2) under diffusive scaling") {
    const double st = 1.25, eta = -M_PI * M_PI;
    const double s1 = *tilde_to_s(st, eta, 0.01);
    const double s2 = *tilde_to_s(st, eta, 0.0025);  // dx halved, dt quartered
    CHECK(std::abs(s2 - st) < 0.3 * std::abs(s1 - st));
  }
}

TEST_CASE("solve_axis root sets") {
  SUBCASE("eps = 0.10, d = 2 has the two table roots") {
    const auto roots = solve_axis(0.10, 1.0 / 36, 1.0, 2);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].s_tilde == doctest::Approx(8.0 / 7).epsilon(1e-12));
    CHECK(roots[1].s_tilde == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(roots[1].omega == doctest::Approx(11.0 / 45).epsilon(1e-12));
  }
  SUBCASE("eps = 0.40, d = 2 contains the pinned root") {
    const auto roots = solve_axis(0.40, 1.0 / 36, 1.0, 2);
    REQUIRE(!roots.empty());
    CHECK(roots[0].s_tilde == doctest::Approx(0.258403002308493).epsilon(1e-12));
    CHECK(roots[0].omega == doctest::Approx(0.003792962534682).epsilon(1e-9));
  }
  SUBCASE("roots do not depend on eta (the system is in tilde variables)") {
    const auto a = solve_axis(0.25, 1.0 / 36, 1.0, 2);
    REQUIRE(a.size() == 2);
    CHECK(a[0].s_tilde == doctest::Approx(0.722649901887385).epsilon(1e-12));
  }
}

TEST_CASE("solve_cross reproduces pinned cross rates and is symmetric") {
  const AxisRoot a{0.258403002308493, 0.003792962534682};
  const AxisRoot b{1.5, 11.0 / 45};
  const auto sij = solve_cross(a, b, 0.40, 0.10, 1.0 / 36, 1.0, 2);
  REQUIRE(sij);
  CHECK(*sij == doctest::Approx(1.466835061000191).epsilon(1e-12));
  const auto sji = solve_cross(b, a, 0.10, 0.40, 1.0 / 36, 1.0, 2);
  REQUIRE(sji);
  CHECK(*sji == doctest::Approx(*sij).epsilon(1e-13));
}

TEST_CASE("solve_model reproduces the anisotropic parameter table, d = 2") {
  const Discretization disc = disc_from_xi(0.01, 250.0);

  SUBCASE("(0.40, 0.10)") {
    const auto m = solve_model_eps(2, {0.40, 0.10}, 0.0, 0.0, disc, 1.0 / 36, 1.0);
    REQUIRE(m);
    CHECK(m->weights.omega0 == doctest::Approx(0.392414074930637).epsilon(1e-9));
    CHECK(m->weights.omega_axis[0] == doctest::Approx(0.003792962534682).epsilon(1e-9));
    CHECK(m->weights.omega_axis[1] == doctest::Approx(11.0 / 45).epsilon(1e-9));
    CHECK(m->rates.s_axis[0] == doctest::Approx(0.258403002308493).epsilon(1e-9));
    CHECK(m->rates.s_axis[1] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(m->rates.s2_cross[0] == doctest::Approx(1.466835061000191).epsilon(1e-9));
    CHECK(max_system_residual(*m) < 1e-12);
    // stability ties
    CHECK(m->rates.s3[third_order_index(2, 0, 1)] == m->rates.s_axis[1]);
    CHECK(m->rates.s3[third_order_index(2, 1, 0)] == m->rates.s_axis[0]);
    CHECK(m->rates.s4[0] == m->rates.s2_diag[0]);
  }
  SUBCASE("(0.20, 0.20)") {
    const auto m = solve_model_eps(2, {0.20, 0.20}, 0.0, 0.0, disc, 1.0 / 36, 1.0);
    REQUIRE(m);
    CHECK(m->weights.omega0 == doctest::Approx(0.466081465800228).epsilon(1e-9));
    CHECK(m->weights.omega_axis[0] == doctest::Approx(0.105701855772165).epsilon(1e-9));
    CHECK(m->weights.omega_axis[1] == doctest::Approx(0.105701855772165).epsilon(1e-9));
    CHECK(m->rates.s_axis[0] == doctest::Approx(0.892756279989137).epsilon(1e-9));
    CHECK(m->rates.s2_cross[0] == doctest::Approx(1.011385583524664).epsilon(1e-9));
    CHECK(max_system_residual(*m) < 1e-12);
  }
  SUBCASE("(0.10, 0.30)") {
    const auto m = solve_model_eps(2, {0.10, 0.30}, 0.0, 0.0, disc, 1.0 / 36, 1.0);
    REQUIRE(m);
    CHECK(m->weights.omega0 == doctest::Approx(0.279164263737521).epsilon(1e-9));
    CHECK(m->weights.omega_axis[0] == doctest::Approx(11.0 / 45).epsilon(1e-9));
    CHECK(m->weights.omega_axis[1] == doctest::Approx(0.060417868131240).epsilon(1e-9));
    CHECK(m->rates.s_axis[0] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(m->rates.s_axis[1] == doctest::Approx(0.557600159447285).epsilon(1e-9));
    CHECK(m->rates.s2_cross[0] == doctest::Approx(1.192683097984767).epsilon(1e-9));
  }
}

TEST_CASE("solve_model reproduces the d = 3 column with omega_tilde = 1/180") {
  const Discretization disc = disc_from_xi(0.05, 40.0);
  const auto m = solve_model_eps(3, {0.10, 0.40, 0.15}, 0.0, 0.0, disc, 1.0 / 180, 1.0);
  REQUIRE(m);
  CHECK(m->weights.omega0 == doctest::Approx(0.044310556197977).epsilon(1e-9));
  CHECK(m->weights.omega_axis[0] == doctest::Approx(1.0 / 9).epsilon(1e-9));
  CHECK(m->weights.omega_axis[1] == doctest::Approx(0.037126295868015).epsilon(1e-9));
  CHECK(m->weights.omega_axis[2] == doctest::Approx(0.296273981588552).epsilon(1e-9));
  CHECK(m->rates.s_axis[0] == doctest::Approx(8.0 / 7).epsilon(1e-9));
  CHECK(m->rates.s_axis[1] == doctest::Approx(0.258403002308493).epsilon(1e-9));
  CHECK(m->rates.s_axis[2] == doctest::Approx(1.359653295886320).epsilon(1e-9));
  CHECK(m->rates.s2_cross[pair_index(3, 0, 1)] == doctest::Approx(0.945790034643835).epsilon(1e-9));
  CHECK(m->rates.s2_cross[pair_index(3, 0, 2)] == doctest::Approx(1.151202850452001).epsilon(1e-9));
  CHECK(m->rates.s2_cross[pair_index(3, 1, 2)] == doctest::Approx(0.770241927190338).epsilon(1e-9));
  CHECK(max_system_residual(*m) < 1e-12);
}

TEST_CASE("solve_model with a linear source reproduces the table values") {
  // dt = 1/400, eta = -pi^2; the eta-corrected axis rates land on the table.
  const double dt = 1.0 / 400;
  const double dx = std::sqrt(dt / 16.0);  // xi = 16
  const Discretization disc{dx, dt};
  const auto m = solve_model_eps(2, {0.25, 0.10}, -M_PI * M_PI, std::pow(M_PI, 4), disc,
                                 1.0 / 36, 1.0);
  REQUIRE(m);
  CHECK(m->weights.omega0 == doctest::Approx(0.228240384066444).epsilon(1e-9));
  CHECK(m->weights.omega_axis[0] == doctest::Approx(0.085879807966778).epsilon(1e-9));
  CHECK(m->weights.omega_axis[1] == doctest::Approx(11.0 / 45).epsilon(1e-9));
  CHECK(m->rates.s_axis[0] == doctest::Approx(0.729269281934827).epsilon(1e-9));
  CHECK(m->rates.s_axis[1] == doctest::Approx(1.487864247860460).epsilon(1e-9));
  CHECK(m->rates.s2_cross[0] == doctest::Approx(1.114757496216724).epsilon(1e-9));
  CHECK(max_system_residual(*m) < 1e-12);

  SUBCASE("zeroth-order truncation error vanishes with the corrected rate") {
    const auto dn = m->diffusion_numbers();
    for (int i = 0; i < 2; ++i) {
      const double w2 = residuals::second_weight_moment(m->weights.omega_axis[i],
                                                        m->weights.omega_diag, 2);
      const double s = m->rates.s_axis[i];
      const double err0 = (1.0 / s - 0.5) * w2 +
                          dt / s * (1.0 - 1.0 / s) * m->pde.eta * w2 -
                          m->pde.kappa[i] * disc.xi();
      CHECK(std::abs(err0) < 1e-12);
      CHECK(dn.eps_tilde[i] == doctest::Approx(m->pde.kappa[i] * disc.xi()).epsilon(1e-13));
    }
  }
}

TEST_CASE("solve_model scaling invariance: output depends only on kappa * xi") {
  PDEParams pde;
  pde.d = 2;
  pde.kappa = {0.4 / 250.0, 0.1 / 250.0};
  const Discretization coarse = disc_from_xi(0.01, 250.0);
  const Discretization fine = disc_from_xi(0.005, 250.0);
  const auto a = solve_model(pde, coarse, 1.0 / 36, 1.0);
  const auto b = solve_model(pde, fine, 1.0 / 36, 1.0);
  REQUIRE(a);
  REQUIRE(b);
  for (int i = 0; i < 2; ++i) {
    CHECK(a->weights.omega_axis[i] == doctest::Approx(b->weights.omega_axis[i]).epsilon(1e-13));
    CHECK(a->rates.s_axis[i] == doctest::Approx(b->rates.s_axis[i]).epsilon(1e-13));
  }
  CHECK(a->rates.s2_cross[0] == doctest::Approx(b->rates.s2_cross[0]).epsilon(1e-13));
}

TEST_CASE("solve_model infeasibility outside the solvable region") {
  const Discretization disc = disc_from_xi(0.01, 250.0);
  std::string why;
  // Far outside any feasible region: the axis equation has no admissible root.
  const auto m = solve_model_eps(2, {1.4, 1.4}, 0.0, 0.0, disc, 1.0 / 36, 1.0, &why);
  CHECK_FALSE(m);
  CHECK(why.find("infeasible") != std::string::npos);
}

TEST_CASE("isotropic closed form (s_x = 1)") {
  SUBCASE("eps = 0.1 rational values") {
    const auto v = isotropic_closed_form_values(0.1, 1.0 / 36, 2);
    REQUIRE(v.feasible);
    CHECK(v.omega0 == doctest::Approx(32.0 / 45).epsilon(1e-12));
    CHECK(v.omega_axis == doctest::Approx(2.0 / 45).epsilon(1e-12));
    CHECK(v.s2_axis == doctest::Approx(12.0 / 11).epsilon(1e-12));
    CHECK(v.s2_cross == doctest::Approx(15.0 / 13).epsilon(1e-12));
  }
  SUBCASE("eps = 0.2 rational values") {
    const auto v = isotropic_closed_form_values(0.2, 1.0 / 36, 2);
    REQUIRE(v.feasible);
    CHECK(v.omega0 == doctest::Approx(14.0 / 45).epsilon(1e-12));
    CHECK(v.omega_axis == doctest::Approx(13.0 / 90).epsilon(1e-12));
    CHECK(v.s2_axis == doctest::Approx(18.0 / 19).epsilon(1e-12));
    CHECK(v.s2_cross == doctest::Approx(90.0 / 101).epsilon(1e-12));
  }
  SUBCASE("pole at eps = 5/6 is infeasible") {
    const auto v = isotropic_closed_form_values(5.0 / 6, 1.0 / 36, 2);
    CHECK_FALSE(v.feasible);
  }
  SUBCASE("closed form satisfies the general residual system") {
    // feasible eps window at omega_tilde = 1/36, d = 2 is roughly (1/18, 5/18)
    for (double eps : {0.1, 0.15, 0.2, 0.25}) {
      const auto v = isotropic_closed_form_values(eps, 1.0 / 36, 2);
      REQUIRE(v.feasible);
      CHECK(std::abs(residuals::axis_eq(eps, 1.0, v.s2_axis)) < 1e-12);
      CHECK(std::abs(residuals::weight_eq(eps, v.omega_axis, 1.0, 1.0 / 36, 2)) < 1e-12);
      CHECK(std::abs(residuals::cross_eq(eps, eps, v.omega_axis, v.omega_axis, 1.0 / 36, 2,
                                         1.0, 1.0, v.s2_axis, v.s2_cross)) < 1e-12);
    }
  }
  SUBCASE("anisotropic input is rejected") {
    PDEParams pde;
    pde.d = 2;
    pde.kappa = {0.25 / 16, 0.10 / 16};
    std::string why;
    CHECK_FALSE(isotropic_closed_form(pde, disc_from_xi(1.0 / 40, 16.0), 1.0 / 36, &why));
    CHECK(why.find("anisotropic") != std::string::npos);
  }
}

TEST_CASE("axis-lattice closed form") {
  const double rt3 = std::sqrt(3.0);
  SUBCASE("eps = 0.1 with source matches the table") {
    const double dx = 1.0 / 40;
    const auto v = axis_closed_form_values(0.1, -M_PI * M_PI, 16.0 * dx * dx, 2);
    REQUIRE(v.feasible);
    CHECK(v.omega0 == doctest::Approx(1.0 - 0.4 * rt3).epsilon(1e-12));
    CHECK(v.omega_axis == doctest::Approx(0.1 * rt3).epsilon(1e-12));
    CHECK(v.s2_axis == doctest::Approx(4.0 * rt3 - 6.0).epsilon(1e-12));
    REQUIRE(v.s);
    CHECK(*v.s == doctest::Approx(1.243448367507882).epsilon(1e-12));
  }
  SUBCASE("eps = 0.2 is infeasible: omega0 = 1 - 0.8 sqrt(3) < 0") {
    const auto v = axis_closed_form_values(0.2, 0.0, 0.01, 2);
    CHECK_FALSE(v.feasible);
    CHECK(v.omega0 == doctest::Approx(1.0 - 0.8 * rt3).epsilon(1e-12));
    CHECK(v.omega0 < 0.0);
  }
  SUBCASE("eps -> 0 sends all mass to the rest population") {
    const auto v = axis_closed_form_values(1e-9, 0.0, 0.01, 2);
    CHECK(v.omega0 == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("anisotropic kappa is rejected") {
    PDEParams pde;
    pde.d = 2;
    pde.kappa = {0.25 / 16, 0.10 / 16};
    std::string why;
    CHECK_FALSE(axis_lattice_closed_form(pde, disc_from_xi(1.0 / 40, 16.0), &why));
    CHECK(why.find("anisotropic") != std::string::npos);
  }
  SUBCASE("d = 1 axis synthesis is feasible (no cross conditions)") {
    PDEParams pde;
    pde.d = 1;
    pde.kappa = {0.1 / 16};
    CHECK(axis_lattice_closed_form(pde, disc_from_xi(1.0 / 40, 16.0)).has_value());
  }
}

TEST_CASE("isotropy spread check") {
  CHECK(is_isotropic({0.3, 0.3, 0.3}));
  CHECK(is_isotropic({0.3, 0.3 * (1 + 1e-14)}));
  CHECK_FALSE(is_isotropic({0.25, 0.10}));
}
