#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrtlb/lattice.hpp"

namespace mrtlb {

struct PDEParams {
  int d = 0;
  std::vector<double> kappa;  // per-axis diffusion coefficients, > 0
  double eta = 0.0;           // linear source rate
  double source_const = 0.0;  // constant source S
};

struct Discretization {
  double dx = 0.0;
  double dt = 0.0;
  double xi() const { return dt / (dx * dx); }  // diffusive scaling ratio
};

struct DiffusionNumbers {
  std::vector<double> eps;        // (1/s_{x_i} - 1/2) * second weight moment
  std::vector<double> eps_tilde;  // kappa_{x_i} * xi
};

struct ModelParams {
  LatticeSpec lattice;
  WeightSet weights;
  RelaxationSet rates;
  std::vector<double> s_tilde_axis;  // d, pre-correction axis rates
  PDEParams pde;
  Discretization disc;

  DiffusionNumbers diffusion_numbers() const;
};

/// Residuals of the fourth-order consistency system in Appendix-B form.
/// All rates here are the pre-correction (tilde) values; the third-order
/// rates are tied to the partner axis rate and the fourth-order rates to the
/// shared axis second-moment rate.
namespace residuals {

double err1(double s_alpha, double s2_beta, double s3_gamma);
double err2(double s_alpha, double s2_beta);

/// 2 omega_i + 4 (d-1) omega_tilde, the second weight moment per axis.
double second_weight_moment(double omega_i, double omega_tilde, int d);

/// eqi: eps_tilde - (1/s - 1/2) * second_weight_moment.
double weight_eq(double eps_tilde, double omega_i, double s_tilde, double omega_tilde, int d);
/// eqii: scalar in the axis rate once omega is eliminated through eqi.
double axis_eq(double eps_tilde, double s_tilde, double s2_axis);
/// eqij: scalar in the cross rate for fixed axis solutions.
double cross_eq(double eps_i, double eps_j, double omega_i, double omega_j,
                double omega_tilde, int d, double s_tilde_i, double s_tilde_j,
                double s2_axis, double s_cross);

}  // namespace residuals

/// Maps the eta-corrected rate s_tilde back to the actual relaxation rate.
/// Returns nullopt when the radicand is negative (the correction is
/// infeasible for this eta * dt). Exact passthrough for |eta*dt| < 1e-14.
std::optional<double> tilde_to_s(double s_tilde, double eta, double dt);

struct AxisRoot {
  double s_tilde = 0.0;
  double omega = 0.0;
};

/// All admissible axis solutions (s_tilde in (0,2), omega in (0,1)) of the
/// axis residual pair, ascending in s_tilde. Bracketed bisection over 512
/// subintervals of (0,2), refined to 1e-14.
std::vector<AxisRoot> solve_axis(double eps_tilde, double omega_tilde, double s2_axis, int d);

/// Root of the cross residual in (0,2) for the given axis solutions, or
/// nullopt when no admissible root exists.
std::optional<double> solve_cross(const AxisRoot& axis_i, const AxisRoot& axis_j,
                                  double eps_i, double eps_j, double omega_tilde,
                                  double s2_axis, int d);

double default_omega_tilde(int d);
double default_s2_axis();

/// Full-family synthesis: per-axis root enumeration followed by a
/// backtracking assignment over the per-axis candidates (descending s_tilde,
/// axes with equal eps_tilde share one choice) such that every pair admits a
/// cross rate in (0,2) and omega_0 lands in (0,1). Returns nullopt with a
/// reason when no assignment works.
std::optional<ModelParams> solve_model(const PDEParams& pde, const Discretization& disc,
                                       double omega_tilde, double s2_axis,
                                       std::string* why = nullptr);

/// Same, with the target diffusion numbers given directly.
std::optional<ModelParams> solve_model_eps(int d, const std::vector<double>& eps_tilde,
                                           double eta, double source_const,
                                           const Discretization& disc, double omega_tilde,
                                           double s2_axis, std::string* why = nullptr);

/// Closed-form Full-family parameters for the isotropic equation with
/// s_{x_i} = 1 (values reported before range filtering).
struct IsotropicClosedForm {
  double omega0 = 0.0;
  double omega_axis = 0.0;
  double s2_axis = 0.0;
  double s2_cross = 0.0;
  bool feasible = false;
  std::string reason;
};
IsotropicClosedForm isotropic_closed_form_values(double eps, double omega_tilde, int d);
std::optional<ModelParams> isotropic_closed_form(const PDEParams& pde, const Discretization& disc,
                                                 double omega_tilde, std::string* why = nullptr);

/// Closed-form Axis-family (DdQ(2d+1)) parameters for the isotropic equation.
struct AxisClosedForm {
  double omega0 = 0.0;
  double omega_axis = 0.0;
  double s_tilde = 0.0;
  double s2_axis = 0.0;
  std::optional<double> s;  // eta-corrected axis rate
  bool feasible = false;
  std::string reason;
};
AxisClosedForm axis_closed_form_values(double eps, double eta, double dt, int d);
std::optional<ModelParams> axis_lattice_closed_form(const PDEParams& pde,
                                                    const Discretization& disc,
                                                    std::string* why = nullptr);

/// True when the diffusion coefficients are isotropic to relative 1e-12.
bool is_isotropic(const std::vector<double>& kappa);

}  // namespace mrtlb
