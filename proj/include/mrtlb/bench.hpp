#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mrtlb/solver.hpp"

namespace mrtlb {

class DegenerateNorm : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Analytic benchmark on the periodic domain [-1,1]^d.
struct BenchmarkCase {
  std::string name;
  int d = 0;
  PDEParams pde;
  std::function<double(const std::vector<double>&)> phi0;
  std::function<std::vector<double>(const std::vector<double>&)> grad_phi0;  // may be null
  std::function<double(const std::vector<double>&, double)> analytic;
};

/// Gauss Hill: phi0 = phi_total / (2 pi Gamma0^d) exp(-x.x / (2 Gamma0^2))
/// with phi_total = 2 pi Gamma0; the spreading covariance is
/// Gamma(t) = Gamma0^2 I + 2 diag(kappa) t.
BenchmarkCase gauss_hill_case(int d, const std::vector<double>& kappa, double gamma0 = 0.05);

/// Separable sine with linear source: eta = -pi^2, S = pi^4,
/// phi0 = sin(pi x) sin(pi y) + pi^2,
/// phi* = sin(pi x) sin(pi y) exp(-pi^2 (kx + ky + 1) t) + pi^2.
BenchmarkCase sine_source_case(double kappa_x, double kappa_y);

/// Lattice nodes x_j = -1 + j dx, N = 2/dx per axis (periodic identification
/// of the endpoints). Throws std::invalid_argument when 2/dx is not whole.
std::vector<int> grid_shape(int d, double dx);
std::vector<double> node_position(const std::vector<int>& coords, double dx);

std::vector<double> sample_initial(const BenchmarkCase& bc, const std::vector<int>& shape,
                                   double dx);
std::vector<double> sample_analytic(const BenchmarkCase& bc, const std::vector<int>& shape,
                                    double dx, double t);
/// d components per cell; empty when the case has no analytic gradient.
std::vector<double> sample_gradient(const BenchmarkCase& bc, const std::vector<int>& shape,
                                    double dx);

/// Relative l2 norm sqrt(sum (phi - phi*)^2 / sum phi*^2).
double l2_error(const std::vector<double>& numeric, const std::vector<double>& exact);

enum class InitScheme { Equilibrium, FourthOrder };

struct RunResult {
  std::vector<double> phi;
  long steps = 0;
};

RunResult run_case(const BenchmarkCase& bc, const ModelParams& model, InitScheme scheme,
                   double t_final, bool use_serial = false);

/// Builds the model for one (dx, dt) refinement level; returning nullopt
/// aborts the study.
using ModelFactory = std::function<std::optional<ModelParams>(double dx, double dt)>;

struct ConvergenceRow {
  double dx = 0.0, dt = 0.0;
  double l2 = 0.0;
  bool diverged = false;
  std::optional<double> rate;
};

/// Runs the case at each dx with dt = scaling_ratio * dx^2 and tabulates
/// errors and convergence rates; a diverged run is recorded with an empty
/// rate and the study continues.
std::vector<ConvergenceRow> convergence_study(const BenchmarkCase& bc,
                                              const ModelFactory& factory,
                                              const std::vector<double>& dx_list,
                                              double scaling_ratio, double t_final,
                                              InitScheme scheme);

}  // namespace mrtlb
