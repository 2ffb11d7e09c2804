#pragma once

#include <stdexcept>
#include <vector>

#include "mrtlb/params.hpp"

namespace mrtlb {

class DegenerateSource : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Collision Jacobian J = Lambda (E - I) + (2 dt eta / (2 - dt eta)) E with
/// the weight-projector E (row i constant equal to omega_{i-1}) and the
/// expanded weight diagonal W. The constant source is dropped.
struct JacobianBundle {
  linalg::Matrix J;
  linalg::Matrix E;
  std::vector<double> weights;
  double eta_factor = 0.0;
};

JacobianBundle build_jacobian(const ModelParams& model);

struct StabilityReport {
  double jw_asymmetry = 0.0;   // max |(JW)_{ij} - (JW)_{ji}|
  double jw_eigen_max = 0.0;   // largest eigenvalue of W^{-1/2} (JW) W^{-1/2}
  bool rate_ranges_ok = false;
  bool structure_ok = false;
  double vn_max_modulus = 0.0;
  bool vn_simple_roots = true;
  int scan_resolution = 0;

  bool scan_stable() const { return vn_max_modulus <= 1.0 + 1e-10 && vn_simple_roots; }
};

/// Structure part of the report: JW symmetry defect, eigenvalues of the
/// symmetrized similarity transform, and the explicit rate-range/tie checks.
StabilityReport check_structure(const ModelParams& model, double tol_sym = 1e-12,
                                double tol_neg = 1e-12);

/// Amplification matrix G = diag(exp(-i e_k . theta)) (I + J).
linalg::CMatrix amplification(const JacobianBundle& jac, const LatticeSpec& spec,
                              const std::vector<double>& wavevector);

/// Von Neumann scan over the uniform wavevector grid [0, 2pi)^d; fills the
/// scan fields of the report. The conserved eigenvalue at wavevector zero is
/// exempt from the simple-root requirement.
void von_neumann_scan(const ModelParams& model, int resolution, StabilityReport& report);

int default_scan_resolution(int d);

struct GridSpec {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  int nx = 0, ny = 0;
};

struct RegionRaster {
  std::vector<double> xs, ys;
  std::vector<int> verdict;  // ny rows by nx columns, row-major over y then x
  int at(int ix, int iy) const { return verdict[size_t(iy) * xs.size() + ix]; }
};

/// Fixed relaxation rates used by the stability-region scan; they satisfy
/// the structure-preserving ties.
RelaxationSet region_scan_rates(const LatticeSpec& spec);

/// L2 stability verdicts over a grid of axis weights (omega_1, omega_2) at
/// fixed omega_tilde; axes beyond the second reuse omega_2.
RegionRaster stability_region(int d, double omega_tilde, const RelaxationSet& rates,
                              const GridSpec& grid, int resolution);

/// Fourth-order solvability verdicts over a grid of (eps_tilde_x, eps_tilde_y).
RegionRaster solvability_region(int d, double omega_tilde, double s2_axis, double eta,
                                double dt, const GridSpec& grid);

}  // namespace mrtlb
