#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mrtlb/params.hpp"

namespace mrtlb {

class DivergenceDetected : public std::runtime_error {
public:
  DivergenceDetected(size_t cell, long step)
      : std::runtime_error("divergence detected at cell " + std::to_string(cell) +
                           ", step " + std::to_string(step)),
        cell(cell),
        step(step) {}
  size_t cell;
  long step;
};

/// Periodic d-dimensional grid of q-component distribution vectors with a
/// same-shape scratch buffer; layout is cell-major (f[cell * q + k]) with the
/// last axis index fastest.
struct FieldState {
  std::vector<int> shape;
  int q = 0;
  std::vector<double> f;
  std::vector<double> f_next;
  long time_index = 0;

  size_t cells() const {
    size_t n = 1;
    for (int e : shape) n *= size_t(e);
    return n;
  }
};

/// phi = (2 sum_k f_k + dt S) / (2 - dt eta). Throws DegenerateSource via the
/// solver constructor precondition (dt * eta != 2 checked there); standalone
/// callers get the raw formula.
double macro_field(const double* cell_f, int q, double eta, double source_const, double dt);

/// Evolution engine for one model: moment-space collision with source,
/// pull-equivalent periodic streaming, and the two initialization schemes.
/// The OpenMP step and the serial reference share the per-cell kernel.
class Solver {
public:
  explicit Solver(const ModelParams& model);

  const ModelParams& model() const { return model_; }

  FieldState allocate(const std::vector<int>& shape) const;

  /// f_k = omega_{k-1} phi0 per cell.
  void init_equilibrium(FieldState& state, const std::vector<double>& phi0) const;

  /// f = f_eq - dx Lambda^{-1} (e_k . grad f_eq); grad_phi0 holds d
  /// components per cell. Pass an empty vector to fall back to fourth-order
  /// central differences of phi0.
  void init_fourth_order(FieldState& state, const std::vector<double>& phi0,
                         const std::vector<double>& grad_phi0) const;

  /// One step, OpenMP-parallel over cells. Throws DivergenceDetected when a
  /// non-finite macroscopic value appears.
  void step(FieldState& state) const;

  /// Serial reference: separate collide and stream sweeps.
  void step_serial(FieldState& state) const;

  /// Per-cell macroscopic field.
  std::vector<double> macro(const FieldState& state) const;

  /// Advances to t_final (floor to a whole number of steps, warning to
  /// stderr when t_final is not a multiple of dt). Returns the step count.
  long run(FieldState& state, double t_final, bool use_serial = false) const;

  /// Fourth-order central-difference gradient of a periodic nodal field,
  /// d components per cell.
  std::vector<double> fd_gradient(const std::vector<double>& phi,
                                  const std::vector<int>& shape) const;

  void collide_cell(const double* fin, double phi, double source, double* fout) const;

private:
  void stream_scatter(const FieldState& state, const double* collided, double* out,
                      size_t cell, const std::vector<int>& coords) const;

  ModelParams model_;
  int q_ = 0, d_ = 0;
  double dt_ = 0.0, dx_ = 0.0, eta_ = 0.0, source_const_ = 0.0;
  std::vector<double> m_;        // M, row-major
  std::vector<double> minv_;     // M^{-1}
  std::vector<double> sdiag_;    // expanded relaxation rates
  std::vector<double> meq_;      // M . omega (per-unit-phi equilibrium moments)
  std::vector<double> wexp_;     // expanded weights
  std::vector<double> lam_inv_;  // Lambda^{-1} = M^{-1} S^{-1} M
};

}  // namespace mrtlb
