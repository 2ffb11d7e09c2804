// Times the OpenMP step kernel against the serial reference on a
// representative model and reports throughput in million lattice updates
// per second.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "mrtlb/bench.hpp"
#include "mrtlb/solver.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace mrtlb;

namespace {

double time_steps(const Solver& solver, FieldState& state, int steps, bool serial) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int s = 0; s < steps; ++s)
    serial ? solver.step_serial(state) : solver.step(state);
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int n = 256;
  int steps = 50;
  if (argc > 1) n = std::stoi(argv[1]);
  if (argc > 2) steps = std::stoi(argv[2]);

  const double dx = 2.0 / n;
  Discretization disc{dx, 250.0 * dx * dx};
  const auto model = solve_model_eps(2, {0.30, 0.10}, 0.0, 0.0, disc,
                                     default_omega_tilde(2), default_s2_axis());
  if (!model) {
    std::fprintf(stderr, "parameter synthesis failed\n");
    return 1;
  }

  const auto bc = gauss_hill_case(2, model->pde.kappa);
  const auto shape = grid_shape(2, dx);
  const auto phi0 = sample_initial(bc, shape, dx);

  Solver solver(*model);
  FieldState omp_state = solver.allocate(shape);
  FieldState ser_state = solver.allocate(shape);
  solver.init_equilibrium(omp_state, phi0);
  solver.init_equilibrium(ser_state, phi0);

  // Warm up and verify the two paths agree.
  solver.step(omp_state);
  solver.step_serial(ser_state);
  double max_diff = 0.0;
  for (size_t i = 0; i < omp_state.f.size(); ++i)
    max_diff = std::max(max_diff, std::abs(omp_state.f[i] - ser_state.f[i]));

  const double cells = double(omp_state.cells());
  const double t_omp = time_steps(solver, omp_state, steps, false);
  const double t_ser = time_steps(solver, ser_state, steps, true);

  int nthreads = 1;
#ifdef _OPENMP
#pragma omp parallel
#pragma omp master
  nthreads = omp_get_num_threads();
#endif

  std::printf("grid %dx%d, %d steps, %d thread(s)\n", n, n, steps, nthreads);
  std::printf("parallel: %8.3f s  (%7.2f MLUP/s)\n", t_omp, cells * steps / t_omp / 1e6);
  std::printf("serial:   %8.3f s  (%7.2f MLUP/s)\n", t_ser, cells * steps / t_ser / 1e6);
  std::printf("speedup:  %8.3f\n", t_ser / t_omp);
  std::printf("max |f_omp - f_serial| after 1 step: %.3e\n", max_diff);
  return max_diff == 0.0 ? 0 : 2;
}
