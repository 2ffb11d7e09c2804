#include "mrtlb/bench.hpp"

#include <cmath>
#include <stdexcept>

namespace mrtlb {

BenchmarkCase gauss_hill_case(int d, const std::vector<double>& kappa, double gamma0) {
  if (int(kappa.size()) != d)
    throw std::invalid_argument("gauss_hill_case: expected one kappa per axis");
  BenchmarkCase bc;
  bc.name = "gauss_hill";
  bc.d = d;
  bc.pde.d = d;
  bc.pde.kappa = kappa;
  bc.pde.eta = 0.0;
  bc.pde.source_const = 0.0;

  const double phi_total = 2.0 * M_PI * gamma0;
  const double g2 = gamma0 * gamma0;

  bc.analytic = [d, kappa, phi_total, g2](const std::vector<double>& x, double t) {
    double det = 1.0, quad = 0.0;
    for (int l = 0; l < d; ++l) {
      const double var = g2 + 2.0 * kappa[l] * t;
      det *= var;
      quad += x[l] * x[l] / var;
    }
    return phi_total / (2.0 * M_PI * std::sqrt(det)) * std::exp(-0.5 * quad);
  };
  bc.phi0 = [analytic = bc.analytic](const std::vector<double>& x) { return analytic(x, 0.0); };
  bc.grad_phi0 = [phi0 = bc.phi0, g2, d](const std::vector<double>& x) {
    const double v = phi0(x);
    std::vector<double> g(d);
    for (int l = 0; l < d; ++l) g[l] = -v * x[l] / g2;
    return g;
  };
  return bc;
}

BenchmarkCase sine_source_case(double kappa_x, double kappa_y) {
  BenchmarkCase bc;
  bc.name = "sine_source";
  bc.d = 2;
  bc.pde.d = 2;
  bc.pde.kappa = {kappa_x, kappa_y};
  bc.pde.eta = -M_PI * M_PI;
  bc.pde.source_const = M_PI * M_PI * M_PI * M_PI;

  const double decay = M_PI * M_PI * (kappa_x + kappa_y + 1.0);
  bc.analytic = [decay](const std::vector<double>& x, double t) {
    return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]) * std::exp(-decay * t) + M_PI * M_PI;
  };
  bc.phi0 = [analytic = bc.analytic](const std::vector<double>& x) { return analytic(x, 0.0); };
  bc.grad_phi0 = [](const std::vector<double>& x) {
    return std::vector<double>{M_PI * std::cos(M_PI * x[0]) * std::sin(M_PI * x[1]),
                               M_PI * std::sin(M_PI * x[0]) * std::cos(M_PI * x[1])};
  };
  return bc;
}

std::vector<int> grid_shape(int d, double dx) {
  const double n = 2.0 / dx;
  const int ni = int(std::lround(n));
  if (ni < 4 || std::abs(n - ni) > 1e-9 * n)
    throw std::invalid_argument("grid_shape: 2/dx must be a whole number of nodes");
  return std::vector<int>(d, ni);
}

std::vector<double> node_position(const std::vector<int>& coords, double dx) {
  std::vector<double> x(coords.size());
  for (size_t l = 0; l < coords.size(); ++l) x[l] = -1.0 + coords[l] * dx;
  return x;
}

namespace {

template <class F>
void for_each_node(const std::vector<int>& shape, double dx, F&& body) {
  const int d = int(shape.size());
  std::vector<int> coords(d, 0);
  std::vector<double> x(d);
  size_t cell = 0;
  while (true) {
    for (int l = 0; l < d; ++l) x[l] = -1.0 + coords[l] * dx;
    body(cell, x);
    ++cell;
    int l = d - 1;
    while (l >= 0 && ++coords[l] == shape[l]) coords[l--] = 0;
    if (l < 0) break;
  }
}

}  // namespace

std::vector<double> sample_initial(const BenchmarkCase& bc, const std::vector<int>& shape,
                                   double dx) {
  size_t n = 1;
  for (int e : shape) n *= size_t(e);
  std::vector<double> out(n);
  for_each_node(shape, dx, [&](size_t c, const std::vector<double>& x) { out[c] = bc.phi0(x); });
  return out;
}

std::vector<double> sample_analytic(const BenchmarkCase& bc, const std::vector<int>& shape,
                                    double dx, double t) {
  size_t n = 1;
  for (int e : shape) n *= size_t(e);
  std::vector<double> out(n);
  for_each_node(shape, dx,
                [&](size_t c, const std::vector<double>& x) { out[c] = bc.analytic(x, t); });
  return out;
}

std::vector<double> sample_gradient(const BenchmarkCase& bc, const std::vector<int>& shape,
                                    double dx) {
  if (!bc.grad_phi0) return {};
  size_t n = 1;
  for (int e : shape) n *= size_t(e);
  const int d = int(shape.size());
  std::vector<double> out(n * d);
  for_each_node(shape, dx, [&](size_t c, const std::vector<double>& x) {
    const auto g = bc.grad_phi0(x);
    for (int l = 0; l < d; ++l) out[c * d + l] = g[l];
  });
  return out;
}

double l2_error(const std::vector<double>& numeric, const std::vector<double>& exact) {
  if (numeric.size() != exact.size())
    throw std::invalid_argument("l2_error: field size mismatch");
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < numeric.size(); ++i) {
    const double diff = numeric[i] - exact[i];
    num += diff * diff;
    den += exact[i] * exact[i];
  }
  if (den == 0.0) throw DegenerateNorm("l2_error: analytic field is identically zero");
  return std::sqrt(num / den);
}

RunResult run_case(const BenchmarkCase& bc, const ModelParams& model, InitScheme scheme,
                   double t_final, bool use_serial) {
  const double dx = model.disc.dx;
  const auto shape = grid_shape(bc.d, dx);
  const auto phi0 = sample_initial(bc, shape, dx);

  Solver solver(model);
  FieldState state = solver.allocate(shape);
  if (scheme == InitScheme::Equilibrium) {
    solver.init_equilibrium(state, phi0);
  } else {
    solver.init_fourth_order(state, phi0, sample_gradient(bc, shape, dx));
  }
  RunResult result;
  result.steps = solver.run(state, t_final, use_serial);
  result.phi = solver.macro(state);
  return result;
}

std::vector<ConvergenceRow> convergence_study(const BenchmarkCase& bc,
                                              const ModelFactory& factory,
                                              const std::vector<double>& dx_list,
                                              double scaling_ratio, double t_final,
                                              InitScheme scheme) {
  for (size_t i = 1; i < dx_list.size(); ++i)
    if (!(dx_list[i] < dx_list[i - 1]))
      throw std::invalid_argument("convergence_study: dx_list must be strictly decreasing");

  std::vector<ConvergenceRow> rows;
  for (double dx : dx_list) {
    ConvergenceRow row;
    row.dx = dx;
    row.dt = scaling_ratio * dx * dx;
    const double ratio = t_final / row.dt;
    if (std::abs(ratio - std::lround(ratio)) > 1e-9 * std::max(1.0, ratio))
      throw std::invalid_argument("convergence_study: t_final must be a multiple of every dt");

    auto model = factory(dx, row.dt);
    if (!model) throw std::invalid_argument("convergence_study: model factory returned infeasible");
    try {
      const auto result = run_case(bc, *model, scheme, t_final);
      const auto exact = sample_analytic(bc, grid_shape(bc.d, dx), dx, t_final);
      row.l2 = l2_error(result.phi, exact);
    } catch (const DivergenceDetected&) {
      row.diverged = true;
      row.l2 = std::nan("");
    }
    rows.push_back(row);
  }
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].diverged || rows[i - 1].diverged) continue;
    rows[i].rate = std::log(rows[i - 1].l2 / rows[i].l2) / std::log(rows[i - 1].dx / rows[i].dx);
  }
  return rows;
}

}  // namespace mrtlb
