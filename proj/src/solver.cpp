#include "mrtlb/solver.hpp"

#include <cmath>
#include <cstdio>

#include "mrtlb/stability.hpp"

namespace mrtlb {

double macro_field(const double* cell_f, int q, double eta, double source_const, double dt) {
  double sum = 0.0;
  for (int k = 0; k < q; ++k) sum += cell_f[k];
  return (2.0 * sum + dt * source_const) / (2.0 - dt * eta);
}

Solver::Solver(const ModelParams& model) : model_(model) {
  const LatticeSpec& spec = model_.lattice;
  q_ = spec.q;
  d_ = spec.d;
  dt_ = model_.disc.dt;
  dx_ = model_.disc.dx;
  eta_ = model_.pde.eta;
  source_const_ = model_.pde.source_const;
  if (dt_ * eta_ == 2.0) throw DegenerateSource("Solver: dt * eta = 2");

  m_.assign(size_t(q_) * q_, 0.0);
  minv_.assign(size_t(q_) * q_, 0.0);
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j) {
      m_[size_t(i) * q_ + j] = spec.M(i, j);
      minv_[size_t(i) * q_ + j] = spec.M_inv(i, j);
    }
  sdiag_ = model_.rates.expand(spec);
  wexp_ = model_.weights.expand(spec);
  meq_.assign(q_, 0.0);
  for (int r = 0; r < q_; ++r) {
    double acc = 0.0;
    for (int k = 0; k < q_; ++k) acc += spec.M(r, k) * wexp_[k];
    meq_[r] = acc;
  }
  // Lambda^{-1} = M^{-1} S^{-1} M
  lam_inv_.assign(size_t(q_) * q_, 0.0);
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j) {
      double acc = 0.0;
      for (int k = 0; k < q_; ++k)
        acc += spec.M_inv(i, k) / sdiag_[k] * spec.M(k, j);
      lam_inv_[size_t(i) * q_ + j] = acc;
    }
}

FieldState Solver::allocate(const std::vector<int>& shape) const {
  FieldState state;
  state.shape = shape;
  state.q = q_;
  state.f.assign(state.cells() * q_, 0.0);
  state.f_next.assign(state.cells() * q_, 0.0);
  return state;
}

void Solver::init_equilibrium(FieldState& state, const std::vector<double>& phi0) const {
  const size_t n = state.cells();
  for (size_t c = 0; c < n; ++c)
    for (int k = 0; k < q_; ++k) state.f[c * q_ + k] = wexp_[k] * phi0[c];
  state.time_index = 0;
}

void Solver::init_fourth_order(FieldState& state, const std::vector<double>& phi0,
                               const std::vector<double>& grad_phi0) const {
  const size_t n = state.cells();
  const std::vector<double>& grad =
      grad_phi0.empty() ? fd_gradient(phi0, state.shape) : grad_phi0;

  std::vector<double> g(q_), corr(q_);
  for (size_t c = 0; c < n; ++c) {
    for (int k = 0; k < q_; ++k) {
      double edotg = 0.0;
      for (int l = 0; l < d_; ++l)
        edotg += model_.lattice.velocities[k][l] * grad[c * d_ + l];
      g[k] = wexp_[k] * edotg;
    }
    for (int i = 0; i < q_; ++i) {
      double acc = 0.0;
      for (int k = 0; k < q_; ++k) acc += lam_inv_[size_t(i) * q_ + k] * g[k];
      corr[i] = acc;
    }
    for (int k = 0; k < q_; ++k)
      state.f[c * q_ + k] = wexp_[k] * phi0[c] - dx_ * corr[k];
  }
  state.time_index = 0;
}

void Solver::collide_cell(const double* fin, double phi, double source, double* fout) const {
  double m[64];
  for (int r = 0; r < q_; ++r) {
    const double* row = &m_[size_t(r) * q_];
    double acc = 0.0;
    for (int k = 0; k < q_; ++k) acc += row[k] * fin[k];
    m[r] = acc;
  }
  for (int r = 0; r < q_; ++r) {
    const double s = sdiag_[r];
    m[r] = m[r] - s * (m[r] - phi * meq_[r]) + dt_ * (1.0 - 0.5 * s) * source * meq_[r];
  }
  for (int k = 0; k < q_; ++k) {
    const double* row = &minv_[size_t(k) * q_];
    double acc = 0.0;
    for (int r = 0; r < q_; ++r) acc += row[r] * m[r];
    fout[k] = acc;
  }
}

namespace {

void linear_to_coords(size_t cell, const std::vector<int>& shape, std::vector<int>& coords) {
  for (int l = int(shape.size()) - 1; l >= 0; --l) {
    coords[l] = int(cell % shape[l]);
    cell /= shape[l];
  }
}

size_t coords_to_linear(const std::vector<int>& coords, const std::vector<int>& shape) {
  size_t idx = 0;
  for (size_t l = 0; l < shape.size(); ++l) idx = idx * shape[l] + coords[l];
  return idx;
}

}  // namespace

void Solver::stream_scatter(const FieldState& state, const double* collided, double* out,
                            size_t cell, const std::vector<int>& coords) const {
  // Destination of component k is the periodic neighbor in direction e_k;
  // equivalent to pull streaming f_k(x, t+dt) = f'_k(x - e_k dx, t).
  (void)cell;
  std::vector<int> dest(d_);
  for (int k = 0; k < q_; ++k) {
    for (int l = 0; l < d_; ++l) {
      int c = coords[l] + model_.lattice.velocities[k][l];
      if (c < 0) c += state.shape[l];
      if (c >= state.shape[l]) c -= state.shape[l];
      dest[l] = c;
    }
    out[coords_to_linear(dest, state.shape) * q_ + k] = collided[k];
  }
}

void Solver::step(FieldState& state) const {
  const size_t n = state.cells();
  const double* fin = state.f.data();
  double* fout = state.f_next.data();

  long bad_cell = -1;

#pragma omp parallel
  {
    std::vector<int> coords(d_);
    std::vector<double> collided(q_);
#pragma omp for schedule(static)
    for (long c = 0; c < long(n); ++c) {
      const double* cf = fin + size_t(c) * q_;
      const double phi = macro_field(cf, q_, eta_, source_const_, dt_);
      if (!std::isfinite(phi)) {
#pragma omp critical
        if (bad_cell < 0 || c < bad_cell) bad_cell = c;
        continue;
      }
      const double source = eta_ * phi + source_const_;
      collide_cell(cf, phi, source, collided.data());
      linear_to_coords(size_t(c), state.shape, coords);
      stream_scatter(state, collided.data(), fout, size_t(c), coords);
    }
  }
  if (bad_cell >= 0) throw DivergenceDetected(size_t(bad_cell), state.time_index);

  state.f.swap(state.f_next);
  ++state.time_index;
}

void Solver::step_serial(FieldState& state) const {
  const size_t n = state.cells();
  // Collide pass.
  std::vector<double> collided(n * q_);
  for (size_t c = 0; c < n; ++c) {
    const double* cf = state.f.data() + c * q_;
    const double phi = macro_field(cf, q_, eta_, source_const_, dt_);
    if (!std::isfinite(phi)) throw DivergenceDetected(c, state.time_index);
    const double source = eta_ * phi + source_const_;
    collide_cell(cf, phi, source, collided.data() + c * q_);
  }
  // Stream pass (pull).
  std::vector<int> coords(d_), src(d_);
  for (size_t c = 0; c < n; ++c) {
    linear_to_coords(c, state.shape, coords);
    for (int k = 0; k < q_; ++k) {
      for (int l = 0; l < d_; ++l) {
        int x = coords[l] - model_.lattice.velocities[k][l];
        if (x < 0) x += state.shape[l];
        if (x >= state.shape[l]) x -= state.shape[l];
        src[l] = x;
      }
      state.f_next[c * q_ + k] = collided[coords_to_linear(src, state.shape) * q_ + k];
    }
  }
  state.f.swap(state.f_next);
  ++state.time_index;
}

std::vector<double> Solver::macro(const FieldState& state) const {
  const size_t n = state.cells();
  std::vector<double> phi(n);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < long(n); ++c)
    phi[c] = macro_field(state.f.data() + size_t(c) * q_, q_, eta_, source_const_, dt_);
  return phi;
}

long Solver::run(FieldState& state, double t_final, bool use_serial) const {
  const double ratio = t_final / dt_;
  long steps = long(std::floor(ratio + 1e-9));
  if (std::abs(ratio - double(steps)) > 1e-9)
    std::fprintf(stderr, "warning: t_final = %g is not a multiple of dt = %g; running %ld steps (t = %g)\n",
                 t_final, dt_, steps, steps * dt_);
  for (long s = 0; s < steps; ++s)
    use_serial ? step_serial(state) : step(state);
  return steps;
}

std::vector<double> Solver::fd_gradient(const std::vector<double>& phi,
                                        const std::vector<int>& shape) const {
  size_t n = 1;
  for (int e : shape) n *= size_t(e);
  std::vector<double> grad(n * d_, 0.0);
  std::vector<int> coords(d_), nb(d_);
  for (size_t c = 0; c < n; ++c) {
    linear_to_coords(c, shape, coords);
    for (int l = 0; l < d_; ++l) {
      const int nl = shape[l];
      auto sample = [&](int offset) {
        nb = coords;
        nb[l] = ((coords[l] + offset) % nl + nl) % nl;
        return phi[coords_to_linear(nb, shape)];
      };
      grad[c * d_ + l] =
          (-sample(2) + 8.0 * sample(1) - 8.0 * sample(-1) + sample(-2)) / (12.0 * dx_);
    }
  }
  return grad;
}

}  // namespace mrtlb
