#include "mrtlb/params.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace mrtlb {

namespace residuals {

double err1(double sa, double sb, double sg) {
  return -7.0 / 24.0 + 1.0 / (6.0 * sa) +
         (1.0 / (sg * sb) - 1.0 / (2.0 * sg) - 1.0 / (2.0 * sb)) * (1.0 / sa - 1.0) -
         0.5 * (1.0 - 1.0 / sb) * (1.0 / sg - 0.5) + 1.0 / (6.0 * sg);
}

double err2(double sa, double sb) {
  return (1.0 / sa - 1.0) * (1.0 - 1.0 / sb - 1.0 / sa) + 0.5 - 1.0 / (2.0 * sb);
}

double second_weight_moment(double omega_i, double omega_tilde, int d) {
  return 2.0 * omega_i + 4.0 * (d - 1) * omega_tilde;
}

double weight_eq(double eps_tilde, double omega_i, double s_tilde, double omega_tilde, int d) {
  return eps_tilde - (1.0 / s_tilde - 0.5) * second_weight_moment(omega_i, omega_tilde, d);
}

double axis_eq(double eps_tilde, double s_tilde, double s2_axis) {
  return 0.5 * eps_tilde * (1.0 / s_tilde - 0.5) -
         (err1(s_tilde, s2_axis, s_tilde) + err2(s_tilde, s2_axis) * eps_tilde);
}

double cross_eq(double eps_i, double eps_j, double omega_i, double omega_j,
                double omega_tilde, int d, double si, double sj, double s2_axis,
                double s_cross) {
  // Ties: s_{3|x_i^2 x_j} = s_j, s_{3|x_i x_j^2} = s_i, shared axis second
  // moment rate s2 on both axes.
  const double si2j = sj, sij2 = si;
  const double sum6 = err1(si, s2_axis, si2j) + err1(sj, s2_axis, sij2) +
                      err1(si, s_cross, si2j) + err1(sj, s_cross, sij2) +
                      err1(si, s_cross, sij2) + err1(sj, s_cross, si2j);
  const double rhs = 4.0 * omega_tilde * sum6 +
                     err2(si, s2_axis) * eps_j * second_weight_moment(omega_i, omega_tilde, d) +
                     err2(sj, s2_axis) * eps_i * second_weight_moment(omega_j, omega_tilde, d);
  return eps_i * eps_j - rhs;
}

}  // namespace residuals

DiffusionNumbers ModelParams::diffusion_numbers() const {
  DiffusionNumbers out;
  const int d = lattice.d;
  out.eps.resize(d);
  out.eps_tilde.resize(d);
  for (int i = 0; i < d; ++i) {
    const double w2 =
        residuals::second_weight_moment(weights.omega_axis[i], weights.omega_diag, d);
    out.eps[i] = (1.0 / rates.s_axis[i] - 0.5) * w2;
    out.eps_tilde[i] = pde.kappa[i] * disc.xi();
  }
  return out;
}

std::optional<double> tilde_to_s(double s_tilde, double eta, double dt) {
  const double u = eta * dt;
  if (std::abs(u) < 1e-14) return s_tilde;  // removable singularity
  const double rad = (s_tilde - 4.0 * u + u * u * s_tilde + 2.0 * u * s_tilde) / s_tilde;
  if (rad < 0.0) return std::nullopt;
  const double denom = u - std::sqrt(rad) + 1.0;
  if (denom == 0.0) return std::nullopt;
  return 2.0 * u / denom;
}

namespace {

// Bracketed bisection over (0,2): scan uniform subintervals, bisect each sign
// change down to 1e-14, return ascending roots.
std::vector<double> scan_roots(const std::function<double(double)>& f, int subdivisions) {
  std::vector<double> roots;
  const double lo = 0.0, hi = 2.0;
  const double h = (hi - lo) / subdivisions;
  double xa = lo + 0.5 * h;
  double fa = f(xa);
  for (int k = 1; k < subdivisions; ++k) {
    const double xb = lo + (k + 0.5) * h;
    const double fb = f(xb);
    if (std::isfinite(fa) && std::isfinite(fb) && ((fa <= 0.0) != (fb <= 0.0))) {
      double a = xa, b = xb, va = fa;
      while (b - a > 1e-14) {
        const double m = 0.5 * (a + b);
        const double vm = f(m);
        if ((va <= 0.0) == (vm <= 0.0)) {
          a = m;
          va = vm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    xa = xb;
    fa = fb;
  }
  return roots;
}

bool in_open(double v, double lo, double hi) { return v > lo && v < hi; }

void set_reason(std::string* why, const std::string& msg) {
  if (why) *why = msg;
}

ModelParams assemble_full(const LatticeSpec& spec, const std::vector<AxisRoot>& axis,
                          const std::vector<double>& cross, const std::vector<double>& s_actual,
                          double omega_tilde, double s2_axis, const PDEParams& pde,
                          const Discretization& disc) {
  const int d = spec.d;
  ModelParams model;
  model.lattice = spec;
  std::vector<double> omega(d);
  for (int i = 0; i < d; ++i) omega[i] = axis[i].omega;
  model.weights = WeightSet::closed(spec, omega, omega_tilde);

  RelaxationSet rates;
  rates.s0 = 1.0;
  rates.s_axis = s_actual;
  rates.s2_diag.assign(d, s2_axis);
  rates.s2_cross = cross;
  rates.s3.resize(d * (d - 1));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (j != i) rates.s3[third_order_index(d, i, j)] = s_actual[j];
  rates.s4.assign(spec.cross_pairs(), s2_axis);
  model.rates = rates;

  model.s_tilde_axis.resize(d);
  for (int i = 0; i < d; ++i) model.s_tilde_axis[i] = axis[i].s_tilde;
  model.pde = pde;
  model.disc = disc;
  return model;
}

}  // namespace

std::vector<AxisRoot> solve_axis(double eps_tilde, double omega_tilde, double s2_axis, int d) {
  auto f = [&](double s) { return residuals::axis_eq(eps_tilde, s, s2_axis); };
  std::vector<AxisRoot> out;
  for (double s : scan_roots(f, 512)) {
    const double inv = 1.0 / s - 0.5;
    if (inv == 0.0) continue;
    const double omega = 0.5 * (eps_tilde / inv - 4.0 * (d - 1) * omega_tilde);
    if (in_open(s, 0.0, 2.0) && in_open(omega, 0.0, 1.0)) out.push_back({s, omega});
  }
  std::sort(out.begin(), out.end(),
            [](const AxisRoot& a, const AxisRoot& b) { return a.s_tilde < b.s_tilde; });
  return out;
}

std::optional<double> solve_cross(const AxisRoot& axis_i, const AxisRoot& axis_j,
                                  double eps_i, double eps_j, double omega_tilde,
                                  double s2_axis, int d) {
  auto f = [&](double sij) {
    return residuals::cross_eq(eps_i, eps_j, axis_i.omega, axis_j.omega, omega_tilde, d,
                               axis_i.s_tilde, axis_j.s_tilde, s2_axis, sij);
  };
  for (double s : scan_roots(f, 512))
    if (in_open(s, 0.0, 2.0)) return s;
  return std::nullopt;
}

double default_omega_tilde(int d) {
  switch (d) {
    case 2: return 1.0 / 36.0;
    case 3: return 1.0 / 180.0;
    case 4: return 1.0 / 360.0;
    default: return 1.0 / 36.0;
  }
}

double default_s2_axis() { return 1.0; }

bool is_isotropic(const std::vector<double>& kappa) {
  if (kappa.empty()) return true;
  const auto [lo, hi] = std::minmax_element(kappa.begin(), kappa.end());
  const double scale = std::max(std::abs(*lo), std::abs(*hi));
  if (scale == 0.0) return true;
  return (*hi - *lo) <= 1e-12 * scale;
}

std::optional<ModelParams> solve_model_eps(int d, const std::vector<double>& eps_tilde,
                                           double eta, double source_const,
                                           const Discretization& disc, double omega_tilde,
                                           double s2_axis, std::string* why) {
  if (int(eps_tilde.size()) != d) {
    set_reason(why, "config: expected one eps_tilde per axis");
    return std::nullopt;
  }
  const LatticeSpec spec = build_lattice(d, LatticeFamily::Full);

  PDEParams pde;
  pde.d = d;
  pde.eta = eta;
  pde.source_const = source_const;
  pde.kappa.resize(d);
  for (int i = 0; i < d; ++i) pde.kappa[i] = eps_tilde[i] / disc.xi();

  // Per-axis candidates; the eta-correction must itself be feasible and land
  // in (0,2) for a candidate to be usable.
  std::vector<std::vector<AxisRoot>> cand(d);
  std::vector<std::vector<double>> cand_s(d);
  for (int i = 0; i < d; ++i) {
    for (const AxisRoot& r : solve_axis(eps_tilde[i], omega_tilde, s2_axis, d)) {
      const auto s = tilde_to_s(r.s_tilde, eta, disc.dt);
      if (s && in_open(*s, 0.0, 2.0)) {
        cand[i].push_back(r);
        cand_s[i].push_back(*s);
      }
    }
    if (cand[i].empty()) {
      set_reason(why, "infeasible: no admissible axis rate for axis " + std::to_string(i + 1));
      return std::nullopt;
    }
  }

  // Axes with equal eps_tilde share one root choice; candidates are explored
  // in descending s_tilde order.
  std::vector<int> group(d, -1);
  int groups = 0;
  for (int i = 0; i < d; ++i) {
    if (group[i] >= 0) continue;
    group[i] = groups;
    for (int j = i + 1; j < d; ++j) {
      const double scale = std::max(std::abs(eps_tilde[i]), std::abs(eps_tilde[j]));
      if (group[j] < 0 && std::abs(eps_tilde[i] - eps_tilde[j]) <= 1e-12 * scale) group[j] = groups;
    }
    ++groups;
  }
  std::vector<int> group_rep(groups);
  for (int i = d - 1; i >= 0; --i) group_rep[group[i]] = i;

  std::vector<int> choice(groups, -1);
  std::vector<AxisRoot> axis(d);
  std::vector<double> s_actual(d);
  std::vector<double> cross(spec.cross_pairs(), 0.0);
  std::string fail_pair;

  std::function<bool(int)> dfs = [&](int g) -> bool {
    if (g == groups) {
      double omega_sum = 0.0;
      for (int i = 0; i < d; ++i) omega_sum += axis[i].omega;
      const double omega0 = 1.0 - 2.0 * omega_sum - 2.0 * d * (d - 1) * omega_tilde;
      return in_open(omega0, 0.0, 1.0);
    }
    const int rep = group_rep[g];
    const int n = int(cand[rep].size());
    for (int c = n - 1; c >= 0; --c) {  // descending s_tilde
      bool ok = true;
      for (int i = 0; i < d && ok; ++i)
        if (group[i] == g) {
          if (c >= int(cand[i].size())) {
            ok = false;
            break;
          }
          axis[i] = cand[i][c];
          s_actual[i] = cand_s[i][c];
        }
      if (!ok) continue;
      // Cross residual for every pair whose axes are now both assigned.
      for (int i = 0; i < d && ok; ++i)
        for (int j = i + 1; j < d && ok; ++j) {
          if (group[i] > g || group[j] > g) continue;
          const auto sij = solve_cross(axis[i], axis[j], eps_tilde[i], eps_tilde[j],
                                       omega_tilde, s2_axis, d);
          if (!sij) {
            ok = false;
            fail_pair = "pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
          } else {
            cross[pair_index(d, i, j)] = *sij;
          }
        }
      if (ok && dfs(g + 1)) return true;
    }
    return false;
  };

  if (!dfs(0)) {
    set_reason(why, fail_pair.empty()
                        ? "infeasible: no admissible weight/rate assignment"
                        : "infeasible: no cross rate in (0,2) for " + fail_pair);
    return std::nullopt;
  }
  return assemble_full(spec, axis, cross, s_actual, omega_tilde, s2_axis, pde, disc);
}

std::optional<ModelParams> solve_model(const PDEParams& pde, const Discretization& disc,
                                       double omega_tilde, double s2_axis, std::string* why) {
  std::vector<double> eps(pde.d);
  for (int i = 0; i < pde.d; ++i) eps[i] = pde.kappa[i] * disc.xi();
  auto model = solve_model_eps(pde.d, eps, pde.eta, pde.source_const, disc, omega_tilde,
                               s2_axis, why);
  if (model) model->pde = pde;
  return model;
}

IsotropicClosedForm isotropic_closed_form_values(double eps, double omega_tilde, int d) {
  IsotropicClosedForm out;
  out.omega_axis = eps + 2.0 * omega_tilde - 2.0 * d * omega_tilde;
  out.omega0 = 1.0 - 2.0 * d * out.omega_axis - 2.0 * d * (d - 1) * omega_tilde;

  const double s2_den = 6.0 * eps - 5.0;
  if (std::abs(s2_den) < 1e-14) {
    out.reason = "infeasible: axis second-moment rate pole at eps = 5/6";
    return out;
  }
  out.s2_axis = 6.0 * (2.0 * eps - 1.0) / s2_den;

  const double cross_den = 22.0 * eps * omega_tilde - eps * eps - 5.0 * omega_tilde +
                           2.0 * eps * eps * eps - 24.0 * eps * eps * omega_tilde;
  if (std::abs(cross_den) < 1e-14) {
    out.reason = "infeasible: cross rate pole";
    return out;
  }
  out.s2_cross = -6.0 * omega_tilde * (2.0 * eps - 1.0) * (2.0 * eps - 1.0) / cross_den;

  if (!in_open(out.omega_axis, 0.0, 1.0) || !in_open(out.omega0, 0.0, 1.0)) {
    out.reason = "infeasible: weight out of (0,1)";
    return out;
  }
  if (!in_open(out.s2_axis, 0.0, 2.0) || !in_open(out.s2_cross, 0.0, 2.0)) {
    out.reason = "infeasible: rate out of (0,2)";
    return out;
  }
  out.feasible = true;
  return out;
}

std::optional<ModelParams> isotropic_closed_form(const PDEParams& pde, const Discretization& disc,
                                                 double omega_tilde, std::string* why) {
  if (!is_isotropic(pde.kappa)) {
    set_reason(why, "infeasible: anisotropic diffusion coefficients require the general solver");
    return std::nullopt;
  }
  const int d = pde.d;
  const double eps = pde.kappa[0] * disc.xi();
  const auto v = isotropic_closed_form_values(eps, omega_tilde, d);
  if (!v.feasible) {
    set_reason(why, v.reason);
    return std::nullopt;
  }
  const LatticeSpec spec = build_lattice(d, LatticeFamily::Full);
  std::vector<AxisRoot> axis(d, AxisRoot{1.0, v.omega_axis});
  std::vector<double> cross(spec.cross_pairs(), v.s2_cross);
  std::vector<double> s_actual(d, 1.0);
  return assemble_full(spec, axis, cross, s_actual, omega_tilde, v.s2_axis, pde, disc);
}

AxisClosedForm axis_closed_form_values(double eps, double eta, double dt, int d) {
  AxisClosedForm out;
  const double rt3 = std::sqrt(3.0);
  out.omega_axis = rt3 * eps;
  out.omega0 = 1.0 - 2.0 * d * rt3 * eps;
  out.s_tilde = 6.0 / (3.0 + rt3);
  out.s2_axis = 4.0 * rt3 - 6.0;
  out.s = tilde_to_s(out.s_tilde, eta, dt);
  if (!in_open(out.omega0, 0.0, 1.0) || !in_open(out.omega_axis, 0.0, 1.0)) {
    out.reason = "infeasible: rest weight out of (0,1)";
    return out;
  }
  if (!out.s || !in_open(*out.s, 0.0, 2.0)) {
    out.reason = "infeasible: eta-corrected axis rate";
    return out;
  }
  out.feasible = true;
  return out;
}

std::optional<ModelParams> axis_lattice_closed_form(const PDEParams& pde,
                                                    const Discretization& disc,
                                                    std::string* why) {
  if (!is_isotropic(pde.kappa)) {
    set_reason(why, "infeasible: anisotropic diffusion is not solvable on the axis lattice");
    return std::nullopt;
  }
  const int d = pde.d;
  const double eps = pde.kappa[0] * disc.xi();
  const auto v = axis_closed_form_values(eps, pde.eta, disc.dt, d);
  if (!v.feasible) {
    set_reason(why, v.reason);
    return std::nullopt;
  }
  const LatticeSpec spec = build_lattice(d, LatticeFamily::Axis);
  ModelParams model;
  model.lattice = spec;
  model.weights = WeightSet::closed(spec, std::vector<double>(d, v.omega_axis), 0.0);
  RelaxationSet rates;
  rates.s0 = 1.0;
  rates.s_axis.assign(d, *v.s);
  rates.s2_diag.assign(d, v.s2_axis);
  model.rates = rates;
  model.s_tilde_axis.assign(d, v.s_tilde);
  model.pde = pde;
  model.disc = disc;
  return model;
}

}  // namespace mrtlb
