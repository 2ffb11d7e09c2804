#include "mrtlb/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace mrtlb {

namespace {

std::string axis_name(int i) { return "x" + std::to_string(i + 1); }

long ipow(int base, int exp) {
  long r = 1;
  for (int k = 0; k < exp; ++k) r *= base;
  return r;
}

}  // namespace

int pair_index(int d, int i, int j) {
  // pairs (0,1),(0,2),...,(0,d-1),(1,2),... in lexicographic order
  return i * (2 * d - i - 1) / 2 + (j - i - 1);
}

int third_order_index(int d, int i, int j) { return i * (d - 1) + (j < i ? j : j - 1); }

LatticeSpec build_lattice(int d, LatticeFamily family) {
  if (d < 1) throw std::invalid_argument("build_lattice: d must be >= 1");

  LatticeSpec spec;
  spec.d = d;
  spec.family = family;
  spec.q = (family == LatticeFamily::Full) ? 2 * d * d + 1 : 2 * d + 1;

  // Velocities: rest, +axes, -axes, then planar diagonals per pair.
  spec.velocities.emplace_back(d, 0);
  for (int sign : {+1, -1})
    for (int i = 0; i < d; ++i) {
      std::vector<int> v(d, 0);
      v[i] = sign;
      spec.velocities.push_back(v);
    }
  if (family == LatticeFamily::Full) {
    static constexpr int kDiagSigns[4][2] = {{+1, +1}, {-1, +1}, {-1, -1}, {+1, -1}};
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        for (const auto& sgn : kDiagSigns) {
          std::vector<int> v(d, 0);
          v[i] = sgn[0];
          v[j] = sgn[1];
          spec.velocities.push_back(v);
        }
  }

  // Moment polynomials: 1, X_i, X_i^2, then (Full) X_i X_j, X_i^2 X_j, X_i^2 X_j^2.
  spec.poly_exponents.emplace_back(d, 0);
  spec.moment_names.push_back("0");
  for (int i = 0; i < d; ++i) {
    std::vector<int> p(d, 0);
    p[i] = 1;
    spec.poly_exponents.push_back(p);
    spec.moment_names.push_back(axis_name(i));
  }
  for (int i = 0; i < d; ++i) {
    std::vector<int> p(d, 0);
    p[i] = 2;
    spec.poly_exponents.push_back(p);
    spec.moment_names.push_back("2|" + axis_name(i) + "^2");
  }
  if (family == LatticeFamily::Full) {
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        std::vector<int> p(d, 0);
        p[i] = 1;
        p[j] = 1;
        spec.poly_exponents.push_back(p);
        spec.moment_names.push_back("2|" + axis_name(i) + axis_name(j));
      }
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        std::vector<int> p(d, 0);
        p[i] = 2;
        p[j] = 1;
        spec.poly_exponents.push_back(p);
        spec.moment_names.push_back("3|" + axis_name(i) + "^2" + axis_name(j));
      }
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        std::vector<int> p(d, 0);
        p[i] = 2;
        p[j] = 2;
        spec.poly_exponents.push_back(p);
        spec.moment_names.push_back("4|" + axis_name(i) + "^2" + axis_name(j) + "^2");
      }
  }

  if (int(spec.velocities.size()) != spec.q || int(spec.poly_exponents.size()) != spec.q)
    throw std::logic_error("build_lattice: inconsistent population count");

  spec.M = linalg::Matrix(spec.q, spec.q);
  for (int r = 0; r < spec.q; ++r)
    for (int k = 0; k < spec.q; ++k) {
      long v = 1;
      for (int l = 0; l < d; ++l) v *= ipow(spec.velocities[k][l], spec.poly_exponents[r][l]);
      spec.M(r, k) = double(v);
    }
  spec.M_inv = linalg::lu_invert(spec.M);
  return spec;
}

WeightSet WeightSet::closed(const LatticeSpec& spec, std::vector<double> omega_axis,
                            double omega_diag) {
  if (int(omega_axis.size()) != spec.d)
    throw std::invalid_argument("WeightSet: expected one axis weight per dimension");
  WeightSet w;
  w.omega_axis = std::move(omega_axis);
  w.omega_diag = (spec.family == LatticeFamily::Full) ? omega_diag : 0.0;
  double sum = 0.0;
  for (double v : w.omega_axis) sum += v;
  w.omega0 = 1.0 - 2.0 * sum;
  if (spec.family == LatticeFamily::Full)
    w.omega0 -= 2.0 * spec.d * (spec.d - 1) * w.omega_diag;
  return w;
}

std::vector<double> WeightSet::expand(const LatticeSpec& spec) const {
  std::vector<double> w(spec.q, omega_diag);
  w[0] = omega0;
  for (int i = 0; i < spec.d; ++i) {
    w[1 + i] = omega_axis[i];
    w[1 + spec.d + i] = omega_axis[i];
  }
  return w;
}

bool WeightSet::all_in_unit_interval(const LatticeSpec& spec) const {
  for (double v : expand(spec))
    if (!(v > 0.0 && v < 1.0)) return false;
  return true;
}

RelaxationSet RelaxationSet::uniform(const LatticeSpec& spec, double s) {
  RelaxationSet r;
  r.s0 = s;
  r.s_axis.assign(spec.d, s);
  r.s2_diag.assign(spec.d, s);
  if (spec.family == LatticeFamily::Full) {
    r.s2_cross.assign(spec.cross_pairs(), s);
    r.s3.assign(spec.d * (spec.d - 1), s);
    r.s4.assign(spec.cross_pairs(), s);
  }
  return r;
}

std::vector<double> RelaxationSet::expand(const LatticeSpec& spec) const {
  const int d = spec.d;
  const bool full = spec.family == LatticeFamily::Full;
  if (int(s_axis.size()) != d || int(s2_diag.size()) != d ||
      (full && (int(s2_cross.size()) != spec.cross_pairs() ||
                int(s3.size()) != d * (d - 1) || int(s4.size()) != spec.cross_pairs())))
    throw std::invalid_argument("RelaxationSet: length mismatch with lattice");

  std::vector<double> s;
  s.reserve(spec.q);
  s.push_back(s0);
  s.insert(s.end(), s_axis.begin(), s_axis.end());
  s.insert(s.end(), s2_diag.begin(), s2_diag.end());
  if (full) {
    s.insert(s.end(), s2_cross.begin(), s2_cross.end());
    s.insert(s.end(), s3.begin(), s3.end());
    s.insert(s.end(), s4.begin(), s4.end());
  }
  if (int(s.size()) != spec.q)
    throw std::invalid_argument("RelaxationSet: length mismatch with lattice");
  return s;
}

bool RelaxationSet::admissible(const LatticeSpec& spec) const {
  auto s = expand(spec);
  if (s[0] == 0.0) return false;
  for (size_t k = 1; k < s.size(); ++k)
    if (!(s[k] > 0.0 && s[k] < 2.0)) return false;
  return true;
}

double weight_moment(const LatticeSpec& spec, const WeightSet& weights,
                     const std::vector<int>& exponents) {
  if (int(exponents.size()) != spec.d)
    throw std::invalid_argument("weight_moment: exponent length mismatch");
  const auto w = weights.expand(spec);
  double acc = 0.0;
  for (int k = 0; k < spec.q; ++k) {
    long p = 1;
    for (int l = 0; l < spec.d; ++l) p *= ipow(spec.velocities[k][l], exponents[l]);
    acc += double(p) * w[k];
  }
  return acc;
}

linalg::Matrix collision_matrix(const LatticeSpec& spec, const RelaxationSet& rates) {
  const auto s = rates.expand(spec);
  linalg::Matrix sm(spec.q, spec.q);
  for (int r = 0; r < spec.q; ++r)
    for (int k = 0; k < spec.q; ++k) sm(r, k) = s[r] * spec.M(r, k);
  return spec.M_inv * sm;
}

}  // namespace mrtlb
