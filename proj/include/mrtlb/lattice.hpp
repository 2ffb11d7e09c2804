#pragma once

#include <string>
#include <vector>

#include "mrtlb/linalg.hpp"

namespace mrtlb {

enum class LatticeFamily { Full, Axis };

/// Discrete velocity set, natural moment-polynomial basis and transformation
/// matrix for the DdQ(2d^2+1) ("Full") or DdQ(2d+1) ("Axis") lattices.
///
/// Canonical ordering: rest velocity first, then +axis unit vectors, then
/// -axis unit vectors, then (Full only) for each pair i<j the four planar
/// diagonals with sign patterns (+,+), (-,+), (-,-), (+,-) in components
/// (i, j). Moment polynomials: 1, X_i, X_i^2, X_i X_j (i<j), X_i^2 X_j
/// (i, then j != i ascending), X_i^2 X_j^2 (i<j).
struct LatticeSpec {
  int d = 0;
  LatticeFamily family = LatticeFamily::Full;
  int q = 0;
  std::vector<std::vector<int>> velocities;      // q x d, entries in {-1,0,1}
  std::vector<std::vector<int>> poly_exponents;  // q x d
  std::vector<std::string> moment_names;         // q
  linalg::Matrix M;
  linalg::Matrix M_inv;

  int cross_pairs() const { return d * (d - 1) / 2; }
};

LatticeSpec build_lattice(int d, LatticeFamily family);

/// Index of pair (i, j), i<j, in lexicographic pair order (0-based axes).
int pair_index(int d, int i, int j);
/// Index of the third-order slot X_i^2 X_j (0-based axes, j != i).
int third_order_index(int d, int i, int j);

/// Weight coefficients in the reduced representation of the weight relations:
/// one omega per axis (the +/- partners share it) and a single diagonal
/// weight shared by all 2d(d-1) diagonal populations (Full only).
struct WeightSet {
  double omega0 = 0.0;
  std::vector<double> omega_axis;
  double omega_diag = 0.0;  // Full only

  /// Builds the set with omega0 determined by the closure relation
  /// omega0 = 1 - 2 sum_i omega_i - 2d(d-1) omega_diag.
  static WeightSet closed(const LatticeSpec& spec, std::vector<double> omega_axis,
                          double omega_diag);

  /// q-vector aligned with the lattice velocity order.
  std::vector<double> expand(const LatticeSpec& spec) const;
  bool all_in_unit_interval(const LatticeSpec& spec) const;
};

/// Diagonal relaxation rates in symbolic-role layout.
struct RelaxationSet {
  double s0 = 1.0;
  std::vector<double> s_axis;    // d: s_{x_i}
  std::vector<double> s2_diag;   // d: s_{2|x_i^2}
  std::vector<double> s2_cross;  // d(d-1)/2: s_{2|x_i x_j}, Full only
  std::vector<double> s3;        // d(d-1): s_{3|x_i^2 x_j}, Full only
  std::vector<double> s4;        // d(d-1)/2: s_{4|x_i^2 x_j^2}, Full only

  static RelaxationSet uniform(const LatticeSpec& spec, double s);

  /// Diagonal of S aligned with the moment-polynomial order. Throws
  /// std::invalid_argument on a length mismatch with the lattice.
  std::vector<double> expand(const LatticeSpec& spec) const;

  /// All non-conserved rates in (0,2) and s0 != 0.
  bool admissible(const LatticeSpec& spec) const;
};

/// N-th weight moment sum_k (prod_l e_{k,l}^{n_l}) omega_{k-1}.
double weight_moment(const LatticeSpec& spec, const WeightSet& weights,
                     const std::vector<int>& exponents);

/// Collision matrix Lambda = M^{-1} S M.
linalg::Matrix collision_matrix(const LatticeSpec& spec, const RelaxationSet& rates);

}  // namespace mrtlb
