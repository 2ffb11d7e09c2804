#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace mrtlb::linalg {

class SingularMatrix : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major real matrix, sized for moment-space work (q <= ~50).
class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols, 0.0) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  double operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  const double* data() const { return a_.data(); }
  double* data() { return a_.data(); }

  Matrix operator*(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix transposed() const;
  double max_abs() const;

  /// y = A x
  std::vector<double> apply(const std::vector<double>& x) const;

private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

/// Inverse via LU with partial pivoting. Throws SingularMatrix when a pivot
/// falls below 1e-13 in magnitude (relative to the largest entry).
Matrix lu_invert(const Matrix& a);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
/// The input is symmetrized as (A + A^T)/2 first.
std::vector<double> sym_eigenvalues(const Matrix& a);

using Complex = std::complex<double>;

class CMatrix {
public:
  CMatrix() = default;
  explicit CMatrix(int n) : n_(n), a_(size_t(n) * n) {}

  int size() const { return n_; }
  Complex& operator()(int i, int j) { return a_[size_t(i) * n_ + j]; }
  Complex operator()(int i, int j) const { return a_[size_t(i) * n_ + j]; }

private:
  int n_ = 0;
  std::vector<Complex> a_;
};

/// Eigenvalues of a general complex matrix: Householder reduction to upper
/// Hessenberg form followed by shifted QR with deflation. Throws
/// NumericalFailure if an eigenvalue fails to converge.
std::vector<Complex> complex_eigenvalues(CMatrix a);

}  // namespace mrtlb::linalg
