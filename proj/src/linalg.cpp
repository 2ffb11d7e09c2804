#include "mrtlb/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace mrtlb::linalg {

Matrix Matrix::operator*(const Matrix& rhs) const {
  Matrix out(rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
    }
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  Matrix out(rows_, cols_);
  for (size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] - rhs.a_[i];
  return out;
}

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> Matrix::apply(const std::vector<double>& x) const {
  std::vector<double> y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

Matrix lu_invert(const Matrix& a) {
  const int n = a.rows();
  if (n != a.cols()) throw SingularMatrix("lu_invert: matrix not square");

  Matrix lu = a;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  const double scale = std::max(lu.max_abs(), 1.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(lu(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(lu(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-13 * scale) throw SingularMatrix("lu_invert: pivot below tolerance");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(lu(piv, j), lu(col, j));
      std::swap(perm[piv], perm[col]);
    }
    const double inv_p = 1.0 / lu(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double f = lu(r, col) * inv_p;
      lu(r, col) = f;
      for (int j = col + 1; j < n; ++j) lu(r, j) -= f * lu(col, j);
    }
  }

  Matrix inv(n, n);
  std::vector<double> x(n);
  for (int rhs = 0; rhs < n; ++rhs) {
    for (int i = 0; i < n; ++i) x[i] = (perm[i] == rhs) ? 1.0 : 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
      x[i] /= lu(i, i);
    }
    for (int i = 0; i < n; ++i) inv(i, rhs) = x[i];
  }
  return inv;
}

std::vector<double> sym_eigenvalues(const Matrix& a) {
  const int n = a.rows();
  if (n != a.cols()) throw NumericalFailure("sym_eigenvalues: matrix not square");

  Matrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));

  auto off_norm = [&]() {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) acc += s(i, j) * s(i, j);
    return std::sqrt(2.0 * acc);
  };

  const double stop = 1e-12 * std::max(1.0, s.max_abs());
  for (int sweep = 0; sweep < 100 && off_norm() > stop; ++sweep) {
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (int k = 0; k < n; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (int k = 0; k < n; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
      }
  }

  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = s(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

namespace {

// Givens rotation zeroing b in (a, b)^T: returns (c, s) with c real.
void givens(Complex a, Complex b, double& c, Complex& s) {
  const double aa = std::abs(a), ab = std::abs(b);
  if (ab == 0.0) {
    c = 1.0;
    s = Complex(0.0, 0.0);
    return;
  }
  if (aa == 0.0) {
    c = 0.0;
    s = std::conj(b) / ab;
    return;
  }
  const double r = std::hypot(aa, ab);
  c = aa / r;
  s = (a / aa) * std::conj(b) / r;
}

}  // namespace

std::vector<Complex> complex_eigenvalues(CMatrix a) {
  const int n = a.size();
  std::vector<Complex> eig(n);
  if (n == 0) return eig;
  if (n == 1) {
    eig[0] = a(0, 0);
    return eig;
  }

  // Householder reduction to upper Hessenberg form.
  for (int k = 0; k < n - 2; ++k) {
    double colnorm = 0.0;
    for (int i = k + 1; i < n; ++i) colnorm = std::hypot(colnorm, std::abs(a(i, k)));
    if (colnorm == 0.0) continue;
    Complex alpha = a(k + 1, k);
    const double aa = std::abs(alpha);
    Complex phase = (aa == 0.0) ? Complex(1.0, 0.0) : alpha / aa;
    Complex beta = -phase * colnorm;
    std::vector<Complex> v(n, Complex(0.0, 0.0));
    v[k + 1] = alpha - beta;
    for (int i = k + 2; i < n; ++i) v[i] = a(i, k);
    double vnorm2 = 0.0;
    for (int i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    // A <- (I - 2 v v^H / v^H v) A, then A <- A (I - 2 v v^H / v^H v)
    for (int j = 0; j < n; ++j) {
      Complex dot(0.0, 0.0);
      for (int i = k + 1; i < n; ++i) dot += std::conj(v[i]) * a(i, j);
      dot *= 2.0 / vnorm2;
      for (int i = k + 1; i < n; ++i) a(i, j) -= dot * v[i];
    }
    for (int i = 0; i < n; ++i) {
      Complex dot(0.0, 0.0);
      for (int j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
      dot *= 2.0 / vnorm2;
      for (int j = k + 1; j < n; ++j) a(i, j) -= dot * std::conj(v[j]);
    }
  }

  // Shifted QR with deflation on the Hessenberg matrix.
  const double eps = 1e-15;
  int hi = n - 1;
  int block_iters = 0;
  std::vector<double> cs(n);
  std::vector<Complex> ss(n);
  auto quadratic_pair = [](Complex h11, Complex h12, Complex h21, Complex h22, Complex& m1,
                           Complex& m2) {
    const Complex tr = h11 + h22;
    const Complex det = h11 * h22 - h12 * h21;
    const Complex disc = std::sqrt(tr * tr - 4.0 * det);
    m1 = 0.5 * (tr + disc);
    m2 = 0.5 * (tr - disc);
    // the smaller root from the numerically stable quotient
    if (std::abs(m1) > std::abs(m2)) m2 = (std::abs(m1) == 0.0) ? m2 : det / m1;
    else if (std::abs(m2) > 0.0) m1 = det / m2;
  };
  while (hi >= 0) {
    // Deflate whenever a subdiagonal entry is negligible.
    int lo = hi;
    while (lo > 0) {
      const double h = std::abs(a(lo, lo - 1));
      if (h <= eps * (std::abs(a(lo - 1, lo - 1)) + std::abs(a(lo, lo)))) {
        a(lo, lo - 1) = Complex(0.0, 0.0);
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig[hi] = a(hi, hi);
      --hi;
      block_iters = 0;
      continue;
    }
    if (lo == hi - 1) {
      quadratic_pair(a(lo, lo), a(lo, hi), a(hi, lo), a(hi, hi), eig[lo], eig[hi]);
      hi -= 2;
      block_iters = 0;
      continue;
    }
    if (++block_iters > 60)
      throw NumericalFailure("complex_eigenvalues: QR iteration did not converge");

    Complex shift;
    if (block_iters % 12 == 0) {
      // exceptional shift to break limit cycles
      shift = Complex(std::abs(a(hi, hi - 1)) + std::abs(a(hi - 1, hi - 2)), 0.0);
    } else {
      Complex m1, m2;
      quadratic_pair(a(hi - 1, hi - 1), a(hi - 1, hi), a(hi, hi - 1), a(hi, hi), m1, m2);
      shift = (std::abs(m1 - a(hi, hi)) < std::abs(m2 - a(hi, hi))) ? m1 : m2;
    }

    for (int i = lo; i <= hi; ++i) a(i, i) -= shift;
    // QR factorization by Givens rotations along the subdiagonal.
    for (int k = lo; k < hi; ++k) {
      givens(a(k, k), a(k + 1, k), cs[k], ss[k]);
      const double c = cs[k];
      const Complex s = ss[k];
      for (int j = k; j < n; ++j) {
        const Complex t1 = a(k, j), t2 = a(k + 1, j);
        a(k, j) = c * t1 + s * t2;
        a(k + 1, j) = -std::conj(s) * t1 + c * t2;
      }
    }
    // RQ recombination.
    for (int k = lo; k < hi; ++k) {
      const double c = cs[k];
      const Complex s = ss[k];
      for (int i = 0; i <= std::min(k + 2, hi); ++i) {
        const Complex t1 = a(i, k), t2 = a(i, k + 1);
        a(i, k) = c * t1 + std::conj(s) * t2;
        a(i, k + 1) = -s * t1 + c * t2;
      }
    }
    for (int i = lo; i <= hi; ++i) a(i, i) += shift;
  }
  return eig;
}

}  // namespace mrtlb::linalg
