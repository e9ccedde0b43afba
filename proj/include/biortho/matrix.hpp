#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <vector>

#include "biortho/errors.hpp"

namespace biortho {

using cplx = std::complex<double>;
using Vector = std::vector<cplx>;

inline bool is_finite(cplx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Dense square complex matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, cplx{}) {}
  Matrix(int n, std::initializer_list<cplx> entries) : Matrix(n) {
    if (static_cast<int>(entries.size()) != n * n)
      throw ShapeMismatch("matrix initializer size does not match dimension");
    std::copy(entries.begin(), entries.end(), a_.begin());
  }

  static Matrix identity(int n) {
    Matrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int dim() const { return n_; }
  cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  cplx operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

  const std::vector<cplx>& data() const { return a_; }

  Matrix& operator+=(const Matrix& o) {
    check_same_dim(o);
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_dim(o);
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  Matrix& operator*=(cplx s) {
    for (auto& z : a_) z *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, cplx s) { return a *= s; }
  friend Matrix operator*(cplx s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    a.check_same_dim(b);
    const int n = a.n_;
    Matrix c(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  Vector apply(const Vector& x) const {
    if (static_cast<int>(x.size()) != n_) throw ShapeMismatch("matrix-vector dimension mismatch");
    Vector y(n_);
    for (int i = 0; i < n_; ++i) {
      cplx s{};
      for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  Matrix adjoint() const {
    Matrix m(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
  }
  Matrix transpose() const {
    Matrix m(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }
  Matrix conj() const {
    Matrix m(n_);
    for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = std::conj(a_[k]);
    return m;
  }

  cplx trace() const {
    cplx t{};
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0;
    for (const auto& z : a_) s += std::norm(z);
    return std::sqrt(s);
  }
  double max_abs() const {
    double m = 0;
    for (const auto& z : a_) m = std::max(m, std::abs(z));
    return m;
  }

  bool all_finite() const {
    for (const auto& z : a_)
      if (!is_finite(z)) return false;
    return true;
  }

  Vector column(int j) const {
    Vector v(n_);
    for (int i = 0; i < n_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  void set_column(int j, const Vector& v) {
    for (int i = 0; i < n_; ++i) (*this)(i, j) = v[i];
  }

 private:
  void check_same_dim(const Matrix& o) const {
    if (n_ != o.n_) throw ShapeMismatch("matrix dimension mismatch");
  }

  int n_ = 0;
  std::vector<cplx> a_;
};

inline void require_finite(const Matrix& m, const char* who) {
  if (!m.all_finite()) throw NonFiniteInput(std::string(who) + ": non-finite matrix entry");
}
inline void require_finite(const Vector& v, const char* who) {
  for (const auto& z : v)
    if (!is_finite(z)) throw NonFiniteInput(std::string(who) + ": non-finite vector entry");
}

inline cplx inner(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ShapeMismatch("inner product length mismatch");
  cplx s{};
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double norm2(const Vector& a) {
  double s = 0;
  for (const auto& z : a) s += std::norm(z);
  return std::sqrt(s);
}

inline Vector operator+(Vector a, const Vector& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}
inline Vector operator-(Vector a, const Vector& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}
inline Vector operator*(cplx s, Vector a) {
  for (auto& z : a) z *= s;
  return a;
}

/// Outer product a b^dagger.
inline Matrix outer(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ShapeMismatch("outer product length mismatch");
  const int n = static_cast<int>(a.size());
  Matrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = a[i] * std::conj(b[j]);
  return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  const int na = a.dim(), nb = b.dim();
  Matrix m(na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (int k = 0; k < nb; ++k)
        for (int l = 0; l < nb; ++l) m(i * nb + k, j * nb + l) = aij * b(k, l);
    }
  return m;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector v(a.size() * b.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) v[i * b.size() + j] = a[i] * b[j];
  return v;
}

inline double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).frobenius_norm();
}
inline double symmetry_defect(const Matrix& m) {
  return (m - m.transpose()).frobenius_norm();
}

/// LU decomposition with partial pivoting; near-zero pivots are replaced by
/// a tiny value so that inverse iteration can shift through exact eigenvalues.
class Lu {
 public:
  explicit Lu(Matrix m, double tiny_pivot = 0.0) : lu_(std::move(m)), piv_(lu_.dim()) {
    const int n = lu_.dim();
    for (int i = 0; i < n; ++i) piv_[i] = i;
    double scale = lu_.max_abs();
    if (scale == 0) scale = 1;
    const double tiny = tiny_pivot > 0 ? tiny_pivot : 1e-307;
    for (int k = 0; k < n; ++k) {
      int p = k;
      double best = std::abs(lu_(k, k));
      for (int i = k + 1; i < n; ++i) {
        const double v = std::abs(lu_(i, k));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (p != k) {
        for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(piv_[k], piv_[p]);
        parity_ = -parity_;
      }
      if (std::abs(lu_(k, k)) < tiny * scale) {
        singular_ = true;
        lu_(k, k) = tiny * scale;
      }
      const cplx inv_pivot = 1.0 / lu_(k, k);
      for (int i = k + 1; i < n; ++i) {
        const cplx f = lu_(i, k) * inv_pivot;
        lu_(i, k) = f;
        if (f == cplx{}) continue;
        for (int j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  bool hit_tiny_pivot() const { return singular_; }

  Vector solve(const Vector& b) const {
    const int n = lu_.dim();
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = b[piv_[i]];
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
      x[i] /= lu_(i, i);
    }
    return x;
  }

  Matrix inverse() const {
    const int n = lu_.dim();
    Matrix inv(n);
    Vector e(n);
    for (int j = 0; j < n; ++j) {
      std::fill(e.begin(), e.end(), cplx{});
      e[j] = 1.0;
      inv.set_column(j, solve(e));
    }
    return inv;
  }

  cplx determinant() const {
    cplx d = static_cast<double>(parity_);
    for (int i = 0; i < lu_.dim(); ++i) d *= lu_(i, i);
    return d;
  }

 private:
  Matrix lu_;
  std::vector<int> piv_;
  int parity_ = 1;
  bool singular_ = false;
};

/// Inverse refined by Newton iteration so that the left residual X M - I
/// reaches machine level even for ill-conditioned (but numerically
/// nonsingular) input. Only one side can be pinned in double precision once
/// eps times the condition number exceeds the target; this routine pins the
/// side that the dual-basis contract V^dagger U = 1 is stated on.
inline Matrix refined_inverse(const Matrix& m, int max_steps = 5) {
  Matrix x = Lu(m).inverse();
  const Matrix id = Matrix::identity(m.dim());
  for (int s = 0; s < max_steps; ++s) {
    const Matrix l = id - x * m;
    if (l.frobenius_norm() <= 1e-14 * static_cast<double>(m.dim())) break;
    x = (id + l) * x;  // squares the left residual
  }
  return x;
}

}  // namespace biortho
