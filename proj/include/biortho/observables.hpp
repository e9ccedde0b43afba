#pragma once

#include <array>
#include <cmath>

#include "biortho/system.hpp"

namespace biortho {

/// Operator in a biorthogonal basis: F = sum_nm f_nm |phi_n><chi_m|.
/// Holds the coefficient matrix and the cached ambient form.
class Observable {
 public:
  Observable(FramePtr frame, Matrix coeffs)
      : frame_(std::move(frame)),
        f_(std::move(coeffs)),
        ambient_(frame_->phi * f_ * frame_->chi.adjoint()) {}

  const FramePtr& frame() const { return frame_; }
  const Matrix& coeffs() const { return f_; }
  const Matrix& ambient() const { return ambient_; }
  int dim() const { return f_.dim(); }

  /// Coefficients multiply like matrices: (F G)_nm = sum_l f_nl g_lm.
  friend Observable operator*(const Observable& a, const Observable& b) {
    if (a.frame_ != b.frame_) throw SystemMismatch("observable product: different systems");
    return Observable(a.frame_, a.f_ * b.f_);
  }
  friend Observable operator+(const Observable& a, const Observable& b) {
    if (a.frame_ != b.frame_) throw SystemMismatch("observable sum: different systems");
    return Observable(a.frame_, a.f_ + b.f_);
  }
  friend Observable operator-(const Observable& a, const Observable& b) {
    if (a.frame_ != b.frame_) throw SystemMismatch("observable difference: different systems");
    return Observable(a.frame_, a.f_ - b.f_);
  }
  friend Observable operator*(cplx s, const Observable& a) { return Observable(a.frame_, s * a.f_); }

 private:
  FramePtr frame_;
  Matrix f_;
  Matrix ambient_;
};

template <class System>
Observable observable_from_coeffs(const System& sys, Matrix f) {
  require_finite(f, "observable_from_coeffs");
  if (f.dim() != sys.dim())
    throw ShapeMismatch("observable_from_coeffs: coefficient matrix dimension mismatch");
  return Observable(sys.frame(), std::move(f));
}

/// Recovers coefficients from an ambient matrix: f = chi^dagger F phi.
template <class System>
Observable observable_from_ambient(const System& sys, const Matrix& ambient) {
  require_finite(ambient, "observable_from_ambient");
  if (ambient.dim() != sys.dim())
    throw ShapeMismatch("observable_from_ambient: matrix dimension mismatch");
  return Observable(sys.frame(), sys.frame()->chi.adjoint() * ambient * sys.frame()->phi);
}

inline double biortho_hermiticity_defect(const Observable& obs) {
  return (obs.coeffs() - obs.coeffs().adjoint()).max_abs();
}

inline bool is_biortho_hermitian(const Observable& obs, double tol = 1e-10) {
  return biortho_hermiticity_defect(obs) <= tol;
}

/// <F> = sum_nm conj(c_n) c_m f_nm / sum_n |c_n|^2.
inline cplx expectation_pure(const Observable& obs, const StateVector& psi) {
  if (obs.frame() != psi.frame()) throw SystemMismatch("expectation_pure: different systems");
  const double den = psi.norm2();
  if (den == 0) throw ZeroState("expectation_pure: zero state");
  const Vector& c = psi.coeffs();
  cplx num{};
  const int n = obs.dim();
  for (int i = 0; i < n; ++i) {
    cplx row{};
    for (int j = 0; j < n; ++j) row += obs.coeffs()(i, j) * c[j];
    num += std::conj(c[i]) * row;
  }
  return num / den;
}

/// Mixed state as a coefficient array rho_nm over |phi_n><chi_m|.
class DensityMatrix {
 public:
  DensityMatrix(FramePtr frame, Matrix rho) : frame_(std::move(frame)), rho_(std::move(rho)) {}

  const FramePtr& frame() const { return frame_; }
  const Matrix& coeffs() const { return rho_; }
  int dim() const { return rho_.dim(); }

 private:
  FramePtr frame_;
  Matrix rho_;
};

namespace detail {

inline std::vector<double> hermitian_eigenvalues(const Matrix& m) {
  const auto spec = eig_general(m, 1e-9);
  std::vector<double> ev(spec.eigenvalues.size());
  for (size_t i = 0; i < ev.size(); ++i) ev[i] = spec.eigenvalues[i].real();
  return ev;
}

}  // namespace detail

template <class System>
DensityMatrix density_from_coeffs(const System& sys, Matrix rho) {
  require_finite(rho, "density_from_coeffs");
  if (rho.dim() != sys.dim()) throw ShapeMismatch("density_from_coeffs: dimension mismatch");
  if ((rho - rho.adjoint()).max_abs() > 1e-10)
    throw ShapeMismatch("density_from_coeffs: coefficients not biorthogonally Hermitian");
  if (std::abs(rho.trace() - cplx(1.0)) > 1e-10)
    throw ShapeMismatch("density_from_coeffs: trace differs from one");
  for (double ev : detail::hermitian_eigenvalues(rho))
    if (ev < -1e-10) throw ShapeMismatch("density_from_coeffs: negative weight");
  return DensityMatrix(sys.frame(), std::move(rho));
}

inline DensityMatrix pure_density(const StateVector& psi) {
  const double n2 = psi.norm2();
  if (n2 == 0) throw ZeroState("pure_density: zero state");
  Matrix rho = outer(psi.coeffs(), psi.coeffs());
  rho *= 1.0 / n2;
  return DensityMatrix(psi.frame(), std::move(rho));
}

/// <F> = tr(rho F) = sum_nm rho_nm f_mn.
inline cplx expectation_mixed(const Observable& obs, const DensityMatrix& rho) {
  if (obs.frame() != rho.frame()) throw SystemMismatch("expectation_mixed: different systems");
  cplx s{};
  const int n = obs.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += rho.coeffs()(i, j) * obs.coeffs()(j, i);
  return s;
}

/// The deformed Pauli triple (x, y, z) built from the eigenbasis:
/// sigma_x = |phi_1><chi_2| + |phi_2><chi_1|, and cyclic companions.
/// Coefficient matrices are the standard Pauli matrices.
inline std::array<Observable, 3> deformed_pauli(const BiorthogonalSystem& sys) {
  if (sys.dim() != 2) throw DimensionNotTwo("deformed_pauli: requires a two-level system");
  const Matrix sx(2, {0.0, 1.0, 1.0, 0.0});
  const Matrix sy(2, {0.0, cplx(0, -1), cplx(0, 1), 0.0});
  const Matrix sz(2, {1.0, 0.0, 0.0, -1.0});
  return {Observable(sys.frame(), sx), Observable(sys.frame(), sy), Observable(sys.frame(), sz)};
}

/// Gibbs state over a real spectrum: rho = diag(e^{-beta kappa_n}) / Z,
/// evaluated with a max shift so large beta cannot overflow.
inline DensityMatrix thermal_state(const BiorthogonalSystem& sys, double beta) {
  if (beta < 0 || !std::isfinite(beta))
    throw std::invalid_argument("thermal_state: beta must be a nonnegative real number");
  if (!sys.spectrum_real())
    throw ComplexSpectrum("thermal_state: spectrum has complex eigenvalues, no equilibrium state");
  const int n = sys.dim();
  double kmin = std::numeric_limits<double>::infinity();
  for (const auto& z : sys.kappa()) kmin = std::min(kmin, z.real());
  std::vector<double> w(n);
  double z = 0;
  for (int i = 0; i < n; ++i) {
    w[i] = std::exp(-beta * (sys.kappa()[i].real() - kmin));
    z += w[i];
  }
  Matrix rho(n);
  for (int i = 0; i < n; ++i) rho(i, i) = w[i] / z;
  return DensityMatrix(sys.frame(), std::move(rho));
}

inline double partition_function(const BiorthogonalSystem& sys, double beta) {
  if (!sys.spectrum_real()) throw ComplexSpectrum("partition_function: complex spectrum");
  double z = 0;
  for (const auto& k : sys.kappa()) z += std::exp(-beta * k.real());
  return z;
}

/// -sum_i lambda_i ln lambda_i over the coefficient-matrix eigenvalues,
/// with 0 ln 0 = 0. Lands in [0, ln N].
inline double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0;
  for (double ev : detail::hermitian_eigenvalues(rho.coeffs())) {
    if (ev <= 0) continue;
    s -= ev * std::log(ev);
  }
  s = std::max(0.0, s);
  return std::min(s, std::log(static_cast<double>(rho.dim())));
}

/// Two-level systems admit the same observable class when the moduli of
/// their eigenstate overlaps (at unit Hermitian norm) agree.
inline bool same_class_2level(const BiorthogonalSystem& a, const BiorthogonalSystem& b,
                              double class_tol = 1e-9) {
  if (a.dim() != 2 || b.dim() != 2)
    throw DimensionNotTwo("same_class_2level: requires two-level systems");
  auto overlap = [](const BiorthogonalSystem& s) {
    const Vector p1 = s.phi(0), p2 = s.phi(1);
    return std::abs(inner(p1, p2)) / (norm2(p1) * norm2(p2));
  };
  return std::abs(overlap(a) - overlap(b)) <= class_tol;
}

}  // namespace biortho
