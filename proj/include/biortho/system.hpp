#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "biortho/eig.hpp"
#include "biortho/matrix.hpp"

namespace biortho {

enum class Gauge { c_norm, balanced };

/// A matched pair of bases: columns of `phi` span the space, columns of
/// `chi` are their duals with <chi_n|phi_m> = delta_nm.
struct BasisFrame {
  int dim = 0;
  Matrix phi;
  Matrix chi;

  double biortho_defect() const {
    Matrix g = chi.adjoint() * phi;
    for (int i = 0; i < dim; ++i) g(i, i) -= 1.0;
    return g.max_abs();
  }
};

using FramePtr = std::shared_ptr<const BasisFrame>;

/// State expressed by its coefficients over the phi basis of a frame.
class StateVector {
 public:
  StateVector() = default;
  StateVector(FramePtr frame, Vector coeffs, bool normalized = false)
      : frame_(std::move(frame)), coeffs_(std::move(coeffs)), normalized_(normalized) {}

  const FramePtr& frame() const { return frame_; }
  const Vector& coeffs() const { return coeffs_; }
  int dim() const { return static_cast<int>(coeffs_.size()); }
  bool normalized() const { return normalized_; }

  /// Biorthogonal norm squared, sum |c_n|^2.
  double norm2() const {
    double s = 0;
    for (const auto& z : coeffs_) s += std::norm(z);
    return s;
  }

  Vector ambient() const { return frame_->phi.apply(coeffs_); }

 private:
  FramePtr frame_;
  Vector coeffs_;
  bool normalized_ = false;
};

inline StateVector normalize(const StateVector& s) {
  const double n2 = s.norm2();
  if (n2 == 0) throw ZeroState("normalize: zero state");
  Vector c = s.coeffs();
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& z : c) z *= inv;
  return StateVector(s.frame(), std::move(c), true);
}

inline void require_same_frame(const StateVector& a, const StateVector& b, const char* who) {
  if (a.frame() != b.frame()) throw SystemMismatch(std::string(who) + ": states on different systems");
}

/// Eigenvalues with gauged right/left eigenvector pairs of a complex
/// Hamiltonian. Complex symmetric input gets the c-norm gauge
/// (chi_n = conj(phi_n), phi_n^T phi_n = 1); anything else the balanced
/// gauge (equal Hermitian norms, phase pinned on the largest component).
class BiorthogonalSystem {
 public:
  BiorthogonalSystem(Matrix hamiltonian, std::vector<cplx> kappa, FramePtr frame, Gauge gauge,
                     double biortho_defect, bool spectrum_real, double min_overlap,
                     Tolerances tol)
      : k_(std::move(hamiltonian)),
        kappa_(std::move(kappa)),
        frame_(std::move(frame)),
        gauge_(gauge),
        biortho_defect_(biortho_defect),
        spectrum_real_(spectrum_real),
        min_overlap_(min_overlap),
        tol_(tol) {}

  int dim() const { return frame_->dim; }
  const Matrix& hamiltonian() const { return k_; }
  const std::vector<cplx>& kappa() const { return kappa_; }
  const FramePtr& frame() const { return frame_; }
  Gauge gauge() const { return gauge_; }
  double biortho_defect() const { return biortho_defect_; }
  bool spectrum_real() const { return spectrum_real_; }
  /// Smallest |<chi_n|phi_n>| over modes at unit Hermitian norms; an
  /// exceptional-point proximity diagnostic (1 for orthonormal bases).
  double min_pre_gauge_overlap() const { return min_overlap_; }
  const Tolerances& tolerances() const { return tol_; }

  Vector phi(int n) const { return frame_->phi.column(n); }
  Vector chi(int n) const { return frame_->chi.column(n); }

 private:
  Matrix k_;
  std::vector<cplx> kappa_;
  FramePtr frame_;
  Gauge gauge_;
  double biortho_defect_ = 0;
  bool spectrum_real_ = false;
  double min_overlap_ = 1;
  Tolerances tol_;
};

namespace detail {

inline void pin_sign(Vector& v) {
  int imax = 0;
  double best = -1;
  for (size_t i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      imax = static_cast<int>(i);
    }
  const cplx c = v[imax];
  const bool flip = (c.real() < -1e-12 * best) ||
                    (std::abs(c.real()) <= 1e-12 * best && c.imag() < 0);
  if (flip)
    for (auto& z : v) z = -z;
}

inline void pin_phase(Vector& phi, Vector& chi) {
  int imax = 0;
  double best = -1;
  for (size_t i = 0; i < phi.size(); ++i)
    if (std::abs(phi[i]) > best) {
      best = std::abs(phi[i]);
      imax = static_cast<int>(i);
    }
  if (best == 0) return;
  const cplx rot = std::abs(phi[imax]) / phi[imax];
  for (auto& z : phi) z *= rot;
  for (auto& z : chi) z *= rot;
}

}  // namespace detail

inline BiorthogonalSystem build_system(const Matrix& k, const Tolerances& opts = {}) {
  require_finite(k, "build_system");
  const int n = k.dim();
  double scale = k.frobenius_norm();
  if (scale == 0) scale = 1;

  const RawSpectrum spec = eig_general(k, opts.eig_tol);

  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      min_gap = std::min(min_gap, std::abs(spec.eigenvalues[i] - spec.eigenvalues[j]));

  if (n > 1 && min_gap <= opts.deg_tol * scale) {
    // Eigenvalue collision: tell an exceptional point (vectors coalesce too)
    // apart from an ordinary degeneracy by the eigenvector conditioning.
    const auto sv = singular_values(spec.right_vectors);
    if (sv.back() <= 1e-4 * sv.front())
      throw ExceptionalPoint("build_system: eigenvalues and eigenvectors coalesce");
    throw DegenerateSpectrum("build_system: eigenvalue collision, min gap " +
                             std::to_string(min_gap));
  }

  const bool symmetric = symmetry_defect(k) <= opts.sym_tol * scale;
  auto frame = std::make_shared<BasisFrame>();
  frame->dim = n;
  frame->phi = Matrix(n);
  frame->chi = Matrix(n);
  double min_overlap = 1;

  if (symmetric) {
    for (int m = 0; m < n; ++m) {
      Vector w = spec.right_vectors.column(m);
      cplx s{};
      for (const auto& z : w) s += z * z;
      min_overlap = std::min(min_overlap, std::abs(s));
      if (std::abs(s) < opts.ep_tol)
        throw ExceptionalPoint("build_system: self-orthogonal eigenvector (mode " +
                               std::to_string(m) + ")");
      const cplx r = 1.0 / std::sqrt(s);
      for (auto& z : w) z *= r;
      detail::pin_sign(w);
      frame->phi.set_column(m, w);
      for (auto& z : w) z = std::conj(z);
      frame->chi.set_column(m, w);
    }
  } else {
    Matrix duals;
    try {
      duals = left_from_right(spec.right_vectors, opts.inv_tol);
    } catch (const SingularBasis&) {
      throw ExceptionalPoint("build_system: eigenvector matrix numerically singular");
    }
    for (int m = 0; m < n; ++m) {
      Vector phi = spec.right_vectors.column(m);
      Vector chi = duals.column(m);
      const double cn = norm2(chi);
      min_overlap = std::min(min_overlap, 1.0 / cn);
      if (1.0 / cn < opts.ep_tol)
        throw ExceptionalPoint("build_system: left/right overlap below tolerance (mode " +
                               std::to_string(m) + ")");
      const double lam = std::sqrt(cn);
      for (auto& z : phi) z *= lam;
      for (auto& z : chi) z /= lam;
      detail::pin_phase(phi, chi);
      frame->phi.set_column(m, phi);
      frame->chi.set_column(m, chi);
    }
  }

  const double defect = frame->biortho_defect();
  if (defect > opts.system_tol)
    throw ConvergenceFailure("build_system: biorthonormality defect " + std::to_string(defect));

  double max_im = 0;
  for (const auto& z : spec.eigenvalues) max_im = std::max(max_im, std::abs(z.imag()));
  const bool real_spec = max_im <= opts.reality_tol * scale;

  return BiorthogonalSystem(k, spec.eigenvalues, std::move(frame),
                            symmetric ? Gauge::c_norm : Gauge::balanced, defect, real_spec,
                            min_overlap, opts);
}

/// Spectral projector onto mode n: phi_n chi_n^dagger / <chi_n|phi_n>.
inline Matrix projector(const BiorthogonalSystem& sys, int n) {
  if (n < 0 || n >= sys.dim()) throw ShapeMismatch("projector: mode index out of range");
  const Vector p = sys.phi(n), x = sys.chi(n);
  const cplx d = inner(x, p);
  return (1.0 / d) * outer(p, x);
}

inline double resolution_defect(const BiorthogonalSystem& sys) {
  Matrix sum(sys.dim());
  for (int n = 0; n < sys.dim(); ++n) sum += projector(sys, n);
  return (sum - Matrix::identity(sys.dim())).frobenius_norm();
}

/// Rebuilds the Hamiltonian from its spectral form; returns it with the
/// relative Frobenius deviation from the stored matrix.
inline std::pair<Matrix, double> reconstruct_hamiltonian(const BiorthogonalSystem& sys) {
  Matrix sum(sys.dim());
  for (int n = 0; n < sys.dim(); ++n) sum += sys.kappa()[n] * projector(sys, n);
  double scale = sys.hamiltonian().frobenius_norm();
  if (scale == 0) scale = 1;
  return {sum, (sum - sys.hamiltonian()).frobenius_norm() / scale};
}

/// Expands an ambient vector over the phi basis: c_n = <chi_n|psi>.
template <class System>
StateVector components(const System& sys, const Vector& psi) {
  require_finite(psi, "components");
  if (static_cast<int>(psi.size()) != sys.dim())
    throw ShapeMismatch("components: vector length does not match system dimension");
  if (norm2(psi) == 0) throw ZeroState("components: zero state");
  Vector c = sys.frame()->chi.adjoint().apply(psi);
  const double n2 = [&] {
    double s = 0;
    for (const auto& z : c) s += std::norm(z);
    return s;
  }();
  return StateVector(sys.frame(), std::move(c), std::abs(n2 - 1.0) <= 1e-12);
}

template <class System>
StateVector state_from_coeffs(const System& sys, Vector coeffs) {
  require_finite(coeffs, "state_from_coeffs");
  if (static_cast<int>(coeffs.size()) != sys.dim())
    throw ShapeMismatch("state_from_coeffs: coefficient count does not match dimension");
  double n2 = 0;
  for (const auto& z : coeffs) n2 += std::norm(z);
  return StateVector(sys.frame(), std::move(coeffs), std::abs(n2 - 1.0) <= 1e-12);
}

/// The ambient image of the dual: |psi~> = sum_n c_n chi_n.
inline Vector associated_state(const StateVector& s) { return s.frame()->chi.apply(s.coeffs()); }

/// <a~|b> = sum_n conj(d_n) c_n over shared phi-basis coefficients.
inline cplx biortho_inner(const StateVector& a, const StateVector& b) {
  require_same_frame(a, b, "biortho_inner");
  return inner(a.coeffs(), b.coeffs());
}

/// Mode non-orthogonality measure, >= 1, equal to 1 for orthogonal modes.
inline double petermann_factor(const BiorthogonalSystem& sys, int n) {
  if (n < 0 || n >= sys.dim()) throw ShapeMismatch("petermann_factor: mode index out of range");
  const Vector p = sys.phi(n), x = sys.chi(n);
  const cplx xp = inner(x, p);
  const double num = std::norm(xp);
  const double den = inner(x, x).real() * inner(p, p).real();
  return den / num;
}

struct NonorthogonalityCheck {
  cplx overlap;        // <phi_m|phi_n>
  cplx via_gamma;      // 2i <phi_m|Gamma|phi_n> / (conj(kappa_m) - kappa_n)
  cplx via_h;          // 2 <phi_m|H|phi_n> / (conj(kappa_m) + kappa_n)
  double max_discrepancy;
};

/// Cross-checks the eigenstate overlap against its two quotient forms built
/// from the Hermitian split K = H - i Gamma.
inline NonorthogonalityCheck nonorthogonality_check(const BiorthogonalSystem& sys,
                                                    const Matrix& h, const Matrix& gamma,
                                                    int m, int n,
                                                    double check_tol = 1e-9) {
  const int dim = sys.dim();
  if (h.dim() != dim || gamma.dim() != dim)
    throw ShapeMismatch("nonorthogonality_check: split dimension mismatch");
  if (m == n) throw ShapeMismatch("nonorthogonality_check: requires m != n");
  double scale = sys.hamiltonian().frobenius_norm();
  if (scale == 0) scale = 1;
  if (hermiticity_defect(h) > 1e-10 * scale || hermiticity_defect(gamma) > 1e-10 * scale)
    throw SplitInvalid("nonorthogonality_check: H or Gamma is not Hermitian");
  Matrix recomposed = h;
  recomposed += cplx(0, -1) * gamma;
  if ((recomposed - sys.hamiltonian()).frobenius_norm() > 1e-10 * scale)
    throw SplitInvalid("nonorthogonality_check: H - i Gamma does not reproduce the Hamiltonian");

  const cplx km = sys.kappa()[m], kn = sys.kappa()[n];
  const cplx dm = std::conj(km) - kn, dp = std::conj(km) + kn;
  if (std::abs(dm) < 1e-12 * scale || std::abs(dp) < 1e-12 * scale)
    throw DenominatorSingular("nonorthogonality_check: vanishing eigenvalue denominator");

  const Vector pm = sys.phi(m), pn = sys.phi(n);
  NonorthogonalityCheck out;
  out.overlap = inner(pm, pn);
  out.via_gamma = cplx(0, 2) * inner(pm, gamma.apply(pn)) / dm;
  out.via_h = 2.0 * inner(pm, h.apply(pn)) / dp;
  out.max_discrepancy = std::max(std::abs(out.overlap - out.via_gamma),
                                 std::abs(out.overlap - out.via_h));
  if (out.max_discrepancy > check_tol * std::max(1.0, std::abs(out.overlap)))
    throw ConvergenceFailure("nonorthogonality_check: quotient forms disagree");
  return out;
}

/// Overload computing the unique Hermitian split internally.
inline NonorthogonalityCheck nonorthogonality_check(const BiorthogonalSystem& sys, int m, int n,
                                                    double check_tol = 1e-9) {
  const Matrix& k = sys.hamiltonian();
  const Matrix kd = k.adjoint();
  const Matrix h = 0.5 * (k + kd);
  const Matrix gamma = cplx(0, 0.5) * (k - kd);
  return nonorthogonality_check(sys, h, gamma, m, n, check_tol);
}

/// Gauge transform phi_n -> lambda_n phi_n, chi_n -> chi_n / conj(lambda_n).
/// Biorthonormality is preserved; useful for covariance checks.
inline BiorthogonalSystem rescale_gauge(const BiorthogonalSystem& sys, const Vector& lambdas) {
  if (static_cast<int>(lambdas.size()) != sys.dim())
    throw ShapeMismatch("rescale_gauge: one factor per mode required");
  auto frame = std::make_shared<BasisFrame>();
  frame->dim = sys.dim();
  frame->phi = Matrix(sys.dim());
  frame->chi = Matrix(sys.dim());
  double min_overlap = 1;
  for (int m = 0; m < sys.dim(); ++m) {
    const cplx lam = lambdas[m];
    if (std::abs(lam) == 0) throw ZeroState("rescale_gauge: zero gauge factor");
    Vector p = sys.phi(m), x = sys.chi(m);
    for (auto& z : p) z *= lam;
    for (auto& z : x) z /= std::conj(lam);
    frame->phi.set_column(m, p);
    frame->chi.set_column(m, x);
    min_overlap = std::min(min_overlap, std::abs(inner(x, p)) / (norm2(x) * norm2(p)));
  }
  const double defect = frame->biortho_defect();
  return BiorthogonalSystem(sys.hamiltonian(), sys.kappa(), std::move(frame), sys.gauge(),
                            defect, sys.spectrum_real(), min_overlap, sys.tolerances());
}

}  // namespace biortho
