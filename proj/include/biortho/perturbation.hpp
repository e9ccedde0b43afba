#pragma once

#include <cmath>

#include "biortho/system.hpp"

namespace biortho {

struct FirstOrderResult {
  int mode = 0;
  cplx mu1;               // <chi_n|K'|phi_n>
  Vector psi1_coeffs;     // expansion of the eigenvector correction; entry n is zero
  double epsilon_validity = 0;  // largest step with a tenfold spectral-gap margin
};

/// First-order corrections for K + eps K' at mode n, normalized so the
/// correction has no component along phi_n.
inline FirstOrderResult first_order(const BiorthogonalSystem& sys, const Matrix& kprime, int n) {
  require_finite(kprime, "first_order");
  if (kprime.dim() != sys.dim()) throw ShapeMismatch("first_order: perturbation dimension mismatch");
  if (n < 0 || n >= sys.dim()) throw ShapeMismatch("first_order: mode index out of range");
  double scale = sys.hamiltonian().frobenius_norm();
  if (scale == 0) scale = 1;

  double min_gap = std::numeric_limits<double>::infinity();
  for (int m = 0; m < sys.dim(); ++m)
    if (m != n) min_gap = std::min(min_gap, std::abs(sys.kappa()[n] - sys.kappa()[m]));
  if (sys.dim() > 1 && min_gap < sys.tolerances().deg_tol * scale)
    throw DegenerateGap("first_order: spectral gap too small for the series");

  const Vector kp_phi = kprime.apply(sys.phi(n));
  FirstOrderResult out;
  out.mode = n;
  out.mu1 = inner(sys.chi(n), kp_phi);
  out.psi1_coeffs.assign(sys.dim(), cplx{});
  for (int m = 0; m < sys.dim(); ++m) {
    if (m == n) continue;
    out.psi1_coeffs[m] = inner(sys.chi(m), kp_phi) / (sys.kappa()[n] - sys.kappa()[m]);
  }
  const double kp_norm = kprime.frobenius_norm();
  out.epsilon_validity = kp_norm == 0 ? std::numeric_limits<double>::infinity()
                                      : min_gap / (10.0 * kp_norm);
  return out;
}

struct Displacement {
  Matrix v;                    // V phi_n = psi_n, with <chi_n|psi_n> = 1
  std::vector<int> matching;   // mode n of the base maps to this mode of the target
  double nonunitarity = 0;     // ||V^dagger V - 1||_F
};

namespace detail {

/// Greedy nearest-eigenvalue assignment; ambiguous when the best candidate
/// is not clearly ahead of the runner-up (ratio one half).
inline std::vector<int> match_modes(const std::vector<cplx>& from, const std::vector<cplx>& to) {
  const int n = static_cast<int>(from.size());
  std::vector<int> perm(n, -1);
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    int best = -1;
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(from[i] - to[j]);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = j;
      } else {
        d2 = std::min(d2, d);
      }
    }
    if (best < 0 || (std::isfinite(d2) && d1 > 0.5 * d2))
      throw MatchingAmbiguous("mode matching: eigenvalue assignment not unique");
    used[best] = true;
    perm[i] = best;
  }
  return perm;
}

}  // namespace detail

/// Operator taking each base eigenstate to its continuation in the perturbed
/// system: V = sum_n |psi_n><chi_n|. Preserves the biorthogonal norm by
/// construction but is not unitary in general.
inline Displacement displacement_operator(const BiorthogonalSystem& sys,
                                          const BiorthogonalSystem& sys_eps) {
  if (sys.dim() != sys_eps.dim())
    throw ShapeMismatch("displacement_operator: systems of different dimension");
  const int n = sys.dim();
  Displacement out;
  out.matching = detail::match_modes(sys.kappa(), sys_eps.kappa());
  Matrix psi(n);
  for (int m = 0; m < n; ++m) {
    Vector target = sys_eps.phi(out.matching[m]);
    const cplx ov = inner(sys.chi(m), target);
    if (std::abs(ov) < 1e-8)
      throw MatchingAmbiguous("displacement_operator: matched mode nearly dual-orthogonal");
    for (auto& z : target) z /= ov;
    psi.set_column(m, target);
  }
  out.v = psi * sys.frame()->chi.adjoint();
  out.nonunitarity = (out.v.adjoint() * out.v - Matrix::identity(n)).frobenius_norm();
  return out;
}

/// Convergence-order probe: compares the first-order prediction against exact
/// diagonalization at eps and eps/2 and returns log2 of the residual ratio
/// (about 2 inside the series radius). NaN marks an exactly reproduced mode.
inline double richardson_validate(const Matrix& k, const Matrix& kprime, int n, double eps,
                                  const Tolerances& opts = {}) {
  if (eps <= 0 || !std::isfinite(eps))
    throw std::invalid_argument("richardson_validate: eps must be positive");
  const BiorthogonalSystem sys = build_system(k, opts);
  const FirstOrderResult fo = first_order(sys, kprime, n);
  double scale = k.frobenius_norm();
  if (scale == 0) scale = 1;

  auto residual = [&](double e) {
    Matrix pert = k;
    pert += cplx(e) * kprime;
    const RawSpectrum spec = eig_general(pert, opts.eig_tol);
    const cplx predicted = sys.kappa()[n] + e * fo.mu1;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& mu : spec.eigenvalues) best = std::min(best, std::abs(mu - predicted));
    return best;
  };

  const double r1 = residual(eps);
  const double r2 = residual(0.5 * eps);
  if (r1 <= 1e-13 * scale || r2 <= 1e-13 * scale)
    return std::numeric_limits<double>::quiet_NaN();  // exact at this probe size
  return std::log2(r1 / r2);
}

}  // namespace biortho
