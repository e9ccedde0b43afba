#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "biortho/observables.hpp"
#include "biortho/system.hpp"

namespace biortho {

struct MetricOperator {
  Matrix g;                      // Hermitian positive definite
  double condition_number = 1;
  double involution_defect = 0;  // ||g g - 1||_F
  // ||g conj(g) - 1||_F; the antilinear composite g followed by conjugation
  // is the involution that actually closes in the c-norm gauge.
  double antilinear_involution_defect = 0;
};

/// Metric from the eigenbasis: g = (sum_n phi_n phi_n^dagger)^{-1} in the
/// stored gauge. Maps each phi_n onto its dual chi_n.
inline MetricOperator metric_from_eigs(const BiorthogonalSystem& sys) {
  if (!sys.spectrum_real())
    throw ComplexSpectrum("metric_from_eigs: spectrum has complex eigenvalues");
  const Matrix& phi = sys.frame()->phi;
  const auto sv = singular_values(phi);
  if (sv.front() == 0 || sv.back() <= sys.tolerances().inv_tol * sv.front())
    throw ExceptionalPoint("metric_from_eigs: eigenvector matrix singular, metric does not exist");
  Matrix ginv = phi * phi.adjoint();
  Matrix g = refined_inverse(ginv);
  g = 0.5 * (g + g.adjoint());  // symmetrize away inversion roundoff

  MetricOperator out;
  const Matrix id = Matrix::identity(sys.dim());
  out.condition_number = (sv.front() / sv.back()) * (sv.front() / sv.back());
  out.involution_defect = (g * g - id).frobenius_norm();
  out.antilinear_involution_defect = (g * g.conj() - id).frobenius_norm();
  out.g = std::move(g);
  return out;
}

/// Expectation under the Hermitian pairing with a metric:
/// <psi|g F|psi> / <psi|g|psi>.
inline cplx metric_expectation(const MetricOperator& metric, const Matrix& f, const Vector& psi) {
  require_finite(psi, "metric_expectation");
  if (f.dim() != metric.g.dim() || static_cast<int>(psi.size()) != f.dim())
    throw ShapeMismatch("metric_expectation: dimension mismatch");
  const Vector gpsi = metric.g.apply(psi);
  const cplx den = inner(psi, gpsi);
  if (std::abs(den) < 1e-300) throw ZeroDenominator("metric_expectation: <psi|g|psi> vanishes");
  const Vector gf = metric.g.apply(f.apply(psi));
  return inner(psi, gf) / den;
}

/// Counter-diagonal parity matrix: P_{n, N+1-n} = 1.
inline Matrix parity_operator(int n) {
  if (n < 1) throw ShapeMismatch("parity_operator: dimension must be positive");
  Matrix p(n);
  for (int i = 0; i < n; ++i) p(i, n - 1 - i) = 1.0;
  return p;
}

struct PtCheck {
  bool is_pt_symmetric = false;
  double defect = 0;  // ||P conj(K) P - K||_F / ||K||_F
};

/// PT test with time reversal as plain complex conjugation.
inline PtCheck pt_check(const Matrix& k, const Matrix& p) {
  require_finite(k, "pt_check");
  if (p.dim() != k.dim()) throw ShapeMismatch("pt_check: parity dimension mismatch");
  const Matrix id = Matrix::identity(p.dim());
  if ((p * p - id).max_abs() > 1e-12 || hermiticity_defect(p) > 1e-12)
    throw ShapeMismatch("pt_check: parity must be a Hermitian involution");
  double scale = k.frobenius_norm();
  if (scale == 0) scale = 1;
  PtCheck out;
  out.defect = (p * k.conj() * p - k).frobenius_norm() / scale;
  out.is_pt_symmetric = out.defect <= 1e-10;
  return out;
}

/// Per-mode test whether P conj(phi_n) stays proportional to phi_n.
inline std::vector<bool> pt_eigenstate_check(const BiorthogonalSystem& sys, const Matrix& p,
                                             double collinear_tol = 1e-8) {
  if (p.dim() != sys.dim()) throw ShapeMismatch("pt_eigenstate_check: parity dimension mismatch");
  std::vector<bool> out(sys.dim());
  for (int n = 0; n < sys.dim(); ++n) {
    Vector v = sys.phi(n);
    for (auto& z : v) z = std::conj(z);
    const Vector w = p.apply(v);
    const Vector& ref = sys.phi(n);
    const cplx proj = inner(ref, w) / inner(ref, ref);
    double off2 = 0;
    for (size_t i = 0; i < w.size(); ++i) off2 += std::norm(w[i] - proj * ref[i]);
    out[n] = std::sqrt(off2) <= collinear_tol * norm2(w);
  }
  return out;
}

struct COperator {
  Matrix c;
  std::vector<int> signs;  // +1 or -1 per mode
  Matrix cp;               // the Hermitian positive product C P
};

/// Builds C = sum_n s_n |phi_n><chi_n| with signs found by exhaustive search
/// so that C P is Hermitian positive definite. C squares to the identity and
/// commutes with the Hamiltonian for any signing.
inline COperator c_operator(const BiorthogonalSystem& sys, const Matrix& p) {
  if (!sys.spectrum_real()) throw ComplexSpectrum("c_operator: spectrum has complex eigenvalues");
  const int n = sys.dim();
  if (p.dim() != n) throw ShapeMismatch("c_operator: parity dimension mismatch");
  if (n > 20) throw ShapeMismatch("c_operator: sign search capped at dimension 20");

  std::vector<Matrix> proj(n);
  for (int m = 0; m < n; ++m) proj[m] = projector(sys, m);

  double best_min_eig = -std::numeric_limits<double>::infinity();
  unsigned long best_mask = 0;
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    Matrix c(n);
    for (int m = 0; m < n; ++m) c += ((mask >> m) & 1UL ? cplx(-1) : cplx(1)) * proj[m];
    Matrix cp = c * p;
    if (hermiticity_defect(cp) > 1e-8 * std::max(1.0, cp.frobenius_norm())) continue;
    const Matrix herm = 0.5 * (cp + cp.adjoint());
    double min_eig = std::numeric_limits<double>::infinity();
    for (double ev : detail::hermitian_eigenvalues(herm)) min_eig = std::min(min_eig, ev);
    if (min_eig > best_min_eig) {
      best_min_eig = min_eig;
      best_mask = mask;
    }
    if (min_eig > 0) {
      COperator out;
      out.c = std::move(c);
      out.cp = std::move(cp);
      out.signs.resize(n);
      for (int m = 0; m < n; ++m) out.signs[m] = (mask >> m) & 1UL ? -1 : 1;
      return out;
    }
  }
  throw NoPositiveSigning("c_operator: no signing makes C P positive definite (best minimum "
                          "eigenvalue " + std::to_string(best_min_eig) + ", mask " +
                          std::to_string(best_mask) + ")");
}

inline COperator c_operator(const BiorthogonalSystem& sys) {
  return c_operator(sys, parity_operator(sys.dim()));
}

enum class Phase { unbroken, broken, exceptional };

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::unbroken: return "unbroken";
    case Phase::broken: return "broken";
    default: return "exceptional";
  }
}

struct PhaseScanReport {
  std::vector<double> parameter;
  std::vector<Phase> phase;
  std::vector<double> max_im_kappa;  // from the raw spectrum, NaN if unavailable
  std::vector<double> min_overlap;   // pre-gauge |<chi|phi>| minimum, NaN if unavailable
  std::vector<std::string> note;     // failure messages for exceptional points
};

/// Classifies each grid point as unbroken / broken / exceptional. A point is
/// exceptional when the system cannot be built (coalescence) or when the
/// pre-gauge left/right overlap falls under `near_ep_overlap`.
inline PhaseScanReport phase_scan(const std::function<Matrix(double)>& family,
                                  const std::vector<double>& grid, const Tolerances& opts = {},
                                  double near_ep_overlap = 5e-3) {
  PhaseScanReport rep;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double x : grid) {
    const Matrix k = family(x);
    rep.parameter.push_back(x);
    double max_im = nan;
    double scale = k.frobenius_norm();
    if (scale == 0) scale = 1;
    try {
      const RawSpectrum raw = eig_general(k, opts.eig_tol);
      max_im = 0;
      for (const auto& z : raw.eigenvalues) max_im = std::max(max_im, std::abs(z.imag()));
    } catch (const Error&) {
    }
    try {
      const BiorthogonalSystem sys = build_system(k, opts);
      rep.max_im_kappa.push_back(max_im);
      rep.min_overlap.push_back(sys.min_pre_gauge_overlap());
      if (sys.min_pre_gauge_overlap() <= near_ep_overlap) {
        rep.phase.push_back(Phase::exceptional);
        rep.note.emplace_back("near-exceptional: left/right overlap " +
                              std::to_string(sys.min_pre_gauge_overlap()));
      } else if (!sys.spectrum_real()) {
        rep.phase.push_back(Phase::broken);
        rep.note.emplace_back("");
      } else {
        rep.phase.push_back(Phase::unbroken);
        rep.note.emplace_back("");
      }
    } catch (const Error& e) {
      rep.max_im_kappa.push_back(max_im);
      rep.min_overlap.push_back(nan);
      rep.phase.push_back(Phase::exceptional);
      rep.note.emplace_back(e.what());
    }
  }
  return rep;
}

}  // namespace biortho
