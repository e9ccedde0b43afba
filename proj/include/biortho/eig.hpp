#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "biortho/matrix.hpp"

namespace biortho {

struct Tolerances {
  double eig_tol = 1e-10;   // eigenpair residual, relative to the Frobenius norm
  double inv_tol = 1e-12;   // basis conditioning floor, sigma_min / sigma_max
  double pair_tol = 1e-8;   // left/right eigenvalue pairing, relative
  double deg_tol = 1e-8;    // eigenvalue collision, relative
  double ep_tol = 1e-8;     // pre-gauge left/right overlap at unit norms
  double sym_tol = 1e-10;   // complex-symmetry detection, relative
  double system_tol = 1e-9; // accepted biorthonormality defect
  double reality_tol = 1e-9;// spectrum reality classification, relative
};

struct RawSpectrum {
  std::vector<cplx> eigenvalues;
  Matrix right_vectors;           // unit Hermitian norm, one column per eigenvalue
  std::vector<double> residuals;  // ||M v - lambda v||_2 per pair
};

namespace detail {

// Descending real part, ties broken by descending imaginary part.
inline bool eig_order(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

inline void balance(Matrix& a) {
  const int n = a.dim();
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0, c = 0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0 || r == 0) continue;
      double g = r / radix, f = 1, s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        const double inv = 1.0 / f;
        for (int j = 0; j < n; ++j) a(i, j) *= inv;
        for (int j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

inline void hessenberg(Matrix& a) {
  const int n = a.dim();
  for (int k = 0; k < n - 2; ++k) {
    double colnorm = 0;
    for (int i = k + 1; i < n; ++i) colnorm += std::norm(a(i, k));
    colnorm = std::sqrt(colnorm);
    if (colnorm == 0) continue;
    const cplx x0 = a(k + 1, k);
    const cplx alpha = (std::abs(x0) == 0) ? cplx(-colnorm, 0)
                                           : -(x0 / std::abs(x0)) * colnorm;
    Vector v(n, cplx{});
    v[k + 1] = x0 - alpha;
    for (int i = k + 2; i < n; ++i) v[i] = a(i, k);
    double vn2 = 0;
    for (int i = k + 1; i < n; ++i) vn2 += std::norm(v[i]);
    if (vn2 == 0) continue;
    const double beta = 2.0 / vn2;
    // A <- H A with H = I - beta v v^dagger
    for (int j = k; j < n; ++j) {
      cplx s{};
      for (int i = k + 1; i < n; ++i) s += std::conj(v[i]) * a(i, j);
      s *= beta;
      for (int i = k + 1; i < n; ++i) a(i, j) -= s * v[i];
    }
    // A <- A H
    for (int i = 0; i < n; ++i) {
      cplx s{};
      for (int j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= beta;
      for (int j = k + 1; j < n; ++j) a(i, j) -= s * std::conj(v[j]);
    }
    for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

inline void eig2x2(cplx a, cplx b, cplx c, cplx d, cplx& l1, cplx& l2) {
  const cplx tr = a + d;
  const cplx det = a * d - b * c;
  cplx disc = std::sqrt(tr * tr - 4.0 * det);
  // Pick the branch that avoids cancellation in tr + disc.
  if (std::real(std::conj(tr) * disc) < 0) disc = -disc;
  const cplx big = 0.5 * (tr + disc);
  if (std::abs(big) > 0) {
    l1 = big;
    l2 = det / big;
  } else {
    l1 = l2 = 0.5 * tr;
  }
}

/// Eigenvalues of an upper Hessenberg matrix by the shifted complex QR
/// iteration with deflation; the matrix is destroyed.
inline std::vector<cplx> hessenberg_qr_eigenvalues(Matrix& h, double scale, int max_sweeps) {
  const int n = h.dim();
  std::vector<cplx> eig(n);
  const double eps = std::numeric_limits<double>::epsilon();
  int hi = n - 1;
  int sweeps_here = 0;
  int total = 0;
  while (hi >= 0) {
    // Deflate negligible subdiagonals in the trailing block.
    int lo = hi;
    while (lo > 0) {
      const double off = std::abs(h(lo, lo - 1));
      const double diag = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (off <= eps * diag + 1e-300 || off <= 1e-2 * eps * scale) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig[hi] = h(hi, hi);
      --hi;
      sweeps_here = 0;
      continue;
    }
    if (lo == hi - 1) {
      cplx l1, l2;
      eig2x2(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi), l1, l2);
      eig[hi] = l1;
      eig[lo] = l2;
      hi -= 2;
      sweeps_here = 0;
      continue;
    }
    if (++total > max_sweeps) throw ConvergenceFailure("eig: QR iteration budget exceeded");

    // Wilkinson shift from the trailing 2x2; exceptional shift breaks cycles.
    cplx shift;
    if (++sweeps_here % 12 == 0) {
      shift = h(hi, hi) + cplx(std::abs(h(hi, hi - 1)) + std::abs(h(hi - 1, hi - 2)), 0);
    } else {
      cplx l1, l2;
      eig2x2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi), l1, l2);
      shift = (std::abs(l1 - h(hi, hi)) < std::abs(l2 - h(hi, hi))) ? l1 : l2;
    }

    // Explicit shifted QR step on the active block via Givens rotations.
    const int m = hi - lo + 1;
    std::vector<double> cs(m - 1);
    std::vector<cplx> sn(m - 1);
    for (int i = lo; i < hi + 1; ++i) h(i, i) -= shift;
    for (int k = lo; k < hi; ++k) {
      const cplx f = h(k, k), g = h(k + 1, k);
      const double fa = std::abs(f), ga = std::abs(g);
      double c;
      cplx s;
      if (ga == 0) {
        c = 1;
        s = 0;
      } else if (fa == 0) {
        c = 0;
        s = std::conj(g) / ga;
      } else {
        const double r = std::hypot(fa, ga);
        c = fa / r;
        s = (f / fa) * (std::conj(g) / r);
      }
      cs[k - lo] = c;
      sn[k - lo] = s;
      for (int j = k; j <= hi; ++j) {
        const cplx t1 = h(k, j), t2 = h(k + 1, j);
        h(k, j) = c * t1 + s * t2;
        h(k + 1, j) = -std::conj(s) * t1 + c * t2;
      }
    }
    for (int k = lo; k < hi; ++k) {
      const double c = cs[k - lo];
      const cplx s = sn[k - lo];
      const int top = std::min(k + 2, hi);
      for (int i = lo; i <= top; ++i) {
        const cplx t1 = h(i, k), t2 = h(i, k + 1);
        h(i, k) = c * t1 + std::conj(s) * t2;
        h(i, k + 1) = -s * t1 + c * t2;
      }
    }
    for (int i = lo; i < hi + 1; ++i) h(i, i) += shift;
  }
  return eig;
}

inline Vector inverse_iteration_start(int n, int which) {
  Vector b(n);
  for (int i = 0; i < n; ++i) {
    const double t = 0.7 * (i + 1) + 0.31 * (which + 1);
    b[i] = cplx(std::cos(t), std::sin(1.3 * t + 0.17 * which));
  }
  const double nb = norm2(b);
  for (auto& z : b) z /= nb;
  return b;
}

inline void normalize_phase(Vector& v) {
  int imax = 0;
  double best = -1;
  for (size_t i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      imax = static_cast<int>(i);
    }
  const double nv = norm2(v);
  cplx ph = v[imax] / std::abs(v[imax]);
  for (auto& z : v) z /= (nv * ph);
}

}  // namespace detail

/// All eigenpairs of a general complex matrix. Eigenvalues come from a
/// Hessenberg reduction followed by shifted QR; eigenvectors from inverse
/// iteration on the original matrix. Dimensions 1 and 2 use closed forms.
inline RawSpectrum eig_general(const Matrix& m, double eig_tol = Tolerances{}.eig_tol) {
  require_finite(m, "eig_general");
  const int n = m.dim();
  if (n <= 0) throw ShapeMismatch("eig_general: empty matrix");
  if (eig_tol <= 0) throw std::invalid_argument("eig_general: eig_tol must be positive");
  double scale = m.frobenius_norm();
  if (scale == 0) scale = 1;

  std::vector<cplx> eigs;
  if (n == 1) {
    eigs = {m(0, 0)};
  } else if (n == 2) {
    cplx l1, l2;
    detail::eig2x2(m(0, 0), m(0, 1), m(1, 0), m(1, 1), l1, l2);
    eigs = {l1, l2};
  } else {
    Matrix h = m;
    detail::balance(h);
    detail::hessenberg(h);
    eigs = detail::hessenberg_qr_eigenvalues(h, scale, 60 * n);
  }
  std::sort(eigs.begin(), eigs.end(), detail::eig_order);

  RawSpectrum spec;
  spec.eigenvalues = eigs;
  spec.right_vectors = Matrix(n);
  spec.residuals.assign(n, 0.0);

  // Numerically coincident eigenvalues share a cluster; their inverse
  // iterations are seeded and orthogonalized against each other so that a
  // diagonalizable degeneracy still yields independent vectors.
  const double tie_tol = 1e3 * std::numeric_limits<double>::epsilon() * scale;
  std::vector<int> cluster_head(n, 0);
  for (int k = 0; k < n; ++k)
    cluster_head[k] = (k > 0 && std::abs(eigs[k] - eigs[k - 1]) <= tie_tol) ? cluster_head[k - 1] : k;

  std::vector<Vector> accepted(n);
  for (int k = 0; k < n; ++k) {
    const cplx lambda = eigs[k];
    Matrix shifted = m;
    for (int i = 0; i < n; ++i) shifted(i, i) -= lambda;
    const Lu lu(shifted, 1e-3 * std::numeric_limits<double>::epsilon());

    auto run = [&](bool orthogonalize) {
      Vector x = detail::inverse_iteration_start(n, k);
      double res = std::numeric_limits<double>::infinity();
      for (int it = 0; it < 6; ++it) {
        x = lu.solve(x);
        if (orthogonalize)
          for (int j = cluster_head[k]; j < k; ++j) {
            const cplx pr = inner(accepted[j], x);
            for (int i = 0; i < n; ++i) x[i] -= pr * accepted[j][i];
          }
        const double nx = norm2(x);
        if (nx == 0 || !std::isfinite(nx)) {
          x = detail::inverse_iteration_start(n, k + 17 * (it + 1));
          continue;
        }
        for (auto& z : x) z /= nx;
        const Vector mx = m.apply(x);
        res = 0;
        {
          double s = 0;
          for (int i = 0; i < n; ++i) s += std::norm(mx[i] - lambda * x[i]);
          res = std::sqrt(s);
        }
        if (res <= 0.25 * eig_tol * scale) break;
      }
      return std::pair<Vector, double>(std::move(x), res);
    };

    auto [x, res] = run(cluster_head[k] < k);
    if (res > eig_tol * scale && cluster_head[k] < k) {
      // A defective cluster cannot supply an independent vector; fall back to
      // the plain iteration, which converges onto the existing eigendirection.
      std::tie(x, res) = run(false);
    }
    if (res > eig_tol * scale)
      throw ConvergenceFailure("eig: inverse iteration residual above tolerance");
    detail::normalize_phase(x);
    accepted[k] = x;
    spec.right_vectors.set_column(k, x);
    spec.residuals[k] = res;
  }
  return spec;
}

/// Singular values by the one-sided Jacobi method, descending.
inline std::vector<double> singular_values(const Matrix& m) {
  const int n = m.dim();
  Matrix a = m;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        double app = 0, aqq = 0;
        cplx apq{};
        for (int i = 0; i < n; ++i) {
          app += std::norm(a(i, p));
          aqq += std::norm(a(i, q));
          apq += std::conj(a(i, p)) * a(i, q);
        }
        const double off = std::abs(apq);
        if (off <= 10 * eps * std::sqrt(app * aqq) || off == 0) continue;
        rotated = true;
        const cplx phase = apq / off;
        const double tau = (aqq - app) / (2 * off);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
        const double c = 1 / std::sqrt(1 + t * t);
        const double s = c * t;
        for (int i = 0; i < n; ++i) {
          const cplx xp = a(i, p), xq = a(i, q);
          a(i, p) = c * xp - s * std::conj(phase) * xq;
          a(i, q) = s * phase * xp + c * xq;
        }
      }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += std::norm(a(i, j));
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.rbegin(), sv.rend());
  return sv;
}

/// Left-conjugate basis from a right-vector matrix: V with V^dagger U = 1.
/// Column n of V is the dual partner of column n of U.
inline Matrix left_from_right(const Matrix& u, double inv_tol = Tolerances{}.inv_tol) {
  require_finite(u, "left_from_right");
  const auto sv = singular_values(u);
  if (sv.front() == 0 || sv.back() <= inv_tol * sv.front())
    throw SingularBasis("left_from_right: basis matrix numerically singular");
  return refined_inverse(u).adjoint();
}

/// Matches eigenvalues of K against conjugated eigenvalues of K^dagger.
/// Returns the permutation p with |kappa_n - conj(nu_p(n))| small for all n.
inline std::vector<int> pair_left_right(const RawSpectrum& spec_k, const RawSpectrum& spec_kdag,
                                        double pair_tol = Tolerances{}.pair_tol) {
  const int n = static_cast<int>(spec_k.eigenvalues.size());
  if (n != static_cast<int>(spec_kdag.eigenvalues.size()))
    throw ShapeMismatch("pair_left_right: spectra of different dimension");
  double scale = 0;
  for (const auto& z : spec_k.eigenvalues) scale = std::max(scale, std::abs(z));
  if (scale == 0) scale = 1;
  const double tol = pair_tol * scale;

  std::vector<int> perm(n, -1);
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    int hit = -1;
    int hits = 0;
    for (int j = 0; j < n; ++j) {
      if (std::abs(spec_k.eigenvalues[i] - std::conj(spec_kdag.eigenvalues[j])) <= tol) {
        ++hits;
        if (!used[j]) hit = j;
      }
    }
    if (hits != 1)
      throw PairingAmbiguous("pair_left_right: eigenvalue " + std::to_string(i) +
                             " has " + std::to_string(hits) + " conjugate partners");
    if (hit < 0) throw PairingAmbiguous("pair_left_right: conjugate partner already taken");
    used[hit] = true;
    perm[i] = hit;
  }
  return perm;
}

/// Hermitian Gram matrix G_mn = <v_m | v_n>, conjugate-linear in the first slot.
inline Matrix gram(const std::vector<Vector>& vectors) {
  if (vectors.empty()) throw ShapeMismatch("gram: empty vector list");
  const size_t len = vectors.front().size();
  for (const auto& v : vectors)
    if (v.size() != len) throw ShapeMismatch("gram: vectors of unequal length");
  const int n = static_cast<int>(vectors.size());
  Matrix g(n);
  for (int i = 0; i < n; ++i) {
    double d = 0;
    for (const auto& z : vectors[i]) d += std::norm(z);
    g(i, i) = d;
    for (int j = i + 1; j < n; ++j) {
      const cplx v = inner(vectors[i], vectors[j]);
      g(i, j) = v;
      g(j, i) = std::conj(v);
    }
  }
  return g;
}

}  // namespace biortho
