#pragma once

#include <cmath>
#include <random>

#include "biortho/system.hpp"

namespace biortho {

/// Evolved coefficients c_n(t) = c_n(0) e^{-i kappa_n t}, hbar = 1.
inline StateVector evolve(const BiorthogonalSystem& sys, const StateVector& psi0, double t) {
  if (psi0.frame() != sys.frame()) throw SystemMismatch("evolve: state on a different system");
  if (!std::isfinite(t)) throw std::invalid_argument("evolve: non-finite time");
  for (const auto& k : sys.kappa())
    if (k.imag() * t > 700.0) throw OverflowRisk("evolve: growing mode would overflow exp");
  Vector c = psi0.coeffs();
  for (int n = 0; n < sys.dim(); ++n) c[n] *= std::exp(cplx(0, -1) * sys.kappa()[n] * t);
  double n2 = 0;
  for (const auto& z : c) n2 += std::norm(z);
  return StateVector(sys.frame(), std::move(c), std::abs(n2 - 1.0) <= 1e-12);
}

/// e^{-i K t} assembled from the spectral form, sum_n e^{-i kappa_n t} Pi_n.
inline Matrix evolution_operator(const BiorthogonalSystem& sys, double t) {
  for (const auto& k : sys.kappa())
    if (k.imag() * t > 700.0) throw OverflowRisk("evolution_operator: exp overflow");
  Matrix u(sys.dim());
  for (int n = 0; n < sys.dim(); ++n)
    u += std::exp(cplx(0, -1) * sys.kappa()[n] * t) * projector(sys, n);
  return u;
}

struct NormTrajectory {
  std::vector<double> times;
  std::vector<double> norms;      // <psi~_t|psi_t>
  int dominant_mode = 0;          // slowest-decaying occupied mode
  double asymptotic_rate = 0;     // fitted -d ln(norm)/dt on the tail
};

/// Biorthogonal norm along the evolution; the tail fit uses least squares
/// on ln(norm) over the last quarter of the grid.
inline NormTrajectory norm_trajectory(const BiorthogonalSystem& sys, const StateVector& psi0,
                                      const std::vector<double>& times) {
  if (psi0.frame() != sys.frame()) throw SystemMismatch("norm_trajectory: state on a different system");
  if (times.empty()) throw std::invalid_argument("norm_trajectory: empty time grid");
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0 || !std::isfinite(times[i]))
      throw std::invalid_argument("norm_trajectory: times must be finite and nonnegative");
    if (i > 0 && times[i] < times[i - 1])
      throw std::invalid_argument("norm_trajectory: times must be sorted");
  }
  const int n = sys.dim();
  const double total = psi0.norm2();
  if (total == 0) throw ZeroState("norm_trajectory: zero state");

  std::vector<double> gamma(n), weight(n);
  for (int m = 0; m < n; ++m) {
    gamma[m] = -sys.kappa()[m].imag();
    weight[m] = std::norm(psi0.coeffs()[m]);
  }
  double min_occupied_gamma = std::numeric_limits<double>::infinity();
  for (int m = 0; m < n; ++m)
    if (weight[m] > 0) min_occupied_gamma = std::min(min_occupied_gamma, gamma[m]);

  NormTrajectory out;
  out.times = times;
  out.norms.resize(times.size());
  if (2.0 * times.back() * min_occupied_gamma < -700.0)
    throw OverflowRisk("norm_trajectory: growing mode would overflow exp");
  for (size_t i = 0; i < times.size(); ++i) {
    double s = 0;
    for (int m = 0; m < n; ++m)
      if (weight[m] > 0) s += weight[m] * std::exp(-2.0 * gamma[m] * times[i]);
    out.norms[i] = s;
  }

  int star = -1;
  for (int m = 0; m < n; ++m) {
    if (weight[m] <= 1e-28 * total) continue;
    if (star < 0 || gamma[m] < gamma[star]) star = m;
  }
  out.dominant_mode = star < 0 ? 0 : star;

  const size_t tail = std::max<size_t>(2, times.size() / 4);
  const size_t first = times.size() - tail;
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (size_t i = first; i < times.size(); ++i) {
    const double y = std::log(out.norms[i]);
    st += times[i];
    sy += y;
    stt += times[i] * times[i];
    sty += times[i] * y;
  }
  const double denom = tail * stt - st * st;
  out.asymptotic_rate = denom == 0 ? 0 : -(tail * sty - st * sy) / denom;
  return out;
}

struct UnitarityReport {
  int trials = 0;
  double t_max = 0;
  double max_deviation = 0;  // over sampled pairs and times
  bool unitary = false;
};

/// Samples random coefficient pairs and times, comparing evolved biorthogonal
/// inner products against their initial values.
inline UnitarityReport check_unitarity(const BiorthogonalSystem& sys, int trials, double t_max,
                                       unsigned long long seed = 20240711ULL) {
  if (trials <= 0 || t_max < 0) throw std::invalid_argument("check_unitarity: bad arguments");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> ut(0.0, t_max);
  UnitarityReport rep;
  rep.trials = trials;
  rep.t_max = t_max;
  for (int trial = 0; trial < trials; ++trial) {
    Vector c(sys.dim()), d(sys.dim());
    for (int i = 0; i < sys.dim(); ++i) {
      c[i] = cplx(g(rng), g(rng));
      d[i] = cplx(g(rng), g(rng));
    }
    const StateVector a = normalize(StateVector(sys.frame(), c));
    const StateVector b = normalize(StateVector(sys.frame(), d));
    const cplx before = biortho_inner(a, b);
    const double t = ut(rng);
    const cplx after = biortho_inner(evolve(sys, a, t), evolve(sys, b, t));
    rep.max_deviation = std::max(rep.max_deviation, std::abs(after - before));
  }
  rep.unitary = sys.spectrum_real() && rep.max_deviation <= 1e-9;
  return rep;
}

/// max_mn |<phi_m|phi_n> - <chi_n|chi_m>|; vanishes identically in the
/// c-norm gauge, reported as a diagnostic for the balanced gauge.
inline double geometric_identity_defect(const BiorthogonalSystem& sys) {
  const Matrix gp = sys.frame()->phi.adjoint() * sys.frame()->phi;
  const Matrix gx = sys.frame()->chi.adjoint() * sys.frame()->chi;
  return (gp - gx.transpose()).max_abs();
}

struct DecayAnalysis {
  int dominant_mode = 0;
  std::vector<double> rates;        // 2 gamma_n per mode
  double half_life = 0;             // ln 2 / rate of the dominant mode, inf if stable
  double gamma_quotient_discrepancy = 0;  // vs <phi|Gamma|phi>/<phi|phi>
};

inline DecayAnalysis decay_analysis(const BiorthogonalSystem& sys, const StateVector& psi0) {
  if (psi0.frame() != sys.frame()) throw SystemMismatch("decay_analysis: state on a different system");
  const int n = sys.dim();
  DecayAnalysis out;
  out.rates.resize(n);
  const Matrix& k = sys.hamiltonian();
  const Matrix gamma_op = cplx(0, 0.5) * (k - k.adjoint());
  for (int m = 0; m < n; ++m) {
    const double gam = -sys.kappa()[m].imag();
    out.rates[m] = 2.0 * gam;
    const Vector p = sys.phi(m);
    const double quotient = (inner(p, gamma_op.apply(p)) / inner(p, p)).real();
    out.gamma_quotient_discrepancy =
        std::max(out.gamma_quotient_discrepancy, std::abs(gam - quotient));
  }
  int star = -1;
  const double total = psi0.norm2();
  for (int m = 0; m < n; ++m) {
    if (std::norm(psi0.coeffs()[m]) <= 1e-28 * total) continue;
    if (star < 0 || -sys.kappa()[m].imag() < -sys.kappa()[star].imag()) star = m;
  }
  out.dominant_mode = star < 0 ? 0 : star;
  const double rate = out.rates[out.dominant_mode];
  out.half_life = rate > 1e-300 ? std::log(2.0) / rate : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace biortho
