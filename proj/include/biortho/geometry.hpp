#pragma once

#include <cmath>

#include "biortho/system.hpp"

namespace biortho {

struct OverlapResult {
  double cos2_half_s;  // in [0, 1]
  double s;            // in [0, pi]
};

namespace detail {

inline double clamp01(double x, const char* who) {
  if (x < -1e-12 || x > 1.0 + 1e-12)
    throw ConvergenceFailure(std::string(who) + ": value outside [0,1] beyond roundoff");
  return std::min(1.0, std::max(0.0, x));
}

}  // namespace detail

/// Probability of finding mode n: |c_n|^2 normalized over the coefficients.
/// Homogeneous in the state, so any overall complex scale drops out.
inline double transition_prob(const StateVector& psi, int n) {
  if (n < 0 || n >= psi.dim()) throw ShapeMismatch("transition_prob: mode index out of range");
  const double total = psi.norm2();
  if (total == 0) throw ZeroState("transition_prob: zero state");
  return detail::clamp01(std::norm(psi.coeffs()[n]) / total, "transition_prob");
}

inline std::vector<double> transition_probs(const StateVector& psi) {
  std::vector<double> p(psi.dim());
  const double total = psi.norm2();
  if (total == 0) throw ZeroState("transition_probs: zero state");
  double sum = 0;
  for (int n = 0; n < psi.dim(); ++n) {
    p[n] = detail::clamp01(std::norm(psi.coeffs()[n]) / total, "transition_probs");
    sum += p[n];
  }
  // Renormalize away the clamping residue.
  for (auto& v : p) v /= sum;
  return p;
}

/// Overlap distance: cos^2(s/2) = <xi~|eta><eta~|xi> / (<xi~|xi><eta~|eta>).
/// In coefficients this is the squared cosine of the Euclidean angle.
inline OverlapResult overlap_distance(const StateVector& xi, const StateVector& eta) {
  require_same_frame(xi, eta, "overlap_distance");
  const double n1 = xi.norm2(), n2 = eta.norm2();
  if (n1 == 0 || n2 == 0) throw ZeroState("overlap_distance: zero state");
  const cplx ov = inner(xi.coeffs(), eta.coeffs());
  const double c2 = detail::clamp01(std::norm(ov) / (n1 * n2), "overlap_distance");
  return {c2, 2.0 * std::acos(std::sqrt(c2))};
}

/// Fubini-Study line element for a coefficient increment d_c:
/// ds^2 = [<xi~|xi><dxi~|dxi> - <xi~|dxi><dxi~|xi>] / <xi~|xi>^2.
/// Normalized to the sphere of radius one half: on a two-level system this is
/// (dtheta^2 + sin^2 theta dphi^2) / 4, and eigenstates sit a length pi/2
/// apart. The overlap angle s of overlap_distance spans [0, pi] instead, so
/// infinitesimally s^2 approaches 4 ds^2.
inline double fs_line_element(const StateVector& xi, const Vector& dcoeffs) {
  if (static_cast<int>(dcoeffs.size()) != xi.dim())
    throw ShapeMismatch("fs_line_element: increment length mismatch");
  const double nn = xi.norm2();
  if (nn == 0) throw ZeroState("fs_line_element: zero state");
  double dd = 0;
  for (const auto& z : dcoeffs) dd += std::norm(z);
  const cplx cross = inner(xi.coeffs(), dcoeffs);
  const double ds2 = (nn * dd - std::norm(cross)) / (nn * nn);
  if (ds2 < -1e-12) throw ConvergenceFailure("fs_line_element: negative squared length");
  return std::max(0.0, ds2);
}

/// Spherical chart of a two-level state: c1 : c2 = cos(theta/2) : sin(theta/2) e^{i phi}.
/// Poles report phi = 0.
inline std::pair<double, double> bloch_coords(const StateVector& psi) {
  if (psi.dim() != 2) throw DimensionNotTwo("bloch_coords: requires a two-level system");
  const cplx c1 = psi.coeffs()[0], c2 = psi.coeffs()[1];
  const double a1 = std::abs(c1), a2 = std::abs(c2);
  if (a1 == 0 && a2 == 0) throw ZeroState("bloch_coords: zero state");
  const double theta = 2.0 * std::atan2(a2, a1);
  if (a1 == 0 || a2 == 0) return {theta, 0.0};
  double phi = std::arg(c2 / c1);
  if (phi < 0) phi += 2.0 * M_PI;
  if (phi >= 2.0 * M_PI) phi = 0.0;
  return {theta, phi};
}

/// Inverse of bloch_coords on a given two-level system.
template <class System>
StateVector bloch_state(const System& sys, double theta, double phi) {
  if (sys.dim() != 2) throw DimensionNotTwo("bloch_state: requires a two-level system");
  Vector c = {std::cos(0.5 * theta), std::sin(0.5 * theta) * std::exp(cplx(0, phi))};
  return StateVector(sys.frame(), std::move(c), true);
}

}  // namespace biortho
