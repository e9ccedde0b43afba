#pragma once

#include <cmath>

#include "biortho/observables.hpp"
#include "biortho/system.hpp"

namespace biortho {

/// Tensor product of biorthogonal systems. The flat index is row-major over
/// factor modes: (n, m) -> n * dim(B) + m.
class CompositeSystem {
 public:
  CompositeSystem(FramePtr frame, std::vector<FramePtr> factors, std::vector<int> dims)
      : frame_(std::move(frame)), factors_(std::move(factors)), dims_(std::move(dims)) {}

  int dim() const { return frame_->dim; }
  const FramePtr& frame() const { return frame_; }
  const std::vector<FramePtr>& factors() const { return factors_; }
  const std::vector<int>& factor_dims() const { return dims_; }
  double biortho_defect() const { return frame_->biortho_defect(); }

  int flat_index(int n, int m) const {
    if (dims_.size() != 2) throw ShapeMismatch("flat_index: not a two-factor system");
    if (n < 0 || n >= dims_[0] || m < 0 || m >= dims_[1])
      throw ShapeMismatch("flat_index: factor index out of range");
    return n * dims_[1] + m;
  }
  std::pair<int, int> multi_index(int flat) const {
    if (dims_.size() != 2) throw ShapeMismatch("multi_index: not a two-factor system");
    if (flat < 0 || flat >= dim()) throw ShapeMismatch("multi_index: index out of range");
    return {flat / dims_[1], flat % dims_[1]};
  }

 private:
  FramePtr frame_;
  std::vector<FramePtr> factors_;
  std::vector<int> dims_;
};

inline CompositeSystem tensor_systems(const BiorthogonalSystem& a, const BiorthogonalSystem& b) {
  auto frame = std::make_shared<BasisFrame>();
  frame->dim = a.dim() * b.dim();
  frame->phi = kron(a.frame()->phi, b.frame()->phi);
  frame->chi = kron(a.frame()->chi, b.frame()->chi);
  return CompositeSystem(std::move(frame), {a.frame(), b.frame()}, {a.dim(), b.dim()});
}

/// Kronecker product of observables on the factors; coefficients and ambient
/// forms both multiply factorwise.
inline Observable tensor_observable(const CompositeSystem& sys, const Observable& fa,
                                    const Observable& fb) {
  if (sys.factors().size() != 2) throw ShapeMismatch("tensor_observable: two factors required");
  if (fa.frame() != sys.factors()[0] || fb.frame() != sys.factors()[1])
    throw SystemMismatch("tensor_observable: observables not on the tensor factors");
  return Observable(sys.frame(), kron(fa.coeffs(), fb.coeffs()));
}

inline StateVector product_state(const CompositeSystem& sys, const StateVector& a,
                                 const StateVector& b) {
  if (sys.factors().size() != 2) throw ShapeMismatch("product_state: two factors required");
  if (a.frame() != sys.factors()[0] || b.frame() != sys.factors()[1])
    throw SystemMismatch("product_state: states not on the tensor factors");
  Vector c = kron(a.coeffs(), b.coeffs());
  double n2 = 0;
  for (const auto& z : c) n2 += std::norm(z);
  return StateVector(sys.frame(), std::move(c), std::abs(n2 - 1.0) <= 1e-12);
}

/// The spin-0 combination over two-level factors: (|12> - |21>) / sqrt(2).
inline StateVector singlet(const CompositeSystem& sys) {
  if (sys.factor_dims() != std::vector<int>{2, 2})
    throw DimensionNotTwo("singlet: requires two two-level factors");
  const double r = 1.0 / std::sqrt(2.0);
  return StateVector(sys.frame(), Vector{0.0, r, -r, 0.0}, true);
}

/// Coherent spin state in the symmetric sector of 2j copies of a two-level
/// system, represented directly by its 2j+1 coefficients:
/// coeff_k = sqrt(C(2j,k)) c1^{2j-k} c2^k with c1 = cos(theta/2),
/// c2 = sin(theta/2) e^{i phi}. The state owns its own
/// (2j+1)-dimensional symmetric frame.
inline StateVector coherent_spin_state(const BiorthogonalSystem& sys2, int two_j, double theta,
                                       double phi) {
  if (sys2.dim() != 2) throw DimensionNotTwo("coherent_spin_state: base system must be two-level");
  if (two_j < 1) throw InvalidSpin("coherent_spin_state: spin must be at least 1/2");
  const int dim = two_j + 1;
  const cplx c1 = std::cos(0.5 * theta);
  const cplx c2 = std::sin(0.5 * theta) * std::exp(cplx(0, phi));
  Vector pow1(dim), pow2(dim);
  pow1[0] = pow2[0] = 1.0;
  for (int k = 1; k < dim; ++k) {
    pow1[k] = pow1[k - 1] * c1;
    pow2[k] = pow2[k - 1] * c2;
  }
  Vector c(dim);
  double binom = 1.0;
  for (int k = 0; k < dim; ++k) {
    c[k] = std::sqrt(binom) * pow1[two_j - k] * pow2[k];
    binom = binom * (two_j - k) / (k + 1);
  }
  auto frame = std::make_shared<BasisFrame>();
  frame->dim = dim;
  frame->phi = Matrix::identity(dim);
  frame->chi = Matrix::identity(dim);
  return StateVector(std::move(frame), std::move(c), true);
}

}  // namespace biortho
