#include <catch2/catch_amalgamated.hpp>

#include "biortho/geometry.hpp"
#include "biortho/observables.hpp"
#include "biortho/system.hpp"
#include "support/oracles.hpp"

using namespace biortho;

TEST_CASE("diagonal Hamiltonian builds the standard basis") {
  Matrix k(2);
  k(0, 0) = 1.0;
  k(1, 1) = 2.0;
  const auto sys = build_system(k);
  REQUIRE(sys.biortho_defect() <= 1e-15);
  REQUIRE(sys.spectrum_real());
  // Sorted descending: mode 0 is eigenvalue 2.
  CHECK(std::abs(sys.kappa()[0] - cplx(2.0)) <= 1e-14);
  for (int n = 0; n < 2; ++n) {
    const Vector p = sys.phi(n), x = sys.chi(n);
    for (int i = 0; i < 2; ++i) {
      const double expected = (i == 1 - n) ? 1.0 : 0.0;
      CHECK(std::abs(p[i] - cplx(expected)) <= 1e-14);
      CHECK(std::abs(x[i] - cplx(expected)) <= 1e-14);
    }
  }
}

TEST_CASE("two-level family eigenvectors match the closed form with c-norm scaling") {
  const double gamma = 0.6;
  const auto sys = build_system(oracles::sx_igz(gamma));
  REQUIRE(sys.gauge() == Gauge::c_norm);

  CHECK(oracles::direction_mismatch(sys.phi(0), oracles::closed_form_phi(gamma, +1)) <= 1e-12);
  CHECK(oracles::direction_mismatch(sys.phi(1), oracles::closed_form_phi(gamma, -1)) <= 1e-12);
  CHECK(oracles::direction_mismatch(sys.chi(0), oracles::closed_form_chi(gamma, +1)) <= 1e-12);
  CHECK(oracles::direction_mismatch(sys.chi(1), oracles::closed_form_chi(gamma, -1)) <= 1e-12);

  // Normalizer: phi_pm = n_pm (1, i gamma pm sqrt(1-gamma^2)) with
  // n_pm^2 = (1 -+ i gamma / sqrt(1-gamma^2)) / 2.
  for (int mode = 0; mode < 2; ++mode) {
    const int sign = mode == 0 ? +1 : -1;
    const cplx n2 = sys.phi(mode)[0] * sys.phi(mode)[0];  // first closed-form entry is 1
    const cplx expected = 0.5 * (1.0 - cplx(0, sign * gamma / 0.8));
    CHECK(std::abs(n2 - expected) <= 1e-12);
  }
}

TEST_CASE("coalescing eigenvectors raise ExceptionalPoint") {
  CHECK_THROWS_AS(build_system(oracles::sx_igz(1.0)), ExceptionalPoint);
}

TEST_CASE("eigenvalue collision with independent vectors raises DegenerateSpectrum") {
  Matrix k(3);
  k(0, 0) = 1.0;
  k(1, 1) = 1.0;
  k(2, 2) = 2.0;
  CHECK_THROWS_AS(build_system(k), DegenerateSpectrum);
}

TEST_CASE("projectors") {
  SECTION("diagonal case is the rank-one basis projector") {
    Matrix k(2);
    k(0, 0) = 2.0;
    k(1, 1) = 1.0;
    const auto sys = build_system(k);
    const Matrix p0 = projector(sys, 0);
    CHECK(std::abs(p0(0, 0) - cplx(1.0)) <= 1e-14);
    CHECK(std::abs(p0(1, 1)) <= 1e-14);
  }
  SECTION("two-level family: idempotent, trace one, not Hermitian") {
    const auto sys = build_system(oracles::sx_igz(0.6));
    const Matrix p = projector(sys, 0);
    CHECK((p * p - p).frobenius_norm() <= 1e-12);
    CHECK(std::abs(p.trace() - cplx(1.0)) <= 1e-12);
    CHECK(hermiticity_defect(p) > 0.1);  // genuinely skew in this family
  }
  SECTION("spectrum of a projector is one and zeros") {
    std::mt19937_64 rng(77);
    const auto sys = build_system(oracles::random_ginibre(rng, 5));
    const auto ev = eig_general(projector(sys, 2)).eigenvalues;
    CHECK(std::abs(ev.front() - cplx(1.0)) <= 1e-10);
    for (size_t i = 1; i < ev.size(); ++i) CHECK(std::abs(ev[i]) <= 1e-10);
  }
  SECTION("projector algebra and annihilation") {
    std::mt19937_64 rng(78);
    const auto sys = build_system(oracles::random_ginibre(rng, 4));
    for (int n = 0; n < 4; ++n) {
      const Matrix pn = projector(sys, n);
      for (int m = 0; m < 4; ++m) {
        const Matrix pm = projector(sys, m);
        const Matrix prod = pn * pm;
        const Matrix expected = (n == m) ? pn : Matrix(4);
        REQUIRE((prod - expected).frobenius_norm() <= 1e-10);
      }
      const Vector rphi = (Matrix::identity(4) - pn).apply(sys.phi(n));
      const Vector rchi = (Matrix::identity(4) - pn.adjoint()).apply(sys.chi(n));
      REQUIRE(norm2(rphi) <= 1e-10 * norm2(sys.phi(n)));
      REQUIRE(norm2(rchi) <= 1e-10 * norm2(sys.chi(n)));
    }
  }
  SECTION("compatibility with the Hermitian eigenstate projector") {
    // Both projectors share the range span{phi_n}, so each product collapses
    // onto the right-hand factor's replacement: Pi Phi = Phi and Phi Pi = Pi.
    const auto sys = build_system(oracles::sx_igz(0.6));
    for (int n = 0; n < 2; ++n) {
      const Matrix pn = projector(sys, n);
      const Vector p = sys.phi(n);
      Matrix phin = outer(p, p);
      phin *= 1.0 / inner(p, p).real();
      CHECK((pn * phin - phin).frobenius_norm() <= 1e-10);
      CHECK((phin * pn - pn).frobenius_norm() <= 1e-10);
    }
  }
}

TEST_CASE("resolution of identity and spectral reconstruction") {
  Matrix d(2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  CHECK(resolution_defect(build_system(d)) <= 1e-15);
  CHECK(reconstruct_hamiltonian(build_system(d)).second <= 1e-15);

  const auto sys = build_system(oracles::sx_igz(0.6));
  CHECK(resolution_defect(sys) <= 1e-12);
  CHECK(reconstruct_hamiltonian(sys).second <= 1e-12);

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const auto s = build_system(oracles::random_ginibre(rng, n));
    REQUIRE(resolution_defect(s) <= 1e-9);
    REQUIRE(reconstruct_hamiltonian(s).second <= 1e-9);
  }
}

TEST_CASE("components expand ambient vectors exactly") {
  const auto sys = build_system(oracles::sx_igz(0.6));
  SECTION("an eigenvector has a single coefficient") {
    const StateVector s = components(sys, sys.phi(1));
    CHECK(std::abs(s.coeffs()[0]) <= 1e-13);
    CHECK(std::abs(s.coeffs()[1] - cplx(1.0)) <= 1e-13);
  }
  SECTION("round trip through the basis") {
    const Vector e0 = {1.0, 0.0};
    const StateVector s = components(sys, e0);
    const Vector back = s.ambient();
    CHECK(norm2(back - e0) <= 1e-12);
  }
  SECTION("equal superposition normalizes to (1,1)/sqrt(2)") {
    const Vector psi = sys.phi(0) + sys.phi(1);
    const StateVector s = normalize(components(sys, psi));
    CHECK(std::abs(s.coeffs()[0] - cplx(1.0 / std::sqrt(2.0))) <= 1e-12);
    CHECK(std::abs(s.coeffs()[1] - cplx(1.0 / std::sqrt(2.0))) <= 1e-12);
  }
  SECTION("zero state is rejected") {
    CHECK_THROWS_AS(components(sys, Vector{0.0, 0.0}), ZeroState);
  }
}

TEST_CASE("associated states define the physical norm") {
  SECTION("a basis coefficient picks out the dual vector") {
    const auto sys = build_system(oracles::sx_igz(0.6));
    const StateVector s = state_from_coeffs(sys, {0.0, 1.0});
    CHECK(norm2(associated_state(s) - sys.chi(1)) <= 1e-13);
  }
  SECTION("Hermitian systems are self-dual") {
    std::mt19937_64 rng(55);
    const auto sys = build_system(oracles::random_hermitian(rng, 4));
    const Vector amb = oracles::random_vector(rng, 4);
    const StateVector s = components(sys, amb);
    CHECK(norm2(associated_state(s) - amb) <= 1e-10 * norm2(amb));
  }
  SECTION("biorthogonal norm is one while the Hermitian norm is not") {
    const auto sys = build_system(oracles::sx_igz(0.6));
    const double r = 1.0 / std::sqrt(2.0);
    const StateVector s = state_from_coeffs(sys, {r, r});
    const Vector psi = s.ambient();
    const Vector tilde = associated_state(s);
    CHECK(std::abs(inner(tilde, psi) - cplx(1.0)) <= 1e-12);
    CHECK(std::abs(inner(psi, psi).real() - 1.0) > 0.05);
  }
}

TEST_CASE("biorthogonal inner product") {
  const auto sys = build_system(oracles::sx_igz(0.6));
  SECTION("normalized self-pairing is one") {
    const StateVector s = normalize(state_from_coeffs(sys, {1.0, cplx(0, 2)}));
    CHECK(std::abs(biortho_inner(s, s) - cplx(1.0)) <= 1e-12);
  }
  SECTION("distinct eigenstates pair to zero despite ambient overlap") {
    const StateVector a = state_from_coeffs(sys, {1.0, 0.0});
    const StateVector b = state_from_coeffs(sys, {0.0, 1.0});
    CHECK(std::abs(biortho_inner(a, b)) == 0.0);
    CHECK(std::abs(inner(sys.phi(0), sys.phi(1))) > 0.5);  // ambient overlap stays finite
  }
  SECTION("matches the ambient evaluation") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
      const StateVector a = state_from_coeffs(sys, oracles::random_vector(rng, 2));
      const StateVector b = state_from_coeffs(sys, oracles::random_vector(rng, 2));
      const cplx direct = biortho_inner(a, b);
      const cplx ambient = inner(associated_state(a), b.ambient());
      REQUIRE(std::abs(direct - ambient) <= 1e-12);
    }
  }
  SECTION("states on different systems are rejected") {
    const auto other = build_system(oracles::sx_igz(0.3));
    const StateVector a = state_from_coeffs(sys, {1.0, 0.0});
    const StateVector b = state_from_coeffs(other, {1.0, 0.0});
    CHECK_THROWS_AS(biortho_inner(a, b), SystemMismatch);
  }
}

TEST_CASE("Petermann factors") {
  std::mt19937_64 rng(63);
  SECTION("Hermitian systems sit at one") {
    const auto sys = build_system(oracles::random_hermitian(rng, 4));
    for (int n = 0; n < 4; ++n) CHECK(std::abs(petermann_factor(sys, n) - 1.0) <= 1e-10);
  }
  SECTION("two-level family gives 1/(1-gamma^2)") {
    const auto sys = build_system(oracles::sx_igz(0.6));
    CHECK(std::abs(petermann_factor(sys, 0) - 1.5625) <= 1e-12);
    CHECK(std::abs(petermann_factor(sys, 1) - 1.5625) <= 1e-12);
  }
  SECTION("diverges monotonically towards the exceptional point") {
    double last = 0;
    for (double gamma : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
      const double f = petermann_factor(build_system(oracles::sx_igz(gamma)), 0);
      REQUIRE(f > last);
      last = f;
    }
    CHECK(last > 50.0);
  }
}

TEST_CASE("overlap quotient identities") {
  SECTION("Hermitian input gives vanishing overlaps") {
    Matrix h(3);
    h(0, 0) = 1.0;
    h(1, 1) = 2.5;
    h(2, 2) = 4.0;
    h(0, 1) = h(1, 0) = 0.3;
    const auto sys = build_system(h);
    const auto r = nonorthogonality_check(sys, 0, 1);
    CHECK(std::abs(r.overlap) <= 1e-11);
    CHECK(std::abs(r.via_gamma) <= 1e-11);
    CHECK(std::abs(r.via_h) <= 1e-11);
  }
  SECTION("two-level family: Gamma route matches, H route is excluded") {
    const auto sys = build_system(oracles::sx_igz(0.6));
    // kappa_+ + kappa_- = 0, so the H denominator is legitimately singular.
    CHECK_THROWS_AS(nonorthogonality_check(sys, 0, 1), DenominatorSingular);
    // Product forms of both identities still close.
    const Matrix& k = sys.hamiltonian();
    const Matrix h = 0.5 * (k + k.adjoint());
    const Matrix g = cplx(0, 0.5) * (k - k.adjoint());
    const Vector p0 = sys.phi(0), p1 = sys.phi(1);
    const cplx overlap = inner(p0, p1);
    const cplx dm = std::conj(sys.kappa()[0]) - sys.kappa()[1];
    const cplx dp = std::conj(sys.kappa()[0]) + sys.kappa()[1];
    CHECK(std::abs(dm * overlap - cplx(0, 2) * inner(p0, g.apply(p1))) <= 1e-12);
    CHECK(std::abs(dp * overlap - 2.0 * inner(p0, h.apply(p1))) <= 1e-12);
  }
  SECTION("random systems close within 1e-9 on all pairs") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 10; ++trial) {
      const auto sys = build_system(oracles::random_ginibre(rng, 4));
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
          if (m == n) continue;
          const auto r = nonorthogonality_check(sys, m, n);
          REQUIRE(r.max_discrepancy <= 1e-9 * std::max(1.0, std::abs(r.overlap)));
        }
    }
  }
  SECTION("a broken split is rejected") {
    const auto sys = build_system(oracles::sx_igz(0.6));
    Matrix bad(2);
    bad(0, 1) = 1.0;  // not Hermitian
    CHECK_THROWS_AS(nonorthogonality_check(sys, bad, Matrix(2), 0, 1), SplitInvalid);
  }
}

TEST_CASE("gauge covariance") {
  std::mt19937_64 rng(121);
  const auto sys = build_system(oracles::random_ginibre(rng, 4));
  const Vector lambdas = {cplx(2.0, 0.5), cplx(0, -1.2), cplx(-0.7, 0.1), cplx(0.01, 3.0)};
  const auto rescaled = rescale_gauge(sys, lambdas);
  REQUIRE(rescaled.biortho_defect() <= 1e-10);

  SECTION("projectors are invariant") {
    for (int n = 0; n < 4; ++n)
      REQUIRE((projector(sys, n) - projector(rescaled, n)).max_abs() <= 1e-12);
  }
  SECTION("probabilities and expectations ride on the coefficients") {
    const Vector c = oracles::random_vector(rng, 4);
    const StateVector a = state_from_coeffs(sys, c);
    const StateVector b = state_from_coeffs(rescaled, c);
    for (int n = 0; n < 4; ++n)
      REQUIRE(std::abs(transition_prob(a, n) - transition_prob(b, n)) <= 1e-12);
    const Matrix f = oracles::random_hermitian(rng, 4);
    const cplx ea = expectation_pure(observable_from_coeffs(sys, f), a);
    const cplx eb = expectation_pure(observable_from_coeffs(rescaled, f), b);
    REQUIRE(std::abs(ea - eb) <= 1e-12);
  }
}

TEST_CASE("Hermitian limit reduces to the orthonormal eigensystem") {
  std::mt19937_64 rng(143);
  const auto sys = build_system(oracles::random_hermitian(rng, 5));
  for (int n = 0; n < 5; ++n) {
    CHECK(norm2(sys.phi(n) - sys.chi(n)) <= 1e-10);
    CHECK(std::abs(norm2(sys.phi(n)) - 1.0) <= 1e-10);
  }
  CHECK(sys.spectrum_real());
}

TEST_CASE("biorthonormality bound holds across random systems") {
  std::mt19937_64 rng(256);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 11);
    const auto sys = build_system(oracles::random_ginibre(rng, n));
    REQUIRE(sys.biortho_defect() <= 1e-9);
  }
}
