#include <catch2/catch_amalgamated.hpp>

#include "biortho/perturbation.hpp"
#include "support/oracles.hpp"

using namespace biortho;

namespace {

const Matrix kSigmaZ(2, {1.0, 0.0, 0.0, -1.0});
const Matrix kSigmaX(2, {0.0, 1.0, 1.0, 0.0});

}  // namespace

TEST_CASE("first-order corrections") {
  SECTION("perturbing by the Hamiltonian itself shifts eigenvalues only") {
    const auto sys = build_system(oracles::sx_igz(0.6));
    for (int n = 0; n < 2; ++n) {
      const auto fo = first_order(sys, sys.hamiltonian(), n);
      CHECK(std::abs(fo.mu1 - sys.kappa()[n]) <= 1e-12);
      CHECK(norm2(fo.psi1_coeffs) <= 1e-12);
    }
  }
  SECTION("symmetric splitting has no linear response") {
    const auto sys = build_system(kSigmaX);
    for (int n = 0; n < 2; ++n)
      CHECK(std::abs(first_order(sys, kSigmaZ, n).mu1) <= 1e-13);
  }
  SECTION("matches the numerical eigenvalue derivative") {
    // Central-difference oracle on the exact diagonalization at eps = 1e-5.
    const auto sys = build_system(oracles::sx_igz(0.6));
    const auto fo = first_order(sys, kSigmaZ, 0);
    const double eps = 1e-5;
    auto eig_near = [&](double e) {
      Matrix k = sys.hamiltonian();
      k += cplx(e) * kSigmaZ;
      const auto spec = eig_general(k);
      cplx best = spec.eigenvalues[0];
      for (const auto& z : spec.eigenvalues)
        if (std::abs(z - sys.kappa()[0]) < std::abs(best - sys.kappa()[0])) best = z;
      return best;
    };
    const cplx derivative = (eig_near(eps) - eig_near(-eps)) / (2.0 * eps);
    CHECK(std::abs(fo.mu1 - derivative) <= 1e-6);
    // Closed form for this family: d/de of sqrt(1 + (e - i gamma)^2) at 0.
    CHECK(std::abs(fo.mu1 - cplx(0, -0.75)) <= 1e-10);
  }
  SECTION("normalization zeroes the diagonal coefficient exactly") {
    std::mt19937_64 rng(3);
    const auto sys = build_system(oracles::random_ginibre(rng, 5));
    const Matrix kp = oracles::random_ginibre(rng, 5);
    for (int n = 0; n < 5; ++n) {
      const auto fo = first_order(sys, kp, n);
      CHECK(fo.psi1_coeffs[n] == cplx{});
    }
  }
  SECTION("first-order eigenvector residual closes") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      const auto sys = build_system(oracles::random_ginibre(rng, 4));
      const Matrix kp = oracles::random_ginibre(rng, 4);
      for (int n = 0; n < 4; ++n) {
        const auto fo = first_order(sys, kp, n);
        // (kappa_n - K) psi1 + mu1 phi_n - K' phi_n = 0
        Vector psi1(4, cplx{});
        for (int m = 0; m < 4; ++m) psi1 = psi1 + fo.psi1_coeffs[m] * sys.phi(m);
        Vector resid = kp.apply(sys.phi(n));
        const Vector kpsi = sys.hamiltonian().apply(psi1);
        for (int i = 0; i < 4; ++i)
          resid[i] = sys.kappa()[n] * psi1[i] - kpsi[i] + fo.mu1 * sys.phi(n)[i] - resid[i];
        REQUIRE(norm2(resid) <= 1e-9 * kp.frobenius_norm());
      }
    }
  }
  SECTION("Hermitian case reduces to the textbook formulas") {
    std::mt19937_64 rng(7);
    const Matrix k = oracles::random_hermitian(rng, 4);
    const Matrix kp = oracles::random_hermitian(rng, 4);
    const auto sys = build_system(k);
    for (int n = 0; n < 4; ++n) {
      const auto fo = first_order(sys, kp, n);
      // Textbook oracle with the orthonormal eigenbasis.
      const Vector phin = sys.phi(n);
      const cplx mu1 = inner(phin, kp.apply(phin)) / inner(phin, phin);
      CHECK(std::abs(fo.mu1 - mu1) <= 1e-10);
      for (int m = 0; m < 4; ++m) {
        if (m == n) continue;
        const Vector phim = sys.phi(m);
        const cplx cm = inner(phim, kp.apply(phin)) /
                        (inner(phim, phim) * (sys.kappa()[n] - sys.kappa()[m]));
        CHECK(std::abs(fo.psi1_coeffs[m] - cm) <= 1e-10);
      }
    }
  }
  SECTION("small gaps are refused") {
    Matrix k(3);
    k(0, 0) = 1.0;
    k(1, 1) = 1.0 + 1e-9;
    k(2, 2) = 3.0;
    Tolerances loose;
    loose.deg_tol = 1e-14;  // let the system build despite the tiny gap
    const auto built = build_system(k, loose);
    // Same data viewed under the default thresholds.
    const BiorthogonalSystem strict(built.hamiltonian(), built.kappa(), built.frame(),
                                    built.gauge(), built.biortho_defect(), built.spectrum_real(),
                                    built.min_pre_gauge_overlap(), Tolerances{});
    std::mt19937_64 rng(17);
    CHECK_THROWS_AS(first_order(strict, oracles::random_ginibre(rng, 3), 1), DegenerateGap);
  }
}

TEST_CASE("displacement operator") {
  SECTION("identity perturbation gives the identity operator") {
    const auto sys = build_system(oracles::sx_igz(0.6));
    const auto disp = displacement_operator(sys, sys);
    CHECK((disp.v - Matrix::identity(2)).max_abs() <= 1e-12);
    CHECK(disp.nonunitarity <= 1e-12);
  }
  SECTION("Hermitian perturbations displace almost unitarily") {
    std::mt19937_64 rng(11);
    const Matrix k = oracles::random_hermitian(rng, 3);
    const Matrix kp = oracles::random_hermitian(rng, 3);
    const auto sys = build_system(k);
    auto nonunit = [&](double eps) {
      Matrix ke = k;
      ke += cplx(eps) * kp;
      return displacement_operator(sys, build_system(ke)).nonunitarity;
    };
    const double coarse = nonunit(1e-2), fine = nonunit(5e-3);
    CHECK(coarse <= 1e-2);
    // Quadratic in the step: halving the step cuts the defect about fourfold.
    CHECK(fine <= 0.35 * coarse);
  }
  SECTION("biorthogonal norms ride through while the Dirac norm does not") {
    const auto sys = build_system(oracles::sx_igz(0.6));
    Matrix ke = sys.hamiltonian();
    ke += cplx(1e-2) * kSigmaZ;
    const auto sys_eps = build_system(ke);
    const auto disp = displacement_operator(sys, sys_eps);
    for (int n = 0; n < 2; ++n) {
      const Vector moved = disp.v.apply(sys.phi(n));
      CHECK(std::abs(inner(sys.chi(n), moved) - cplx(1.0)) <= 1e-10);
    }
    CHECK(disp.nonunitarity > 1e-4);
  }
  SECTION("ambiguous eigenvalue matching is reported") {
    Matrix a(2);
    a(0, 0) = 0.0;
    a(1, 1) = 1.0;
    Matrix b(2);
    b(0, 0) = 0.5;
    b(1, 1) = 0.5001;
    CHECK_THROWS_AS(displacement_operator(build_system(a), build_system(b)),
                    MatchingAmbiguous);
  }
}

TEST_CASE("order-of-accuracy probe") {
  SECTION("symmetric two-level splitting is exactly quadratic") {
    const double order = richardson_validate(kSigmaX, kSigmaZ, 0, 1e-2);
    REQUIRE(std::isfinite(order));
    CHECK(std::abs(order - 2.0) <= 0.05);
  }
  SECTION("random nondegenerate systems land near order two") {
    std::mt19937_64 rng(13);
    int used = 0;
    while (used < 12) {
      const Matrix k = oracles::random_ginibre(rng, 6);
      const Matrix kp = oracles::random_ginibre(rng, 6);
      BiorthogonalSystem sys = build_system(k);
      const auto fo = first_order(sys, kp, 2);
      if (fo.epsilon_validity < 1e-3) continue;  // keep the probe inside the safe range
      const double order = richardson_validate(k, kp, 2, 1e-3);
      if (std::isnan(order)) continue;
      REQUIRE(order >= 1.5);
      REQUIRE(order <= 2.5);
      ++used;
    }
  }
  SECTION("zero perturbation reports the exact sentinel") {
    CHECK(std::isnan(richardson_validate(kSigmaX, Matrix(2), 0, 1e-3)));
  }
}
