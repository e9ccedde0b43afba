#include <catch2/catch_amalgamated.hpp>

#include "biortho/eig.hpp"
#include "support/oracles.hpp"

using namespace biortho;

TEST_CASE("diagonal matrix reproduces its entries, sorted") {
  Matrix d(3);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  d(2, 2) = 3.0;
  const RawSpectrum s = eig_general(d);
  REQUIRE(s.eigenvalues == std::vector<cplx>{3.0, 2.0, 1.0});
  // Right vectors are the standard basis, permuted by the sort.
  for (int k = 0; k < 3; ++k) {
    const Vector v = s.right_vectors.column(k);
    CHECK(std::abs(std::abs(v[2 - k]) - 1.0) <= 1e-14);
  }
}

TEST_CASE("two-level family has eigenvalues +-sqrt(1-gamma^2)") {
  // Cross-checked by the characteristic polynomial: tr = 0, det = gamma^2 - 1,
  // so lambda^2 = 1 - gamma^2.
  for (double gamma : {0.2, 0.6, 0.9}) {
    const RawSpectrum s = eig_general(oracles::sx_igz(gamma));
    const double root = std::sqrt(1.0 - gamma * gamma);
    REQUIRE(std::abs(s.eigenvalues[0] - cplx(root)) <= 1e-12);
    REQUIRE(std::abs(s.eigenvalues[1] + cplx(root)) <= 1e-12);
  }
}

TEST_CASE("tied real parts sort by descending imaginary part") {
  Matrix d(2);
  d(0, 0) = cplx(0, 1);
  d(1, 1) = cplx(0, -1);
  const RawSpectrum s = eig_general(d);
  REQUIRE(s.eigenvalues[0] == cplx(0, 1));
  REQUIRE(s.eigenvalues[1] == cplx(0, -1));
}

TEST_CASE("residuals meet the tolerance on random matrices") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 11);
    const Matrix m = oracles::random_ginibre(rng, n);
    const RawSpectrum s = eig_general(m);
    for (int k = 0; k < n; ++k) {
      REQUIRE(s.residuals[k] <= 1e-10 * m.frobenius_norm());
      REQUIRE(std::abs(norm2(s.right_vectors.column(k)) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("adjoint spectrum is the conjugate multiset") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const Matrix m = oracles::random_ginibre(rng, n);
    const RawSpectrum a = eig_general(m);
    const RawSpectrum b = eig_general(m.adjoint());
    // Under the shared sort order, conjugating reverses nothing structural:
    // match greedily instead.
    std::vector<bool> used(n, false);
    for (const auto& lam : a.eigenvalues) {
      double best = 1e300;
      int arg = -1;
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double d = std::abs(lam - std::conj(b.eigenvalues[j]));
        if (d < best) {
          best = d;
          arg = j;
        }
      }
      used[arg] = true;
      REQUIRE(best <= 1e-8 * m.frobenius_norm());
    }
  }
}

TEST_CASE("pairing permutations") {
  SECTION("Hermitian spectrum pairs identically") {
    std::mt19937_64 rng(3);
    const Matrix h = oracles::random_hermitian(rng, 5);
    const auto perm = pair_left_right(eig_general(h), eig_general(h.adjoint()));
    for (int i = 0; i < 5; ++i) REQUIRE(perm[i] == i);
  }
  SECTION("pure imaginary pair swaps under the sort order") {
    Matrix d(2);
    d(0, 0) = cplx(0, 1);
    d(1, 1) = cplx(0, -1);
    const auto perm = pair_left_right(eig_general(d), eig_general(d.adjoint()));
    REQUIRE(perm == std::vector<int>{1, 0});
  }
  SECTION("real nonsymmetric spectrum pairs identically") {
    const Matrix k = oracles::sx_igz(0.6);
    const auto perm = pair_left_right(eig_general(k), eig_general(k.adjoint()));
    REQUIRE(perm == std::vector<int>{0, 1});
  }
  SECTION("degenerate eigenvalues are ambiguous") {
    Matrix d(2);
    d(0, 0) = d(1, 1) = 1.0;
    CHECK_THROWS_AS(pair_left_right(eig_general(d), eig_general(d.adjoint())),
                    PairingAmbiguous);
  }
}

TEST_CASE("left_from_right duality") {
  SECTION("identity and unitary bases are self-dual") {
    const Matrix id = Matrix::identity(4);
    CHECK((left_from_right(id) - id).max_abs() <= 1e-14);

    std::mt19937_64 rng(5);
    // Eigenvectors of a Hermitian matrix assemble into a unitary.
    const RawSpectrum s = eig_general(oracles::random_hermitian(rng, 4));
    const Matrix v = left_from_right(s.right_vectors);
    CHECK((v - s.right_vectors).max_abs() <= 1e-10);
  }
  SECTION("two-level family duals match the closed form") {
    const RawSpectrum s = eig_general(oracles::sx_igz(0.6));
    const Matrix v = left_from_right(s.right_vectors);
    CHECK(oracles::direction_mismatch(v.column(0), oracles::closed_form_chi(0.6, +1)) <= 1e-12);
    CHECK(oracles::direction_mismatch(v.column(1), oracles::closed_form_chi(0.6, -1)) <= 1e-12);
  }
  SECTION("residual stays at machine level even near the conditioning floor") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 3 + static_cast<int>(rng() % 6);
      const Matrix u = oracles::random_ginibre(rng, n);
      const Matrix v = left_from_right(u);
      REQUIRE((v.adjoint() * u - Matrix::identity(n)).frobenius_norm() <= 1e-11);
    }
  }
  SECTION("singular basis is rejected") {
    Matrix u(2);
    u(0, 0) = 1.0;
    u(0, 1) = 1.0;  // two identical columns
    u(1, 0) = 0.5;
    u(1, 1) = 0.5;
    CHECK_THROWS_AS(left_from_right(u), SingularBasis);
  }
}

TEST_CASE("gram matrices") {
  SECTION("orthonormal basis gives the identity") {
    std::vector<Vector> vs = {{1.0, 0.0}, {0.0, 1.0}};
    CHECK((gram(vs) - Matrix::identity(2)).max_abs() == 0.0);
  }
  SECTION("single unit vector gives [[1]]") {
    const Matrix g = gram({Vector{cplx(0, 1)}});
    CHECK(std::abs(g(0, 0) - cplx(1.0)) <= 1e-15);
  }
  SECTION("two-level family overlap has modulus gamma") {
    // The quotient identity 2i <phi_m|Gamma|phi_n> / (conj(k_m) - k_n) supplies
    // the oracle value for the off-diagonal entry.
    const double gamma = 0.6;
    const RawSpectrum s = eig_general(oracles::sx_igz(gamma));
    const Vector a = s.right_vectors.column(0), b = s.right_vectors.column(1);
    const Matrix g = gram({a, b});
    CHECK(std::abs(std::abs(g(0, 1)) - gamma) <= 1e-12);

    Matrix gamma_op(2);
    gamma_op(0, 0) = gamma;
    gamma_op(1, 1) = -gamma;  // Gamma = gamma sigma_z for this family
    const cplx quotient = cplx(0, 2) * inner(a, gamma_op.apply(b)) /
                          (std::conj(s.eigenvalues[0]) - s.eigenvalues[1]);
    CHECK(std::abs(g(0, 1) - quotient) <= 1e-12);
  }
  SECTION("gram output is exactly Hermitian and numerically PSD") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 5);
      std::vector<Vector> vs;
      for (int i = 0; i < n; ++i) vs.push_back(oracles::random_vector(rng, n + 2));
      const Matrix g = gram(vs);
      REQUIRE(hermiticity_defect(g) == 0.0);
      for (const auto& ev : eig_general(g).eigenvalues) REQUIRE(ev.real() >= -1e-12);
    }
  }
}

TEST_CASE("singular values match known cases") {
  std::mt19937_64 rng(59);
  SECTION("unitary matrix has all singular values one") {
    const RawSpectrum s = eig_general(oracles::random_hermitian(rng, 5));
    for (double sv : singular_values(s.right_vectors)) CHECK(std::abs(sv - 1.0) <= 1e-10);
  }
  SECTION("diagonal matrix gives absolute values") {
    Matrix d(3);
    d(0, 0) = cplx(0, -2);
    d(1, 1) = 0.5;
    d(2, 2) = 1.0;
    const auto sv = singular_values(d);
    CHECK(std::abs(sv[0] - 2.0) <= 1e-14);
    CHECK(std::abs(sv[1] - 1.0) <= 1e-14);
    CHECK(std::abs(sv[2] - 0.5) <= 1e-14);
  }
  SECTION("product of singular values equals |det|") {
    const Matrix m = oracles::random_ginibre(rng, 6);
    double prod = 1;
    for (double sv : singular_values(m)) prod *= sv;
    CHECK(std::abs(prod - std::abs(Lu(m).determinant())) <= 1e-10 * prod);
  }
}

TEST_CASE("eigensolver rejects bad input") {
  Matrix nan_mat(2);
  nan_mat(1, 1) = cplx(0, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(eig_general(nan_mat), NonFiniteInput);
  CHECK_THROWS_AS(eig_general(Matrix::identity(2), -1.0), std::invalid_argument);
}
