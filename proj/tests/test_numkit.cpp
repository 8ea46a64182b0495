#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "gapflow/groundspace.hpp"
#include "gapflow/numkit.hpp"

using namespace gapflow;

TEST_CASE("hermitian spectrum identity and diagonal") {
  Matrix I2 = Matrix::Identity(2, 2);
  auto es = hermitian_spectrum(I2);
  CHECK(es.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(es.eigenvalues(1) == doctest::Approx(1.0));

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = -1.0;
  es = hermitian_spectrum(D);
  CHECK(es.eigenvalues(0) == doctest::Approx(-1.0));
  CHECK(es.eigenvalues(1) == doctest::Approx(3.0));
  CHECK(std::abs(es.eigenvectors.col(0)(1)) == doctest::Approx(1.0));
}

TEST_CASE("hermitian spectrum reconstructs a random 8x8") {
  Matrix G = random_gaussian_matrix(8, 8, 7);
  Matrix M = (G + G.adjoint()) / 2.0;
  auto es = hermitian_spectrum(M);
  Matrix rebuilt =
      es.eigenvectors * es.eigenvalues.cast<Complex>().asDiagonal() * es.eigenvectors.adjoint();
  CHECK((M - rebuilt).norm() <= 1e-9 * M.norm());
  CHECK((es.eigenvectors.adjoint() * es.eigenvectors - Matrix::Identity(8, 8)).norm() <= 1e-9);
  // trace identity
  CHECK(es.eigenvalues.sum() == doctest::Approx(M.trace().real()).epsilon(1e-9));
}

TEST_CASE("hermitian spectrum rejects non-hermitian input") {
  Matrix M = Matrix::Zero(2, 2);
  M(0, 1) = 1.0;
  CHECK_THROWS_WITH_AS(hermitian_spectrum(M) /**/, doctest::Contains("NonHermitian"), Error);
}

TEST_CASE("general spectrum on nilpotent, diagonal, companion") {
  Matrix J = Matrix::Zero(2, 2);
  J(0, 1) = 1.0;
  Vector ev = general_spectrum(J);
  CHECK(std::abs(ev(0)) <= 1e-10);
  CHECK(std::abs(ev(1)) <= 1e-10);

  Matrix D = Matrix::Zero(4, 4);
  D(0, 0) = 1.0;
  D(1, 1) = D(2, 2) = D(3, 3) = -1.0 / 3.0;
  ev = general_spectrum(D);
  std::vector<double> got;
  for (int i = 0; i < 4; ++i) got.push_back(ev(i).real());
  std::sort(got.begin(), got.end());
  CHECK(got[0] == doctest::Approx(-1.0 / 3.0));
  CHECK(got[3] == doctest::Approx(1.0));

  // companion matrix of z^2 - z - 1: golden-ratio roots
  Matrix C = Matrix::Zero(2, 2);
  C(0, 1) = 1.0;
  C(1, 0) = 1.0;
  C(1, 1) = 1.0;
  ev = general_spectrum(C);
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<double> roots = {ev(0).real(), ev(1).real()};
  std::sort(roots.begin(), roots.end());
  CHECK(std::abs(roots[0] - (1.0 - phi)) <= 1e-10);
  CHECK(std::abs(roots[1] - phi) <= 1e-10);
}

TEST_CASE("general spectrum matches the characteristic polynomial on probes") {
  Matrix M = random_gaussian_matrix(5, 5, 99);
  Vector ev = general_spectrum(M);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  for (int probe = 0; probe < 10; ++probe) {
    const Complex z(gauss(rng), gauss(rng));
    Complex from_roots = 1.0;
    for (Index i = 0; i < ev.size(); ++i) from_roots *= (z - ev(i));
    const Complex from_det = (z * Matrix::Identity(5, 5) - M).determinant();
    CHECK(std::abs(from_roots - from_det) <= 1e-8 * std::max(1.0, std::abs(from_det)));
  }
}

TEST_CASE("orthonormal range basics") {
  Matrix M(3, 2);
  M.setZero();
  M(0, 0) = 1.0;
  M(0, 1) = 1.0;  // duplicate unit columns
  Subspace s = orthonormal_range(M);
  CHECK(s.dim() == 1);

  Subspace full = orthonormal_range(Matrix::Identity(3, 3));
  CHECK(full.dim() == 3);

  CHECK_THROWS_AS(orthonormal_range(Matrix::Zero(3, 3)), Error);
}

TEST_CASE("orthonormal range is invariant under column mixing") {
  Matrix M = random_gaussian_matrix(6, 3, 17);
  Matrix P = random_gaussian_matrix(3, 3, 18);
  while (smallest_singular_value(P) < 1e-3) P = random_gaussian_matrix(3, 3, 19);
  Subspace a = orthonormal_range(M);
  Subspace b = orthonormal_range(Matrix(M * P));
  CHECK(projector_distance(a, b) <= 1e-9);
}

TEST_CASE("subspace intersection in C^2") {
  Matrix x = Matrix::Zero(2, 1);
  x(0, 0) = 1.0;
  Matrix y = Matrix::Zero(2, 1);
  y(1, 0) = 1.0;
  Subspace sx{x}, sy{y};

  Subspace same = subspace_intersect({sx, sx});
  CHECK(same.dim() == 1);
  CHECK(projector_distance(same, sx) <= 1e-10);

  Subspace zero = subspace_intersect({sx, sy});
  CHECK(zero.dim() == 0);
}

TEST_CASE("subspace intersection is commutative, associative, idempotent") {
  Matrix A = random_gaussian_matrix(6, 4, 5);
  Matrix B = random_gaussian_matrix(6, 4, 6);
  Matrix C = random_gaussian_matrix(6, 5, 7);
  Subspace sa = orthonormal_range(A);
  Subspace sb = orthonormal_range(B);
  Subspace sc = orthonormal_range(C);
  Subspace ab = subspace_intersect({sa, sb});
  Subspace ba = subspace_intersect({sb, sa});
  CHECK(projector_distance(ab, ba) <= 1e-9);
  Subspace abc = subspace_intersect({sa, sb, sc});
  Subspace ab_c = subspace_intersect({ab, sc});
  Subspace a_bc = subspace_intersect({sa, subspace_intersect({sb, sc})});
  CHECK(projector_distance(abc, ab_c) <= 1e-9);
  CHECK(projector_distance(abc, a_bc) <= 1e-9);
  if (ab.dim() > 0) {
    Subspace again = subspace_intersect({ab, sa, sb});
    CHECK(projector_distance(ab, again) <= 1e-9);
  }
  CHECK_THROWS_AS(subspace_intersect({sa, orthonormal_range(Matrix::Identity(5, 5))}), Error);
}

TEST_CASE("hermitian inverse square root refuses singular weights") {
  Matrix singular = Matrix::Zero(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(hermitian_inv_sqrt(singular), Error);
  Matrix I2 = Matrix::Identity(2, 2);
  CHECK((hermitian_inv_sqrt(Matrix(4.0 * I2)) - 0.5 * I2).norm() <= 1e-12);
}

TEST_CASE("AKLT Gamma_2 range is 4-dimensional in C^9") {
  GroundSpace gs = gamma_matrix(testing::aklt(), 2);
  CHECK(gs.space.ambient() == 9);
  CHECK(gs.space.dim() == 4);
}
