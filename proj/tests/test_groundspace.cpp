#include <doctest.h>

#include "fixtures.hpp"
#include "gapflow/groundspace.hpp"
#include "oracles.hpp"

using namespace gapflow;
using testing::aklt;
using testing::product_tuple;

TEST_CASE("gamma matrix matches the brute-force definition") {
  for (int N : {1, 2, 3}) {
    KrausTuple B = aklt();
    GroundSpace gs = gamma_matrix(B, N);
    Matrix naive = testing::naive_gamma(B, N);
    CHECK((gs.gamma - naive).norm() <= 1e-12 * std::max(1.0, naive.norm()));
  }
  KrausTuple R = testing::random_primitive_tuple(2, 2, 31);
  GroundSpace gs = gamma_matrix(R, 4);
  CHECK((gs.gamma - testing::naive_gamma(R, 4)).norm() <= 1e-12 * gs.gamma.norm());
}

TEST_CASE("product tuple gamma is a single product-state column") {
  GroundSpace gs = gamma_matrix(product_tuple(), 3);
  CHECK(gs.gamma.rows() == 8);
  CHECK(gs.gamma.cols() == 1);
  CHECK(std::abs(gs.gamma(0, 0) - Complex(1.0, 0.0)) <= 1e-15);
  CHECK(gs.gamma.bottomRows(7).norm() == 0.0);
}

TEST_CASE("AKLT injectivity thresholds") {
  GroundSpace g1 = gamma_matrix(aklt(), 1);
  CHECK(g1.space.dim() == 3);
  CHECK_FALSE(g1.injective);
  GroundSpace g2 = gamma_matrix(aklt(), 2);
  CHECK(g2.space.dim() == 4);
  CHECK(g2.injective);
  // N >= s implies injective; E(2) = 4/9 < 1 is consistent with the sandwich
  GroundSpace g3 = gamma_matrix(aklt(), 3);
  CHECK(g3.injective);
}

TEST_CASE("gamma is linear") {
  KrausTuple B = aklt();
  GroundSpace gs = gamma_matrix(B, 3);
  Matrix X = random_gaussian_matrix(2, 2, 41);
  Matrix Y = random_gaussian_matrix(2, 2, 42);
  Vector lhs = gs.gamma * vec_rowmajor(Matrix(X + Y));
  Vector rhs = gs.gamma * vec_rowmajor(X) + gs.gamma * vec_rowmajor(Y);
  CHECK((lhs - rhs).norm() <= 1e-12);
}

TEST_CASE("fcs inner product values and positivity") {
  SpectralData sd = spectral_data(aklt());
  Matrix I2 = Matrix::Identity(2, 2);
  CHECK(std::abs(fcs_inner(sd, I2, I2) - Complex(1.0, 0.0)) <= 1e-12);

  Matrix e01 = Matrix::Zero(2, 2), e10 = Matrix::Zero(2, 2);
  e01(0, 1) = 1.0;
  e10(1, 0) = 1.0;
  CHECK(std::abs(fcs_inner(sd, e01, e10)) <= 1e-12);

  Matrix sz = Matrix::Zero(2, 2);
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  CHECK(std::abs(fcs_inner(sd, sz, sz) - Complex(1.0, 0.0)) <= 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    Matrix X = random_gaussian_matrix(2, 2, 300 + trial);
    CHECK(fcs_inner(sd, X, X).real() > 0.0);
    CHECK(std::abs(fcs_inner(sd, X, X).imag()) <= 1e-12 * fcs_inner(sd, X, X).real());
  }
}

TEST_CASE("norm sandwich from the overlap bound") {
  KrausTuple B = aklt();
  SpectralData sd = spectral_data(B);
  for (int N : {2, 3, 4}) {
    const double E_N = 4.0 * std::pow(3.0, -N);
    GroundSpace gs = gamma_matrix(B, N);
    for (int trial = 0; trial < 20; ++trial) {
      Matrix X = random_gaussian_matrix(2, 2, 500 + 97 * N + trial);
      const double xx = fcs_inner(sd, X, X).real();
      const double nrm2 = (gs.gamma * vec_rowmajor(X)).squaredNorm();
      CHECK(nrm2 >= (1.0 - E_N) * xx - 1e-9);
      CHECK(nrm2 <= (1.0 + E_N) * xx + 1e-9);
    }
  }
}

TEST_CASE("overlap bound check") {
  CHECK(overlap_bound_check(aklt(), 4, 50, 2024) <= 1e-9);
  CHECK(overlap_bound_check(product_tuple(), 5, 20, 7) <= 1e-12);

  // zero pair: both sides vanish identically
  SpectralData sd = spectral_data(aklt());
  GroundSpace gs = gamma_matrix(aklt(), 3);
  Matrix zero = Matrix::Zero(2, 2);
  CHECK((gs.gamma * vec_rowmajor(zero)).norm() == 0.0);
  CHECK(std::abs(fcs_inner(sd, zero, zero)) == 0.0);
}

TEST_CASE("intersection property for AKLT and the product tuple") {
  IntersectionReport rep = intersection_check(aklt(), 2, 6);
  CHECK(rep.certified_m == 3);
  CHECK(rep.pass);
  REQUIRE(rep.rows.size() == 5);
  for (const auto& row : rep.rows) {
    CHECK(row.distance <= 1e-8);
    CHECK(row.dim_intersection == 4);
    CHECK(row.dim_gamma == 4);
  }

  // Property (I,m) persists for larger m
  IntersectionReport rep3 = intersection_check(aklt(), 3, 5);
  CHECK(rep3.pass);

  IntersectionReport prod = intersection_check(product_tuple(), 1, 5);
  CHECK(prod.pass);
  for (const auto& row : prod.rows) CHECK(row.distance <= 1e-12);
}

TEST_CASE("intersection via explicit shifted embeddings equals Ran Gamma_3") {
  // the (I,2) identity at N = 3, assembled by hand
  KrausTuple B = aklt();
  GroundSpace g2 = gamma_matrix(B, 2);
  Subspace left{embed_window_basis(g2.space.basis, 3, 2, 0, 3)};
  Subspace right{embed_window_basis(g2.space.basis, 3, 2, 1, 3)};
  Subspace meet = subspace_intersect({left, right});
  GroundSpace g3 = gamma_matrix(B, 3);
  CHECK(meet.dim() == 4);
  CHECK(projector_distance(meet, g3.space) <= 1e-8);
}

TEST_CASE("gamma matrix row cap") {
  CHECK_THROWS_AS(gamma_matrix(aklt(), 12), Error);  // 3^12 > default cap
}
