#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "gapflow/transfer.hpp"

using namespace gapflow;
using testing::aklt;
using testing::product_tuple;

namespace {

KrausTuple identity_channel() {
  KrausTuple t;
  t.n = 2;
  t.k = 2;
  t.B = {Matrix::Identity(2, 2), Matrix::Zero(2, 2)};
  return t;
}

}  // namespace

TEST_CASE("apply_channel basics") {
  KrausTuple B = aklt();
  Matrix I2 = Matrix::Identity(2, 2);
  CHECK((apply_channel(B, I2) - I2).norm() <= 1e-12);  // unital fixture
  CHECK(apply_channel(B, Matrix::Zero(2, 2)).norm() == 0.0);

  KrausTuple single;
  single.n = 2;
  single.k = 2;
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 2.0;
  single.B = {D, Matrix::Zero(2, 2)};
  Matrix out = apply_channel(single, I2);
  CHECK(out(0, 0).real() == doctest::Approx(1.0));
  CHECK(out(1, 1).real() == doctest::Approx(4.0));

  CHECK_THROWS_AS(apply_channel(B, Matrix::Identity(3, 3)), Error);
}

TEST_CASE("apply_channel preserves positivity") {
  KrausTuple B = aklt();
  for (int trial = 0; trial < 20; ++trial) {
    Matrix G = random_gaussian_matrix(2, 2, 100 + trial);
    Matrix X = G * G.adjoint();
    Matrix Y = apply_channel(B, X);
    auto es = hermitian_spectrum(Y);
    CHECK(es.eigenvalues.minCoeff() >= -1e-10 * X.norm());
  }
}

TEST_CASE("AKLT spectral data") {
  SpectralData sd = spectral_data(aklt());
  CHECK(sd.r == doctest::Approx(1.0).epsilon(1e-10));
  std::vector<double> mods;
  for (Index i = 0; i < sd.eigenvalues.size(); ++i) mods.push_back(sd.eigenvalues(i).real());
  std::sort(mods.begin(), mods.end());
  CHECK(std::abs(mods[0] + 1.0 / 3.0) <= 1e-10);
  CHECK(std::abs(mods[1] + 1.0 / 3.0) <= 1e-10);
  CHECK(std::abs(mods[2] + 1.0 / 3.0) <= 1e-10);
  CHECK(std::abs(mods[3] - 1.0) <= 1e-10);
  CHECK((sd.e - Matrix::Identity(2, 2)).norm() <= 1e-9);
  CHECK((sd.rho - 0.5 * Matrix::Identity(2, 2)).norm() <= 1e-9);
  CHECK(sd.a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sd.c == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(sd.lambda2 == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(sd.primitive);
  REQUIRE(sd.s.has_value());
  CHECK(*sd.s == 2);
  // normalization phi(e) = 1
  CHECK((sd.rho * sd.e).trace().real() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scalar and identity-channel spectral data") {
  KrausTuple scalar = product_tuple();
  SpectralData sd = spectral_data(scalar);
  CHECK(sd.r == doctest::Approx(1.0));
  CHECK(sd.e(0, 0).real() == doctest::Approx(1.0));
  CHECK(sd.rho(0, 0).real() == doctest::Approx(1.0));
  CHECK(sd.primitive);

  SpectralData idc = spectral_data(identity_channel());
  CHECK(idc.r == doctest::Approx(1.0));
  CHECK_FALSE(idc.primitive);
  for (Index i = 0; i < 4; ++i)
    CHECK(std::abs(idc.eigenvalues(i) - Complex(1.0, 0.0)) <= 1e-9);
  CHECK_THROWS_AS(spectral_data(identity_channel(), /*strict=*/true), Error);
}

TEST_CASE("phi invariance under the channel") {
  for (std::uint64_t seed : {3u, 4u}) {
    KrausTuple B = testing::random_primitive_tuple(2, 2, seed);
    SpectralData sd = spectral_data(B);
    for (int trial = 0; trial < 20; ++trial) {
      Matrix X = random_gaussian_matrix(2, 2, 1000 + 31 * seed + trial);
      const Complex lhs = (sd.rho * apply_channel(B, X)).trace();
      const Complex rhs = sd.r * (sd.rho * X).trace();
      CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("wielandt index") {
  CHECK(wielandt_index(aklt(), 16) == 2);
  CHECK(wielandt_index(product_tuple(), 1) == 1);

  // invertible B_1 bound: s <= k^2
  KrausTuple t;
  t.n = 2;
  t.k = 2;
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 0.5;
  Matrix ones = Matrix::Zero(2, 2);
  ones(0, 1) = 1.0;
  ones(1, 0) = 1.0;  // off-diagonal all-ones
  t.B = {D, ones};
  CHECK(wielandt_index(t, 4) <= 4);

  CHECK_THROWS_AS(wielandt_index(identity_channel(), 16), Error);

  // K_1 of the AKLT tuple is the 3-dimensional traceless span
  {
    KrausTuple B = aklt();
    Matrix span(4, 3);
    for (int mu = 0; mu < 3; ++mu) span.col(mu) = vec(B.B[mu]);
    CHECK(orthonormal_range(span).dim() == 3);
  }
}

TEST_CASE("wielandt index is similarity invariant") {
  KrausTuple B = aklt();
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    Matrix g = random_gaussian_matrix(2, 2, seed);
    while (smallest_singular_value(g) < 0.2) g = random_gaussian_matrix(2, 2, ++seed * 7);
    Matrix gi = g.inverse();
    KrausTuple conj = B;
    for (auto& M : conj.B) M = g * M * gi;
    CHECK(wielandt_index(conj, 16) == wielandt_index(B, 16));
  }
}

TEST_CASE("normalize") {
  KrausTuple B = aklt();
  KrausTuple n1 = normalize(B);
  double diff = 0.0;
  for (int i = 0; i < 3; ++i) diff = std::max(diff, (n1.B[i] - B.B[i]).norm());
  CHECK(diff <= 1e-12);

  KrausTuple doubled = B;
  for (auto& M : doubled.B) M *= 2.0;
  KrausTuple n2 = normalize(doubled);
  diff = 0.0;
  for (int i = 0; i < 3; ++i) diff = std::max(diff, (n2.B[i] - B.B[i]).norm());
  CHECK(diff <= 1e-12);

  KrausTuple scalar;
  scalar.n = 2;
  scalar.k = 1;
  scalar.B = {Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, 4.0)};
  KrausTuple n3 = normalize(scalar);
  CHECK(n3.B[0](0, 0).real() == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(n3.B[1](0, 0).real() == doctest::Approx(0.8).epsilon(1e-12));

  // idempotent
  KrausTuple n4 = normalize(n3);
  CHECK((n4.B[0] - n3.B[0]).norm() <= 1e-10);

  CHECK_THROWS_AS(normalize(identity_channel()), Error);
}

TEST_CASE("normalize commutes with unitary conjugation of the tuple") {
  KrausTuple B = testing::random_primitive_tuple(3, 2, 77);
  Matrix G = random_gaussian_matrix(2, 2, 7);
  Eigen::JacobiSVD<Matrix> svd(G, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix U = svd.matrixU() * svd.matrixV().adjoint();
  KrausTuple conj = B;
  for (auto& M : conj.B) M = U * M * U.adjoint();
  Vector ev1 = general_spectrum(matricize_channel(normalize(B)));
  Vector ev2 = general_spectrum(matricize_channel(normalize(conj)));
  std::vector<Complex> b(ev2.data(), ev2.data() + ev2.size());
  for (Index i = 0; i < ev1.size(); ++i) {
    size_t best = 0;
    for (size_t j = 1; j < b.size(); ++j)
      if (std::abs(ev1(i) - b[j]) < std::abs(ev1(i) - b[best])) best = j;
    CHECK(std::abs(ev1(i) - b[best]) <= 1e-9);
    b.erase(b.begin() + best);
  }
}

TEST_CASE("unitalize") {
  KrausTuple B = aklt();
  KrausTuple u = unitalize(B);
  double diff = 0.0;
  for (int i = 0; i < 3; ++i) diff = std::max(diff, (u.B[i] - B.B[i]).norm());
  CHECK(diff <= 1e-9);  // already unital

  KrausTuple scalar;
  scalar.n = 2;
  scalar.k = 1;
  scalar.B = {Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, 4.0)};
  KrausTuple us = unitalize(scalar);
  CHECK(us.B[0](0, 0).real() == doctest::Approx(0.6));
  CHECK(us.B[1](0, 0).real() == doctest::Approx(0.8));

  KrausTuple R = testing::random_primitive_tuple(2, 2, 5);
  KrausTuple ur = unitalize(R);
  CHECK((apply_channel(ur, Matrix::Identity(2, 2)) - Matrix::Identity(2, 2)).norm() <= 1e-9);
}

TEST_CASE("AKLT gap constants against the closed form") {
  KrausTuple B = aklt();
  GapConstants gc = gap_constants(B);
  REQUIRE(gc.E.size() >= 10);
  for (int N = 1; N <= 10; ++N)
    CHECK(std::abs(gc.E[N - 1] - 4.0 * std::pow(3.0, -N)) <= 1e-10);
  CHECK(gc.E_sup == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
  CHECK(gc.F == doctest::Approx(32.0 / 3.0).epsilon(1e-10));
  CHECK(gc.L == 2);
  CHECK(gc.lbar == 6);  // least l with sup_{N>=l} sqrt(N+1)(3EF+2)(EF)+E < 1

  // E nonincreasing beyond L, exact geometric decay on this fixture
  for (size_t i = gc.L; i + 1 < gc.E.size(); ++i) {
    CHECK(gc.E[i + 1] <= gc.E[i] + 1e-12);
    CHECK(gc.E[i + 1] <= (1.0 / 3.0) * gc.E[i] * (1.0 + 1e-6));
  }
}

TEST_CASE("product tuple gap constants collapse") {
  GapConstants gc = gap_constants(product_tuple());
  for (double e : gc.E) CHECK(e <= 1e-14);
  CHECK(gc.L == 1);
  CHECK(gc.lbar == 1);
}

TEST_CASE("gap constants refuse unnormalized input") {
  KrausTuple doubled = aklt();
  for (auto& M : doubled.B) M *= 2.0;
  CHECK_THROWS_AS(gap_constants(doubled), Error);
}

TEST_CASE("uniform path decay") {
  SpectralData sd = spectral_data(aklt());
  PathDecay pd = uniform_path_decay({sd, sd, sd});
  CHECK(pd.lambda_unif == doctest::Approx(1.0 / 3.0 + 1e-6).epsilon(1e-12));
  CHECK(pd.c_unif > 0.0);

  PathDecay single = uniform_path_decay({sd});
  CHECK(single.lambda_unif == doctest::Approx(pd.lambda_unif));

  SpectralData low = sd, high = sd;
  low.lambda2 = 0.2;
  high.lambda2 = 0.5;
  PathDecay two = uniform_path_decay({low, high});
  CHECK(two.lambda_unif == doctest::Approx(0.5 + 1e-6));

  SpectralData bad = sd;
  bad.lambda2 = 1.0;
  CHECK_THROWS_AS(uniform_path_decay({bad}), Error);
}
