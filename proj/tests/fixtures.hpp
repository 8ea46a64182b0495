#ifndef GAPFLOW_TESTS_FIXTURES_HPP
#define GAPFLOW_TESTS_FIXTURES_HPP

#include <cmath>
#include <cstdint>

#include "gapflow/numkit.hpp"
#include "gapflow/transfer.hpp"
#include "gapflow/types.hpp"

namespace gapflow::testing {

// Spin-1 AKLT tuple: (sqrt(2/3) s+, -sqrt(1/3) sz, -sqrt(2/3) s-), n=3, k=2.
inline KrausTuple aklt() {
  KrausTuple t;
  t.n = 3;
  t.k = 2;
  Matrix sp = Matrix::Zero(2, 2), sz = Matrix::Zero(2, 2), sm = Matrix::Zero(2, 2);
  sp(0, 1) = 1.0;
  sm(1, 0) = 1.0;
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  t.B = {std::sqrt(2.0 / 3.0) * sp, -std::sqrt(1.0 / 3.0) * sz, -std::sqrt(2.0 / 3.0) * sm};
  return t;
}

// Product tuple (1, 0) with bond dimension 1.
inline KrausTuple product_tuple() {
  KrausTuple t;
  t.n = 2;
  t.k = 1;
  t.B = {Matrix::Constant(1, 1, 1.0), Matrix::Zero(1, 1)};
  return t;
}

// Seeded random primitive tuple, normalized to spectral radius 1; optional
// invertibility constraint on B_1.
inline KrausTuple random_primitive_tuple(int n, int k, std::uint64_t seed,
                                         bool require_invertible_B1 = false) {
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    KrausTuple t;
    t.n = n;
    t.k = k;
    for (int mu = 0; mu < n; ++mu)
      t.B.push_back(random_gaussian_matrix(k, k, seed * 1000003 + attempt * 101 + mu));
    if (require_invertible_B1 && smallest_singular_value(t.B[0]) < 0.1) continue;
    if (!is_primitive(t)) continue;
    return normalize(t);
  }
  throw Error(ErrorCode::RetriesExhausted, "no primitive tuple for this seed");
}

}  // namespace gapflow::testing

#endif
