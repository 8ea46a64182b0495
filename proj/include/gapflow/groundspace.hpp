#ifndef GAPFLOW_GROUNDSPACE_HPP
#define GAPFLOW_GROUNDSPACE_HPP

#include <cstdint>
#include <vector>

#include "gapflow/transfer.hpp"
#include "gapflow/types.hpp"

namespace gapflow {

// Default cap on materialized n^N x k^2 matrices (rows).
constexpr long long kDefaultDenseRowCap = 200000;

// Range data of Gamma_N. Column (i,j), in lexicographic order, holds
// Gamma_N(e_ij) over the product basis of (C^n)^{tensor N}; multi-indices are
// enumerated big-endian (site 0 varies slowest).
struct GroundSpace {
  int N = 0;
  int k = 0;
  Matrix gamma;       // n^N x k^2
  Subspace space;     // orthonormalized range
  bool injective = false;
  double sigma_min = 0.0;
};

long long int_pow(int base, int exp);

GroundSpace gamma_matrix(const KrausTuple& B, int N,
                         long long row_cap = kDefaultDenseRowCap);

// Coordinates of C in the column order of gamma (row-major vec of C).
Vector vec_rowmajor(const Matrix& C);

// <X,Y>_B = phi(X^* e Y) for a normalized primitive tuple.
Complex fcs_inner(const SpectralData& sd, const Matrix& X, const Matrix& Y);

// Max over random trials of |<Gamma X, Gamma Y> - <X,Y>_B|
// - E(N) sqrt(<X,X>_B <Y,Y>_B); nonpositive values certify the bound.
double overlap_bound_check(const KrausTuple& B, int N, int trials,
                           std::uint64_t seed);

struct IntersectionRow {
  int N = 0;
  double distance = 0.0;  // projector distance to Ran Gamma_N
  Index dim_intersection = 0;
  Index dim_gamma = 0;
};

struct IntersectionReport {
  std::vector<IntersectionRow> rows;
  int certified_m = 0;  // s^{k,B} + 1, valid for all N
  bool pass = false;    // every tested distance <= 1e-8
};

// Embeds an orthonormal basis of a subspace of (C^n)^{tensor m} at site
// offset x inside N sites (identity elsewhere).
Matrix embed_window_basis(const Matrix& U, int n, int m, int x, int N);

IntersectionReport intersection_check(const KrausTuple& B, int m, int N_max,
                                      long long row_cap = kDefaultDenseRowCap);

}  // namespace gapflow

#endif
