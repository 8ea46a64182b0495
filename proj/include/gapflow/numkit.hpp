#ifndef GAPFLOW_NUMKIT_HPP
#define GAPFLOW_NUMKIT_HPP

#include <utility>
#include <vector>

#include "gapflow/types.hpp"

namespace gapflow {

// Default multiplier for numerical rank: sigma_i > rank_tol_for(M) * sigma_max.
inline double default_rank_tol(Index rows, Index cols) {
  return 1e-10 * static_cast<double>(std::max(rows, cols));
}

struct HermitianSpectrum {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // unitary, columns match eigenvalues
};

// Eigendecomposition of a Hermitian matrix. Throws NonHermitian if
// ||M - M^*||_F > 1e-10 ||M||_F.
HermitianSpectrum hermitian_spectrum(const Matrix& M);

// Eigenvalues (with algebraic multiplicity) of a general square complex matrix.
Vector general_spectrum(const Matrix& M);

// Orthonormal basis of the column space; singular values below
// rank_tol * sigma_max count as zero.
Subspace orthonormal_range(const Matrix& M, double rank_tol);
Subspace orthonormal_range(const Matrix& M);

// Intersection of subspaces of a common ambient space, via the null space of
// the summed complement projectors.
Subspace subspace_intersect(const std::vector<Subspace>& spaces);

// ||P1 - P2||_2 for the orthogonal projectors onto the two subspaces.
double projector_distance(const Subspace& a, const Subspace& b);

// Largest / smallest singular value helpers.
double spectral_norm(const Matrix& M);
double smallest_singular_value(const Matrix& M);

// Hermitian inverse square root with eigenvalue floor; throws SingularWeight
// below the floor.
Matrix hermitian_inv_sqrt(const Matrix& M, double floor = 1e-12);

// Random matrix with i.i.d. standard complex Gaussian entries (test/driver
// utility; deterministic given the generator state).
Matrix random_gaussian_matrix(Index rows, Index cols, std::uint64_t seed);

}  // namespace gapflow

#endif
