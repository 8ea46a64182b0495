#ifndef GAPFLOW_HAMILTONIAN_HPP
#define GAPFLOW_HAMILTONIAN_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "gapflow/groundspace.hpp"
#include "gapflow/transfer.hpp"
#include "gapflow/types.hpp"

namespace gapflow {

constexpr long long kDefaultDenseCap = 4096;        // full diagonalization cap
constexpr long long kDefaultMatrixFreeCap = 1 << 20;

// Convex mix of translated projector interactions; each component acts on m
// consecutive sites with Q = 1 - U U^* for the stored orthonormal basis U.
struct ChainInteraction {
  struct Component {
    int m = 0;
    Matrix U;  // n^m x rank, orthonormal columns spanning the local kernel
    double weight = 1.0;
    bool injective = false;  // rank == k^2 when built from a tuple
  };
  int n = 0;
  std::vector<Component> components;

  int max_range() const;
};

ChainInteraction build_interaction(const KrausTuple& B, int m,
                                   bool accept_non_injective = false);
ChainInteraction mixed_interaction(const KrausTuple& B, int m, int m2, double t,
                                   bool accept_non_injective = false);

struct ChainHamiltonian {
  int N = 0;
  int n = 0;
  long long dim = 0;
  ChainInteraction interaction;
  bool dense = false;
  Matrix H;  // materialized when dense

  // y = H x, available in both representations.
  Vector apply(const Vector& x) const;
  Matrix apply(const Matrix& X) const;
  // sum of term weights; upper bound on ||H|| since all terms are projectors.
  double norm_bound() const;
};

ChainHamiltonian assemble(const ChainInteraction& interaction, int N,
                          long long dense_cap = kDefaultDenseCap,
                          long long matrixfree_cap = kDefaultMatrixFreeCap);

ChainHamiltonian mixed_length_hamiltonian(const KrausTuple& B, int m, int m2,
                                          double t, int N,
                                          long long dense_cap = kDefaultDenseCap,
                                          bool accept_non_injective = false);

struct KernelGap {
  Subspace kernel;
  double gap = 0.0;
  double gap_residual = 0.0;  // Ritz residual of the gap eigenpair (iterative path)
  RealVector lowest;          // lowest expected+1 eigenvalues, ascending
};

struct KernelGapOptions {
  double tol_ker = 1e-8;
  double residual_tol = 1e-9;
  int max_iterations = 500;
  std::uint64_t seed = 12345;
};

// Lowest expected_kernel_dim + 1 eigenpairs; dense solve when materialized,
// otherwise block LOBPCG with block size expected_kernel_dim + 4. Throws
// KernelDimensionMismatch when the spectrum does not split at tol_ker.
KernelGap kernel_and_gap(const ChainHamiltonian& H, int expected_kernel_dim,
                         const KernelGapOptions& opts = {});

struct GapInequalityReport {
  double margin = 0.0;       // min eig of H - prefactor (1 - G_N)
  double gamma_lm = 0.0;     // open-chain gap on [0, l-1]
  double prefactor = 0.0;    // gamma_lm / (4(l+2))
  int lbar = 0;
  bool window_valid = false; // max{lbar, m} < l < N
};

// PSD certificate gamma_{l,m}/(4(l+2)) (1 - G_N) <= H_{[0,N-1]}. The bound is
// only backed by theory inside the window; outside it the computation refuses
// unless enforce_window is false, in which case the measured margin is
// reported as numerical evidence.
GapInequalityReport certify_gap_inequality(const KrausTuple& B, int m, int l,
                                           int N, bool enforce_window = true,
                                           long long dense_cap = kDefaultDenseCap);

// Projector distance between the numerical kernel and Ran Gamma_N.
double kernel_groundspace_distance(const KrausTuple& B, const KernelGap& kg,
                                   int N);

}  // namespace gapflow

#endif
