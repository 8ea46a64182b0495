#ifndef GAPFLOW_TRANSFER_HPP
#define GAPFLOW_TRANSFER_HPP

#include <optional>
#include <vector>

#include "gapflow/numkit.hpp"
#include "gapflow/types.hpp"

namespace gapflow {

// Spectral data of the transfer operator X -> sum_mu B_mu X B_mu^*.
struct SpectralData {
  double r = 0.0;          // spectral radius
  Vector eigenvalues;      // spectrum of the k^2 x k^2 matricization
  Matrix e;                // right fixed point, PSD, trace(rho*e) = 1
  Matrix rho;              // adjoint fixed point, PSD, trace 1
  double a = 0.0;          // ||e^{-1}||, +inf when singular
  double c = 0.0;          // ||rho^{-1}||, +inf when singular
  double lambda2 = 0.0;    // largest modulus strictly below the Perron root
  bool primitive = false;
  std::optional<int> s;    // Wielandt index, present when primitive
  Matrix matricization;    // k^2 x k^2 matrix of the channel (column-major vec)
};

// Tabulated decay/gap constants of a spectral-radius-one tuple. The operator
// norm is the one induced by the Hilbert-Schmidt inner product on Mat_k,
// i.e. the largest singular value of the matricization on the complement of
// the fixed block.
struct GapConstants {
  std::vector<double> E;   // E(N) for N = 1..E.size()
  double E_sup = 0.0;      // sup over all N (tail controlled by the envelope)
  double F = 0.0;
  int L = 0;
  int lbar = 0;
  double envelope_C = 0.0;      // E(N) <= envelope_C * envelope_rate^N
  double envelope_rate = 0.0;
};

struct PathDecay {
  double c_unif = 0.0;
  double lambda_unif = 0.0;
};

Matrix apply_channel(const KrausTuple& B, const Matrix& X);
Matrix apply_adjoint_channel(const KrausTuple& B, const Matrix& X);

// Matricization with vec column-major: vec(B X B^*) = (conj(B) kron B) vec(X).
Matrix matricize_channel(const KrausTuple& B);

Matrix unvec(const Vector& v, Index k);
Vector vec(const Matrix& M);

// Full spectral data. With strict = true, throws NotIrreducible unless both
// fixed points are strictly positive definite.
SpectralData spectral_data(const KrausTuple& B, bool strict = false);

// Least m with K_m(B) = Mat_k, by iterating monomial spans; throws
// NotPrimitiveWithin(m_max) when the span never fills up.
int wielandt_index(const KrausTuple& B, int m_max);
std::optional<int> try_wielandt_index(const KrausTuple& B, int m_max);

bool is_primitive(const KrausTuple& B);

// B / sqrt(r_B); requires primitivity.
KrausTuple normalize(const KrausTuple& B);

// r^{-1/2} h^{-1/2} B_mu h^{1/2} with h the Perron eigenvector; the result is
// unital. Requires irreducibility (strictly positive h).
KrausTuple unitalize(const KrausTuple& B);

// ||(E^B)^N (1 - P_fix)|| in the norm above; needs r = 1.
double transfer_complement_norm(const SpectralData& sd, int N);

GapConstants gap_constants(const KrausTuple& B);
GapConstants gap_constants(const KrausTuple& B, const SpectralData& sd);

PathDecay uniform_path_decay(const std::vector<SpectralData>& samples);

}  // namespace gapflow

#endif
