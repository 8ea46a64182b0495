#include "gapflow/numkit.hpp"

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace gapflow {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::NotPrimitive: return "NotPrimitive";
    case ErrorCode::NotPrimitiveWithin: return "NotPrimitiveWithin";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::KernelDimensionMismatch: return "KernelDimensionMismatch";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::SingularWeight: return "SingularWeight";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::DegenerateEndpoints: return "DegenerateEndpoints";
    case ErrorCode::DegenerateEigenvalues: return "DegenerateEigenvalues";
    case ErrorCode::RetriesExhausted: return "RetriesExhausted";
    case ErrorCode::JordanFailure: return "JordanFailure";
    case ErrorCode::DeltaNotFound: return "DeltaNotFound";
    case ErrorCode::MembershipLost: return "MembershipLost";
    case ErrorCode::NotPrimitiveAt: return "NotPrimitiveAt";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

void KrausTuple::validate() const {
  if (n < 2 || k < 1) throw Error(ErrorCode::ShapeError, "need n >= 2 and k >= 1");
  if (static_cast<int>(B.size()) != n)
    throw Error(ErrorCode::ShapeError, "tuple must hold exactly n matrices");
  double total = 0.0;
  for (const auto& m : B) {
    if (m.rows() != k || m.cols() != k)
      throw Error(ErrorCode::ShapeError, "every Kraus matrix must be k x k");
    if (!entries_finite(m)) throw Error(ErrorCode::ShapeError, "non-finite entry");
    total += m.norm();
  }
  if (total == 0.0) throw Error(ErrorCode::ShapeError, "all-zero tuple");
}

HermitianSpectrum hermitian_spectrum(const Matrix& M) {
  if (M.rows() != M.cols()) throw Error(ErrorCode::ShapeMismatch, "matrix not square");
  const double scale = M.norm();
  if ((M - M.adjoint()).norm() > 1e-10 * std::max(scale, 1e-300))
    throw Error(ErrorCode::NonHermitian, "symmetry tolerance violated");
  Eigen::SelfAdjointEigenSolver<Matrix> solver((M + M.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "self-adjoint eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Vector general_spectrum(const Matrix& M) {
  if (M.rows() != M.cols()) throw Error(ErrorCode::ShapeMismatch, "matrix not square");
  Eigen::ComplexEigenSolver<Matrix> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "eigenvalue iteration did not converge");
  return solver.eigenvalues();
}

Subspace orthonormal_range(const Matrix& M, double rank_tol) {
  if (rank_tol <= 0) throw Error(ErrorCode::InvalidArgument, "rank_tol must be positive");
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  if (smax < 1e-300) throw Error(ErrorCode::ZeroMatrix, "all singular values below floor");
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rank_tol * smax) ++rank;
  return Subspace{svd.matrixU().leftCols(rank)};
}

Subspace orthonormal_range(const Matrix& M) {
  return orthonormal_range(M, default_rank_tol(M.rows(), M.cols()));
}

Subspace subspace_intersect(const std::vector<Subspace>& spaces) {
  if (spaces.empty()) throw Error(ErrorCode::InvalidArgument, "no subspaces given");
  const Index d = spaces.front().ambient();
  for (const auto& s : spaces)
    if (s.ambient() != d) throw Error(ErrorCode::DimensionMismatch, "ambient dimensions differ");

  // S = sum_i (1 - P_i) is Hermitian PSD; the intersection is its null space.
  Matrix S = Matrix::Zero(d, d);
  for (const auto& s : spaces) {
    S += Matrix::Identity(d, d) - s.basis * s.basis.adjoint();
  }
  HermitianSpectrum es = hermitian_spectrum(S);
  const double tol = 1e-9;
  Index dim = 0;
  while (dim < d && es.eigenvalues(dim) < tol) ++dim;
  return Subspace{es.eigenvectors.leftCols(dim)};
}

double projector_distance(const Subspace& a, const Subspace& b) {
  if (a.ambient() != b.ambient())
    throw Error(ErrorCode::DimensionMismatch, "ambient dimensions differ");
  // ||P - Q|| = max(||(1-Q)P||, ||(1-P)Q||), computed on the thin bases.
  double s1 = 0.0, s2 = 0.0;
  if (a.dim() > 0) {
    Matrix residual = a.basis - b.basis * (b.basis.adjoint() * a.basis);
    s1 = spectral_norm(residual);
  }
  if (b.dim() > 0) {
    Matrix residual = b.basis - a.basis * (a.basis.adjoint() * b.basis);
    s2 = spectral_norm(residual);
  }
  return std::max(s1, s2);
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

double smallest_singular_value(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

Matrix hermitian_inv_sqrt(const Matrix& M, double floor) {
  HermitianSpectrum es = hermitian_spectrum(M);
  if (es.eigenvalues.minCoeff() < floor)
    throw Error(ErrorCode::SingularWeight, "eigenvalue below inverse-sqrt floor");
  RealVector inv_sqrt = es.eigenvalues.array().sqrt().inverse();
  return es.eigenvectors * inv_sqrt.asDiagonal() * es.eigenvectors.adjoint();
}

Matrix random_gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = Complex(gauss(rng), gauss(rng));
  return M;
}

}  // namespace gapflow
