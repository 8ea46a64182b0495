#ifndef GAPFLOW_TYPES_HPP
#define GAPFLOW_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gapflow {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorCode {
  NonHermitian,
  NoConvergence,
  ZeroMatrix,
  DimensionMismatch,
  ShapeMismatch,
  NotIrreducible,
  NotPrimitive,
  NotPrimitiveWithin,
  NotNormalized,
  TooLarge,
  KernelDimensionMismatch,
  InvalidWindow,
  WindowMismatch,
  SingularWeight,
  DegenerateSample,
  DegenerateEndpoints,
  DegenerateEigenvalues,
  RetriesExhausted,
  JordanFailure,
  DeltaNotFound,
  MembershipLost,
  NotPrimitiveAt,
  ParseError,
  ShapeError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Orthonormal-columns representation of a subspace of C^ambient.
struct Subspace {
  Matrix basis;  // ambient x dim, basis.adjoint()*basis == I

  Index ambient() const { return basis.rows(); }
  Index dim() const { return basis.cols(); }
};

// n-tuple of k x k Kraus matrices generating X -> sum_mu B_mu X B_mu^*.
struct KrausTuple {
  int n = 0;
  int k = 0;
  std::vector<Matrix> B;

  void validate() const;
};

inline bool entries_finite(const Matrix& m) {
  return m.allFinite();
}

}  // namespace gapflow

#endif
