#ifndef GAPFLOW_PATHLAB_HPP
#define GAPFLOW_PATHLAB_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "gapflow/transfer.hpp"
#include "gapflow/types.hpp"

namespace gapflow {

// C^infinity bump, compactly supported on (center-width, center+width),
// peak value 1 at t = center.
double smooth_bump(double t, double center, double width);

struct PlanarCurve {
  enum class Kind { Line, DetourArc, RandomBump };
  struct Bump {
    double center = 0.5;
    double width = 0.1;
    Complex amp;
  };
  Kind kind = Kind::Line;
  Complex start;
  Complex end;
  double detour_amp = 0.0;   // DetourArc: perpendicular displacement, relative
  std::vector<Bump> bumps;   // RandomBump

  Complex evaluate(double t) const;
};

struct SkMembership {
  bool member = false;
  double margin = 0.0;  // min over |lambda_i|, |lambda_i - lambda_j|, ratio gaps
};

SkMembership sk_membership(const Vector& lambda, double tol);

struct AvoidResult {
  PlanarCurve curve;
  double margin = 0.0;  // sampled min distance to F
};

// Endpoint-exact C^infinity curve from chi to eta avoiding the finite set F,
// with sup_t |xi(t) - chi| <= 2 |eta - chi|.
AvoidResult avoid_finite_path(Complex chi, Complex eta, const std::vector<Complex>& F);

struct SkPath {
  std::vector<PlanarCurve> coords;
  double min_margin = 0.0;  // over the verification grid
  int retries = 0;

  Vector evaluate(double t) const;
};

// Straight line in C^k, grid-verified against sk_membership; on failure,
// seeded smooth bumps are added and the verification repeats (<= 64 tries).
SkPath sk_path(const Vector& lambda, const Vector& mu, std::uint64_t seed);

struct ZMembership {
  bool member = false;
  std::optional<Matrix> witness;  // eigenvector columns, sorted, phase-fixed
  Vector lambda;                  // eigenvalues of B_1 in witness order
  double sk_margin = 0.0;
  double min_entry = 0.0;         // min |(P^{-1} B_2 P)_{ab}|
};

ZMembership z_membership(const KrausTuple& B, double tol);

// Closed-form diagonalizer of the Jordan-like matrix with perturbed diagonal
// and superdiagonal ones; P and its inverse come from the product formulas,
// no numerical inversion.
struct JordanDiagonalizer {
  Matrix P;
  Matrix P_inv;
  Matrix D;
};

JordanDiagonalizer explicit_diagonalizer(const std::vector<std::vector<Complex>>& blocks);
Matrix jordan_like_matrix(const std::vector<std::vector<Complex>>& blocks);

// Numerical Jordan data A_1 = R J R^{-1}; refuses on ambiguous clustering.
struct JordanStructure {
  Matrix R;
  std::vector<std::pair<Complex, int>> blocks;  // (eigenvalue, size), in column order
};

JordanStructure jordan_structure(const Matrix& A1);

struct PathSegment;

// Segment leaving an arbitrary tuple into Z_{n,k}: eigenvalues move by
// t^(2^(m+1)), B_2 picks up the rank-one kick between Jordan chains.
struct JordanApproachSeg {
  KrausTuple A;  // exact t = 0 endpoint
  JordanStructure jordan;
  Matrix R_inv;
  std::vector<int> exponents;  // N_(l,alpha) by global index
  Matrix kick;                 // R (sum |f_last><f_first|) R^{-1}
  double delta = 0.0;

  KrausTuple evaluate(double t) const;
};

// Segment between two Z-members: diagonal eigenvalue path, entrywise nonzero
// curves for B_2, linear tails, and a GL interpolation of the witnesses
// P(t) = P_A exp(t (i phi + W)) with W = log(e^{-i phi} P_A^{-1} P_E).
struct InsideZSeg {
  KrausTuple A;
  KrausTuple E;
  Matrix P_A;
  Matrix P_E;
  SkPath eigen_path;
  std::vector<PlanarCurve> entry_paths;  // row-major (alpha, beta)
  std::vector<Matrix> tail_A;            // conjugated B_i, i >= 3
  std::vector<Matrix> tail_E;
  Matrix W;
  double phi = 0.0;

  Matrix gl_interp(double t) const;
  KrausTuple evaluate(double t) const;
};

struct ReversedSeg {
  std::shared_ptr<const PathSegment> inner;
};

struct ConstantReparamSeg {
  std::shared_ptr<const PathSegment> inner;
  double a = 0.0;
  double b = 1.0;
};

struct PathSegment {
  std::variant<JordanApproachSeg, InsideZSeg, ReversedSeg, ConstantReparamSeg> node;

  KrausTuple evaluate(double t) const;
};

struct MatrixPath {
  int n = 0;
  int k = 0;
  struct Entry {
    PathSegment segment;
    double t0 = 0.0;
    double t1 = 1.0;
  };
  std::vector<Entry> entries;
  std::vector<double> breakpoints;  // interior times where C^1 may fail
  bool normalized = false;          // divide samples by sqrt(r)
  bool ramped = false;              // smooth local-time ramp at junctions

  KrausTuple evaluate(double t) const;
  KrausTuple evaluate_raw(double t) const;
};

JordanApproachSeg jordan_approach_segment(const KrausTuple& A);
JordanApproachSeg jordan_approach_segment(const KrausTuple& A, const JordanStructure& structure);

InsideZSeg inz_segment(const KrausTuple& A, const KrausTuple& E, std::uint64_t seed,
                       double tol = 1e-10);

// Three-piece composite through Z_{n,k}; interior samples have invertible B_1
// and monomial span reaching Mat_k by degree m >= 2k(k-1)+3.
MatrixPath connect(const KrausTuple& A, const KrausTuple& E, int m, std::uint64_t seed);

MatrixPath constant_path(const KrausTuple& B);

// Wraps the path with pointwise division by sqrt(r(t)); endpoints must be
// primitive.
MatrixPath normalize_path(const MatrixPath& path);

double spectral_radius(const KrausTuple& B);

}  // namespace gapflow

#endif
