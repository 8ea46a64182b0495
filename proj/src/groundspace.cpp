#include "gapflow/groundspace.hpp"

#include <cmath>
#include <limits>

namespace gapflow {

long long int_pow(int base, int exp) {
  long long out = 1;
  for (int i = 0; i < exp; ++i) {
    out *= base;
    if (out > (1LL << 62) / base) throw Error(ErrorCode::TooLarge, "dimension overflow");
  }
  return out;
}

GroundSpace gamma_matrix(const KrausTuple& B, int N, long long row_cap) {
  B.validate();
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
  const long long rows = int_pow(B.n, N);
  if (rows > row_cap)
    throw Error(ErrorCode::TooLarge, "n^N = " + std::to_string(rows) + " exceeds the dense cap");

  const Index k = B.k;
  GroundSpace gs;
  gs.N = N;
  gs.k = B.k;
  gs.gamma = Matrix(rows, k * k);

  // Odometer over multi-indices with cached prefix products
  // prefix[d] = B_{mu_1} ... B_{mu_d}; site 0 is the most significant digit.
  std::vector<int> digits(N, 0);
  std::vector<Matrix> prefix(static_cast<size_t>(N) + 1);
  prefix[0] = Matrix::Identity(k, k);
  for (int d = 0; d < N; ++d) prefix[d + 1] = prefix[d] * B.B[0];
  long long row = 0;
  while (true) {
    const Matrix& prod = prefix[N];
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < k; ++j) gs.gamma(row, i * k + j) = std::conj(prod(i, j));
    ++row;
    int d = N - 1;
    while (d >= 0 && digits[d] == B.n - 1) --d;
    if (d < 0) break;
    ++digits[d];
    for (int e = d; e < N; ++e) {
      if (e > d) digits[e] = 0;
      prefix[e + 1] = prefix[e] * B.B[digits[e]];
    }
  }

  Eigen::JacobiSVD<Matrix> svd(gs.gamma, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  gs.sigma_min = sv(sv.size() - 1);
  const double tol = default_rank_tol(gs.gamma.rows(), gs.gamma.cols());
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * smax) ++rank;
  gs.space = Subspace{svd.matrixU().leftCols(rank)};
  gs.injective = (rank == k * k);
  return gs;
}

Vector vec_rowmajor(const Matrix& C) {
  Vector v(C.rows() * C.cols());
  for (Index i = 0; i < C.rows(); ++i)
    for (Index j = 0; j < C.cols(); ++j) v(i * C.cols() + j) = C(i, j);
  return v;
}

Complex fcs_inner(const SpectralData& sd, const Matrix& X, const Matrix& Y) {
  if (!sd.primitive) throw Error(ErrorCode::NotPrimitive, "inner product needs a primitive tuple");
  if (std::abs(sd.r - 1.0) > 1e-8)
    throw Error(ErrorCode::NotNormalized, "inner product needs spectral radius 1");
  return (sd.rho * X.adjoint() * sd.e * Y).trace();
}

double overlap_bound_check(const KrausTuple& B, int N, int trials, std::uint64_t seed) {
  SpectralData sd = spectral_data(B);
  const double E_N = static_cast<double>(B.k) * sd.a * sd.c * transfer_complement_norm(sd, N);
  GroundSpace gs = gamma_matrix(B, N);

  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    Matrix X = random_gaussian_matrix(B.k, B.k, seed + 2 * trial);
    Matrix Y = random_gaussian_matrix(B.k, B.k, seed + 2 * trial + 1);
    Vector gx = gs.gamma * vec_rowmajor(X);
    Vector gy = gs.gamma * vec_rowmajor(Y);
    const Complex lhs = gx.dot(gy);  // conjugates the first argument
    const Complex inner = fcs_inner(sd, X, Y);
    const double xx = fcs_inner(sd, X, X).real();
    const double yy = fcs_inner(sd, Y, Y).real();
    const double violation = std::abs(lhs - inner) - E_N * std::sqrt(xx * yy);
    worst = std::max(worst, violation);
  }
  return worst;
}

Matrix embed_window_basis(const Matrix& U, int n, int m, int x, int N) {
  const long long left = int_pow(n, x);
  const long long mid = int_pow(n, m);
  const long long right = int_pow(n, N - m - x);
  if (U.rows() != mid) throw Error(ErrorCode::DimensionMismatch, "window basis has wrong height");
  const Index d = U.cols();
  Matrix out = Matrix::Zero(left * mid * right, left * d * right);
  for (long long p = 0; p < left; ++p)
    for (Index c = 0; c < d; ++c)
      for (long long r = 0; r < mid; ++r) {
        const Complex v = U(r, c);
        if (v == Complex(0, 0)) continue;
        for (long long q = 0; q < right; ++q)
          out((p * mid + r) * right + q, (p * d + c) * right + q) = v;
      }
  return out;
}

IntersectionReport intersection_check(const KrausTuple& B, int m, int N_max, long long row_cap) {
  if (m < 1 || N_max < m) throw Error(ErrorCode::InvalidArgument, "need 1 <= m <= N_max");
  IntersectionReport report;
  report.certified_m = wielandt_index(B, B.k * B.k * B.k * B.k) + 1;

  GroundSpace base = gamma_matrix(B, m, row_cap);
  report.pass = true;
  for (int N = m; N <= N_max; ++N) {
    if (int_pow(B.n, N) > row_cap)
      throw Error(ErrorCode::TooLarge, "intersection window exceeds the dense cap");
    std::vector<Subspace> embedded;
    for (int x = 0; x <= N - m; ++x)
      embedded.push_back(Subspace{embed_window_basis(base.space.basis, B.n, m, x, N)});
    Subspace meet = subspace_intersect(embedded);
    GroundSpace target = gamma_matrix(B, N, row_cap);
    IntersectionRow row;
    row.N = N;
    row.distance = projector_distance(meet, target.space);
    row.dim_intersection = meet.dim();
    row.dim_gamma = target.space.dim();
    if (row.distance > 1e-8) report.pass = false;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace gapflow
