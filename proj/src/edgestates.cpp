#include "gapflow/edgestates.hpp"

#include <cmath>

#include "gapflow/groundspace.hpp"

namespace gapflow {

namespace {

void require_normalized(const SpectralData& sd) {
  if (std::abs(sd.r - 1.0) > 1e-8)
    throw Error(ErrorCode::NotNormalized, "boundary maps need spectral radius 1");
}

void check_window(const LocalObservable& obs, int n) {
  const long long dim = int_pow(n, obs.width());
  if (obs.A.rows() != dim || obs.A.cols() != dim)
    throw Error(ErrorCode::WindowMismatch, "observable size does not match the window");
}

}  // namespace

std::vector<Matrix> site_products(const KrausTuple& B, int w) {
  std::vector<Matrix> prods;
  prods.emplace_back(Matrix::Identity(B.k, B.k));
  for (int depth = 0; depth < w; ++depth) {
    std::vector<Matrix> next;
    next.reserve(prods.size() * B.n);
    for (const auto& p : prods)
      for (int mu = 0; mu < B.n; ++mu) next.push_back(p * B.B[mu]);
    prods = std::move(next);
  }
  return prods;
}

Matrix boundary_map(const KrausTuple& B, const SpectralData& sd, Side side,
                    const LocalObservable& obs) {
  require_normalized(sd);
  check_window(obs, B.n);
  if (side == Side::Right && obs.b != 0)
    throw Error(ErrorCode::WindowMismatch, "right window must be anchored at 0");
  if (side == Side::Left && obs.a != -1)
    throw Error(ErrorCode::WindowMismatch, "left window must end at -1");

  const int w = obs.width();
  std::vector<Matrix> W = site_products(B, w);
  const long long dim = static_cast<long long>(W.size());
  Matrix out = Matrix::Zero(B.k, B.k);
  for (long long mu = 0; mu < dim; ++mu)
    for (long long nu = 0; nu < dim; ++nu) {
      const Complex amp = obs.A(mu, nu);
      if (amp == Complex(0, 0)) continue;
      if (side == Side::Right)
        out += amp * W[mu] * sd.e * W[nu].adjoint();
      else
        out += amp * W[nu].adjoint() * sd.rho * W[mu];
    }
  return out;
}

Complex edge_state_eval(const KrausTuple& B, const SpectralData& sd, const EdgeStateSpec& spec,
                        const LocalObservable& obs) {
  const Matrix& weight = spec.side == Side::Right ? sd.e : sd.rho;
  Matrix w_mhalf = hermitian_inv_sqrt(weight);  // SingularWeight below the floor
  Matrix mapped = boundary_map(B, sd, spec.side, obs);
  return (spec.omega * w_mhalf * mapped * w_mhalf).trace();
}

Complex bulk_state_eval(const KrausTuple& B, const SpectralData& sd,
                        const LocalObservable& obs) {
  require_normalized(sd);
  check_window(obs, B.n);
  const int w = obs.width();
  std::vector<Matrix> W = site_products(B, w);
  const long long dim = static_cast<long long>(W.size());
  Complex out = 0.0;
  for (long long mu = 0; mu < dim; ++mu)
    for (long long nu = 0; nu < dim; ++nu) {
      const Complex amp = obs.A(mu, nu);
      if (amp == Complex(0, 0)) continue;
      out += amp * (sd.rho * W[mu] * sd.e * W[nu].adjoint()).trace();
    }
  return out;
}

double frustration_check(const KrausTuple& B, int m, const std::optional<EdgeStateSpec>& spec,
                         int shift_range) {
  SpectralData sd = spectral_data(B);
  GroundSpace gs = gamma_matrix(B, m);
  const long long M = int_pow(B.n, m);
  Matrix Q = Matrix::Identity(M, M) - gs.space.basis * gs.space.basis.adjoint();

  double worst = 0.0;
  if (!spec.has_value()) {
    LocalObservable obs{0, m - 1, Q};
    worst = std::abs(bulk_state_eval(B, sd, obs));
    // translation invariance holds by construction; probe a padded window too
    if (shift_range > 0) {
      const long long pad = int_pow(B.n, 1);
      Matrix padded = Matrix::Zero(pad * M, pad * M);
      for (long long p = 0; p < pad; ++p)
        padded.block(p * M, p * M, M, M) = Q;
      LocalObservable wide{0, m, padded};
      worst = std::max(worst, std::abs(bulk_state_eval(B, sd, wide)));
    }
    return worst;
  }

  for (int shift = 0; shift <= shift_range; ++shift) {
    const long long pad = int_pow(B.n, shift);
    Matrix A = Matrix::Zero(pad * M, pad * M);
    for (long long p = 0; p < pad; ++p) A.block(p * M, p * M, M, M) = Q;
    if (spec->side == Side::Right) {
      // interaction on sites [shift, shift+m-1], identity on [0, shift)
      LocalObservable obs{0, shift + m - 1, A};
      worst = std::max(worst, std::abs(edge_state_eval(B, sd, *spec, obs)));
    } else {
      // interaction on sites [-b, -b+m-1] with b = m + shift
      Matrix Al = Matrix::Zero(M * pad, M * pad);
      for (long long q = 0; q < pad; ++q)
        for (long long r = 0; r < M; ++r)
          for (long long c = 0; c < M; ++c) {
            const Complex v = Q(r, c);
            if (v == Complex(0, 0)) continue;
            Al(r * pad + q, c * pad + q) = v;
          }
      LocalObservable obs{-(m + shift), -1, Al};
      worst = std::max(worst, std::abs(edge_state_eval(B, sd, *spec, obs)));
    }
  }
  return worst;
}

DecayTable boundary_limit_check(const KrausTuple& B, const Matrix& C, const LocalObservable& obs,
                                const std::vector<int>& N_list) {
  SpectralData sd = spectral_data(B);
  require_normalized(sd);
  const int a = obs.width();
  if (obs.b != 0) throw Error(ErrorCode::WindowMismatch, "window must be anchored at 0");
  check_window(obs, B.n);

  Matrix RA = boundary_map(B, sd, Side::Right, obs);
  const Complex limit = (sd.rho * C.adjoint() * RA * C).trace();

  DecayTable table;
  table.lambda2 = sd.lambda2;
  for (int N : N_list) {
    if (N < a) throw Error(ErrorCode::WindowMismatch, "N below the observable window");
    GroundSpace gs = gamma_matrix(B, N);
    Vector v = gs.gamma * vec_rowmajor(C);
    const long long lead = int_pow(B.n, a);
    const long long rest = int_pow(B.n, N - a);
    // (A kron I) v, using big-endian layout: reshape as (lead, rest) row-major
    Vector w(v.size());
    Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Wm(
        w.data(), lead, rest);
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Vm(
        v.data(), lead, rest);
    Wm = obs.A * Vm;
    const Complex val = v.dot(w);
    table.rows.push_back({N, std::abs(val - limit)});
  }
  if (!table.rows.empty()) {
    const auto& first = table.rows.front();
    table.K = 10.0 * first.d / std::pow(table.lambda2, first.N - a);
    table.pass = true;
    for (const auto& row : table.rows)
      if (row.d > table.K * std::pow(table.lambda2, row.N - a) + 1e-15) table.pass = false;
  }
  return table;
}

int surjectivity_check(const KrausTuple& B, int a) {
  SpectralData sd = spectral_data(B);
  require_normalized(sd);
  std::vector<Matrix> W = site_products(B, a);
  const long long dim = static_cast<long long>(W.size());
  Matrix S(B.k * B.k, dim * dim);
  long long col = 0;
  for (long long mu = 0; mu < dim; ++mu)
    for (long long nu = 0; nu < dim; ++nu)
      S.col(col++) = vec(Matrix(W[mu] * sd.e * W[nu].adjoint()));
  return static_cast<int>(orthonormal_range(S).dim());
}

}  // namespace gapflow
