#include "gapflow/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace gapflow {

namespace {

constexpr double kPerronClusterTol = 1e-8;

// Turns a Perron eigenvector of the matricization into a PSD matrix:
// rotate the phase so the trace is real positive, then Hermitize.
Matrix positive_fixed_point(const Vector& v, Index k, double* asymmetry = nullptr) {
  Matrix X = unvec(v, k);
  Complex tau = X.trace();
  if (std::abs(tau) > 1e-12 * X.norm()) {
    X *= std::conj(tau) / std::abs(tau);
  } else {
    // traceless candidate: fix the phase on the largest entry instead
    Index imax = 0, jmax = 0;
    X.cwiseAbs().maxCoeff(&imax, &jmax);
    Complex p = X(imax, jmax);
    if (std::abs(p) > 0) X *= std::conj(p) / std::abs(p);
  }
  Matrix H = (X + X.adjoint()) / 2.0;
  if (asymmetry) *asymmetry = (X - H).norm();
  return H;
}

double inverse_spectral_norm_of_psd(const Matrix& M) {
  HermitianSpectrum es = hermitian_spectrum(M);
  const double lo = es.eigenvalues.minCoeff();
  if (lo <= 0) return std::numeric_limits<double>::infinity();
  return 1.0 / lo;
}

}  // namespace

Matrix apply_channel(const KrausTuple& B, const Matrix& X) {
  if (X.rows() != B.k || X.cols() != B.k)
    throw Error(ErrorCode::ShapeMismatch, "argument must be k x k");
  Matrix Y = Matrix::Zero(B.k, B.k);
  for (const auto& Bm : B.B) Y += Bm * X * Bm.adjoint();
  return Y;
}

Matrix apply_adjoint_channel(const KrausTuple& B, const Matrix& X) {
  if (X.rows() != B.k || X.cols() != B.k)
    throw Error(ErrorCode::ShapeMismatch, "argument must be k x k");
  Matrix Y = Matrix::Zero(B.k, B.k);
  for (const auto& Bm : B.B) Y += Bm.adjoint() * X * Bm;
  return Y;
}

Matrix matricize_channel(const KrausTuple& B) {
  const Index k = B.k;
  Matrix M = Matrix::Zero(k * k, k * k);
  for (const auto& Bm : B.B) {
    // kron(conj(Bm), Bm), laid out for column-major vec
    for (Index j2 = 0; j2 < k; ++j2)
      for (Index i2 = 0; i2 < k; ++i2) {
        const Complex w = std::conj(Bm(i2, j2));
        if (w == Complex(0, 0)) continue;
        M.block(i2 * k, j2 * k, k, k) += w * Bm;
      }
  }
  return M;
}

Matrix unvec(const Vector& v, Index k) {
  return Eigen::Map<const Matrix>(v.data(), k, k);
}

Vector vec(const Matrix& M) {
  return Eigen::Map<const Vector>(M.data(), M.size());
}

SpectralData spectral_data(const KrausTuple& B, bool strict) {
  B.validate();
  const Index k = B.k;

  SpectralData sd;
  sd.matricization = matricize_channel(B);

  Eigen::ComplexEigenSolver<Matrix> solver(sd.matricization, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "transfer-operator eigensolver failed");
  sd.eigenvalues = solver.eigenvalues();

  sd.r = 0.0;
  Index top = 0;
  for (Index i = 0; i < sd.eigenvalues.size(); ++i) {
    const double m = std::abs(sd.eigenvalues(i));
    if (m > sd.r) {
      sd.r = m;
      top = i;
    }
  }
  if (sd.r <= 0) throw Error(ErrorCode::NotIrreducible, "zero spectral radius");

  // Perron cluster: eigenvalues within tolerance of the radius.
  int cluster = 0;
  sd.lambda2 = 0.0;
  for (Index i = 0; i < sd.eigenvalues.size(); ++i) {
    const double m = std::abs(sd.eigenvalues(i));
    if (std::abs(sd.eigenvalues(i) - Complex(sd.r, 0.0)) <= kPerronClusterTol * sd.r)
      ++cluster;
    else
      sd.lambda2 = std::max(sd.lambda2, m);
  }
  const bool nondegenerate = (cluster == 1);

  sd.rho = Matrix::Zero(k, k);
  sd.e = Matrix::Zero(k, k);

  // Right fixed point from the eigenvector at the radius.
  sd.e = positive_fixed_point(solver.eigenvectors().col(top), k);

  // Left (adjoint) fixed point.
  Eigen::ComplexEigenSolver<Matrix> adj(sd.matricization.adjoint(), true);
  if (adj.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "adjoint transfer eigensolver failed");
  Index atop = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < adj.eigenvalues().size(); ++i) {
    const double d = std::abs(adj.eigenvalues()(i) - Complex(sd.r, 0.0));
    if (d < best) {
      best = d;
      atop = i;
    }
  }
  sd.rho = positive_fixed_point(adj.eigenvectors().col(atop), k);

  // Normalization: trace(rho) = 1, then trace(rho e) = 1.
  const double tr_rho = sd.rho.trace().real();
  if (std::abs(tr_rho) > 1e-300) sd.rho /= tr_rho;
  const double pairing = (sd.rho * sd.e).trace().real();
  if (std::abs(pairing) > 1e-300) sd.e /= pairing;

  sd.a = inverse_spectral_norm_of_psd(sd.e);
  sd.c = inverse_spectral_norm_of_psd(sd.rho);

  std::optional<int> s = try_wielandt_index(B, B.k * B.k * B.k * B.k);
  sd.primitive = nondegenerate && s.has_value();
  if (sd.primitive) sd.s = s;

  if (strict && !(std::isfinite(sd.a) && std::isfinite(sd.c)))
    throw Error(ErrorCode::NotIrreducible, "fixed points are not strictly positive");

  return sd;
}

std::optional<int> try_wielandt_index(const KrausTuple& B, int m_max) {
  B.validate();
  if (m_max < 1) throw Error(ErrorCode::InvalidArgument, "m_max must be >= 1");
  const Index k = B.k;
  const Index full = k * k;

  Matrix span(full, B.n);
  for (int mu = 0; mu < B.n; ++mu) span.col(mu) = vec(B.B[mu]);
  Subspace basis;
  try {
    basis = orthonormal_range(span);
  } catch (const Error&) {
    return std::nullopt;  // all-zero candidates
  }
  if (basis.dim() == full) return 1;

  for (int m = 2; m <= m_max; ++m) {
    Matrix cand(full, B.n * basis.dim());
    Index col = 0;
    for (int mu = 0; mu < B.n; ++mu)
      for (Index i = 0; i < basis.dim(); ++i)
        cand.col(col++) = vec(B.B[mu] * unvec(basis.basis.col(i), k));
    try {
      basis = orthonormal_range(cand);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (basis.dim() == full) return m;
  }
  return std::nullopt;
}

int wielandt_index(const KrausTuple& B, int m_max) {
  auto s = try_wielandt_index(B, m_max);
  if (!s)
    throw Error(ErrorCode::NotPrimitiveWithin,
                "monomial span does not reach Mat_k within m_max = " + std::to_string(m_max));
  return *s;
}

bool is_primitive(const KrausTuple& B) {
  auto s = try_wielandt_index(B, B.k * B.k * B.k * B.k);
  if (!s) return false;
  Vector ev = general_spectrum(matricize_channel(B));
  double r = ev.cwiseAbs().maxCoeff();
  int cluster = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i) - Complex(r, 0.0)) <= kPerronClusterTol * r) ++cluster;
  return cluster == 1;
}

KrausTuple normalize(const KrausTuple& B) {
  if (!try_wielandt_index(B, B.k * B.k * B.k * B.k))
    throw Error(ErrorCode::NotPrimitive, "normalize requires a primitive tuple");
  Vector ev = general_spectrum(matricize_channel(B));
  const double r = ev.cwiseAbs().maxCoeff();
  if (r <= 0) throw Error(ErrorCode::NotPrimitive, "zero spectral radius");
  KrausTuple out = B;
  const double scale = 1.0 / std::sqrt(r);
  for (auto& m : out.B) m *= scale;
  return out;
}

KrausTuple unitalize(const KrausTuple& B) {
  B.validate();
  const Index k = B.k;
  Matrix M = matricize_channel(B);
  Eigen::ComplexEigenSolver<Matrix> solver(M, true);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "transfer-operator eigensolver failed");
  double r = 0.0;
  Index top = 0;
  for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double m = std::abs(solver.eigenvalues()(i));
    if (m > r) {
      r = m;
      top = i;
    }
  }
  if (r <= 0) throw Error(ErrorCode::NotIrreducible, "zero spectral radius");
  Matrix h = positive_fixed_point(solver.eigenvectors().col(top), k);
  HermitianSpectrum hs = hermitian_spectrum(h);
  if (hs.eigenvalues.minCoeff() <= 1e-12 * hs.eigenvalues.maxCoeff())
    throw Error(ErrorCode::NotIrreducible, "Perron eigenvector is not strictly positive");
  RealVector sq = hs.eigenvalues.array().sqrt();
  Matrix h_half = hs.eigenvectors * sq.asDiagonal() * hs.eigenvectors.adjoint();
  Matrix h_mhalf = hs.eigenvectors * sq.array().inverse().matrix().asDiagonal() *
                   hs.eigenvectors.adjoint();
  KrausTuple out = B;
  const double scale = 1.0 / std::sqrt(r);
  for (auto& m : out.B) m = scale * h_mhalf * m * h_half;
  return out;
}

namespace {

// Fixed-block projector vec(e) vec(rho)^dagger; idempotent since tr(rho e)=1.
Matrix fixed_block_projector(const SpectralData& sd) {
  Vector ve = vec(sd.e);
  Vector vr = vec(sd.rho);
  return ve * vr.adjoint();
}

void require_normalized_primitive(const SpectralData& sd) {
  if (!sd.primitive) throw Error(ErrorCode::NotPrimitive, "tuple is not primitive");
  if (std::abs(sd.r - 1.0) > 1e-8)
    throw Error(ErrorCode::NotNormalized, "spectral radius deviates from 1");
}

}  // namespace

double transfer_complement_norm(const SpectralData& sd, int N) {
  require_normalized_primitive(sd);
  const Index d = sd.matricization.rows();
  Matrix X = Matrix::Identity(d, d) - fixed_block_projector(sd);
  for (int i = 0; i < N; ++i) X = sd.matricization * X;
  return spectral_norm(X);
}

GapConstants gap_constants(const KrausTuple& B) {
  return gap_constants(B, spectral_data(B));
}

GapConstants gap_constants(const KrausTuple& B, const SpectralData& sd) {
  require_normalized_primitive(sd);
  const Index d = sd.matricization.rows();
  const double kac = static_cast<double>(B.k) * sd.a * sd.c;

  Matrix P = fixed_block_projector(sd);
  Matrix Q = Matrix::Identity(d, d) - P;

  GapConstants gc;

  // Analytic envelope on the complement: with A_c = M - P (spectral radius
  // lambda2), ||A_c^N Q|| <= C * rho_mid^N from the resolvent on the circle
  // |z| = rho_mid. When the eigenbasis is well conditioned the tighter
  // diagonalizable bound C = cond(V) ||Q|| with rate lambda2 applies.
  const double lambda2 = sd.lambda2;
  Matrix Ac = sd.matricization - P;
  bool have_envelope = false;
  {
    Eigen::ComplexEigenSolver<Matrix> es(sd.matricization, true);
    if (es.info() == Eigen::Success) {
      Eigen::JacobiSVD<Matrix> svd(es.eigenvectors());
      const double smin = svd.singularValues()(svd.singularValues().size() - 1);
      if (smin > 1e-8) {
        const double cond = svd.singularValues()(0) / smin;
        gc.envelope_C = cond * spectral_norm(Q);
        gc.envelope_rate = lambda2;
        have_envelope = true;
      }
    }
  }
  if (!have_envelope) {
    const double rho_mid = (1.0 + lambda2) / 2.0;
    double sup = 0.0;
    const int samples = 128;
    for (int j = 0; j < samples; ++j) {
      const double th = 2.0 * M_PI * j / samples;
      Complex z = rho_mid * Complex(std::cos(th), std::sin(th));
      Matrix R = (z * Matrix::Identity(d, d) - Ac).inverse() * Q;
      sup = std::max(sup, spectral_norm(R));
    }
    gc.envelope_C = rho_mid * sup;
    gc.envelope_rate = rho_mid;
  }

  auto envelope = [&](int N) {
    return kac * gc.envelope_C * std::pow(gc.envelope_rate, N);
  };

  int n_cap = 1;
  while (n_cap < 10000 && envelope(n_cap) >= 1e-14) ++n_cap;

  gc.E.resize(n_cap);
  Matrix X = Q;
  for (int N = 1; N <= n_cap; ++N) {
    X = sd.matricization * X;
    gc.E[N - 1] = kac * spectral_norm(X);
  }

  gc.E_sup = 0.0;
  for (double v : gc.E) gc.E_sup = std::max(gc.E_sup, v);
  gc.E_sup = std::max(gc.E_sup, envelope(n_cap));  // tail majorant

  const double tr_e = sd.e.trace().real();
  gc.F = (4.0 / (sd.a * sd.c)) * (gc.E_sup + sd.c + sd.a * tr_e);

  // L = least N with sup_{N' >= N} E(N') < 1/2; the tail is below 1e-14.
  {
    std::vector<double> suffix(n_cap + 1, envelope(n_cap));
    for (int N = n_cap; N >= 1; --N)
      suffix[N - 1] = std::max(gc.E[N - 1], suffix[N]);
    int L = 1;
    while (L <= n_cap && suffix[L - 1] >= 0.5) ++L;
    gc.L = L;
  }

  // lbar: least l with sup_{N >= l} g(N) < 1 for
  // g(N) = sqrt(N+1) (3 E F + 2)(E F) + E. Beyond the table, E is replaced by
  // the envelope; the scan extends until the envelope majorant is < 1 and
  // shrinking per step.
  {
    auto g_of = [&](double E_val, int N) {
      const double ef = E_val * gc.F;
      return std::sqrt(static_cast<double>(N) + 1.0) * (3.0 * ef + 2.0) * ef + E_val;
    };
    int horizon = n_cap;
    auto tail_ok = [&](int H) {
      const double m = g_of(envelope(H + 1), H + 1);
      const double q = gc.envelope_rate *
                       std::sqrt(static_cast<double>(H + 3) / static_cast<double>(H + 2));
      return m < 1.0 && q < 1.0;
    };
    while (!tail_ok(horizon) && horizon < 2000000) horizon *= 2;

    std::vector<double> g(horizon);
    for (int N = 1; N <= horizon; ++N)
      g[N - 1] = g_of(N <= n_cap ? gc.E[N - 1] : envelope(N), N);
    std::vector<double> suffix(horizon + 1, g_of(envelope(horizon + 1), horizon + 1));
    for (int N = horizon; N >= 1; --N) suffix[N - 1] = std::max(g[N - 1], suffix[N]);
    int l = 1;
    while (l <= horizon && suffix[l - 1] >= 1.0) ++l;
    gc.lbar = l;
  }

  if (gc.L > gc.lbar) gc.lbar = gc.L;  // paper invariant L <= lbar

  return gc;
}

PathDecay uniform_path_decay(const std::vector<SpectralData>& samples) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no samples");
  double lambda_max = 0.0;
  for (const auto& sd : samples) {
    require_normalized_primitive(sd);
    if (sd.lambda2 >= 1.0)
      throw Error(ErrorCode::DegenerateSample, "lambda2 >= 1 along the path");
    lambda_max = std::max(lambda_max, sd.lambda2);
  }
  PathDecay pd;
  pd.lambda_unif = lambda_max + 1e-6;
  pd.c_unif = 0.0;
  const int l_probe = 50;
  for (const auto& sd : samples) {
    const Index d = sd.matricization.rows();
    Matrix X = Matrix::Identity(d, d) - fixed_block_projector(sd);
    double scale = 1.0;
    for (int l = 1; l <= l_probe; ++l) {
      X = sd.matricization * X;
      scale *= pd.lambda_unif;
      pd.c_unif = std::max(pd.c_unif, spectral_norm(X) / scale);
    }
  }
  return pd;
}

}  // namespace gapflow
