#include "gapflow/pathlab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace gapflow {

double smooth_bump(double t, double center, double width) {
  const double u = (t - center) / width;
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

Complex PlanarCurve::evaluate(double t) const {
  Complex value = (1.0 - t) * start + t * end;
  switch (kind) {
    case Kind::Line:
      break;
    case Kind::DetourArc:
      value += Complex(0, 1) * (start - end) * detour_amp * smooth_bump(t, 0.5, 0.5);
      break;
    case Kind::RandomBump:
      for (const auto& b : bumps) value += b.amp * smooth_bump(t, b.center, b.width);
      break;
  }
  return value;
}

SkMembership sk_membership(const Vector& lambda, double tol) {
  if (tol < 0) throw Error(ErrorCode::InvalidArgument, "tol must be nonnegative");
  const Index k = lambda.size();
  double margin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < k; ++i) margin = std::min(margin, std::abs(lambda(i)));
  if (margin == 0.0) return {false, 0.0};
  for (Index i = 0; i < k; ++i)
    for (Index j = i + 1; j < k; ++j) margin = std::min(margin, std::abs(lambda(i) - lambda(j)));

  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j)
      if (i != j) pairs.emplace_back(i, j);
  for (size_t p = 0; p < pairs.size(); ++p)
    for (size_t q = p + 1; q < pairs.size(); ++q) {
      const Complex rp = lambda(pairs[p].first) / lambda(pairs[p].second);
      const Complex rq = lambda(pairs[q].first) / lambda(pairs[q].second);
      margin = std::min(margin, std::abs(rp - rq));
    }
  return {margin > tol, margin};
}

AvoidResult avoid_finite_path(Complex chi, Complex eta, const std::vector<Complex>& F) {
  if (chi == eta) throw Error(ErrorCode::DegenerateEndpoints, "endpoints coincide");
  for (const Complex& f : F)
    if (f == chi || f == eta)
      throw Error(ErrorCode::DegenerateEndpoints, "endpoint lies in the forbidden set");

  auto min_distance = [&](const PlanarCurve& c) {
    if (F.empty()) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    const int grid = 2001;
    for (int i = 0; i < grid; ++i) {
      const Complex z = c.evaluate(static_cast<double>(i) / (grid - 1));
      for (const Complex& f : F) best = std::min(best, std::abs(z - f));
    }
    return best;
  };

  // Candidate family: the chord, then growing perpendicular detours. The
  // displacement factor stays below sqrt(3) so |xi(t) - chi| <= 2 |eta - chi|.
  std::vector<double> amps = {0.0};
  for (int j = 1; j <= 12; ++j) {
    amps.push_back(j / 8.0);
    amps.push_back(-j / 8.0);
  }
  AvoidResult best;
  best.margin = -1.0;
  for (double amp : amps) {
    PlanarCurve c;
    c.start = chi;
    c.end = eta;
    if (amp == 0.0) {
      c.kind = PlanarCurve::Kind::Line;
    } else {
      c.kind = PlanarCurve::Kind::DetourArc;
      c.detour_amp = amp;
    }
    const double margin = min_distance(c);
    if (margin > best.margin) best = {c, margin};
  }
  return best;
}

Vector SkPath::evaluate(double t) const {
  Vector out(static_cast<Index>(coords.size()));
  for (size_t i = 0; i < coords.size(); ++i) out(static_cast<Index>(i)) = coords[i].evaluate(t);
  return out;
}

SkPath sk_path(const Vector& lambda, const Vector& mu, std::uint64_t seed) {
  if (lambda.size() != mu.size())
    throw Error(ErrorCode::DimensionMismatch, "endpoint dimensions differ");
  const SkMembership m0 = sk_membership(lambda, 1e-8);
  const SkMembership m1 = sk_membership(mu, 1e-8);
  if (!m0.member || !m1.member)
    throw Error(ErrorCode::InvalidArgument, "endpoints must lie in S_k with margin > 1e-8");

  const Index k = lambda.size();
  SkPath path;
  path.coords.resize(k);
  for (Index i = 0; i < k; ++i)
    path.coords[i] = PlanarCurve{PlanarCurve::Kind::Line, lambda(i), mu(i), 0.0, {}};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double amp_cap = 0.9 * std::min(m0.margin, m1.margin);
  const int grid = 10000;

  for (int attempt = 0; attempt <= 64; ++attempt) {
    double min_margin = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int i = 0; i < grid && ok; ++i) {
      const double t = static_cast<double>(i) / (grid - 1);
      const SkMembership mem = sk_membership(path.evaluate(t), 1e-10);
      min_margin = std::min(min_margin, mem.margin);
      if (!mem.member) ok = false;
    }
    if (ok) {
      path.min_margin = min_margin;
      path.retries = attempt;
      return path;
    }
    for (Index i = 0; i < k; ++i) {
      PlanarCurve c{PlanarCurve::Kind::RandomBump, lambda(i), mu(i), 0.0, {}};
      PlanarCurve::Bump b;
      b.center = 0.25 + 0.5 * unit(rng);
      b.width = 0.05 + 0.15 * unit(rng);
      const double r = amp_cap * (0.2 + 0.8 * unit(rng));
      const double th = 2.0 * M_PI * unit(rng);
      b.amp = r * Complex(std::cos(th), std::sin(th));
      c.bumps.push_back(b);
      path.coords[i] = c;
    }
  }
  throw Error(ErrorCode::RetriesExhausted, "no S_k path found within 64 seeded retries");
}

ZMembership z_membership(const KrausTuple& B, double tol) {
  B.validate();
  if (B.n < 2) throw Error(ErrorCode::InvalidArgument, "need at least two Kraus operators");
  const Index k = B.k;

  ZMembership out;
  Eigen::ComplexEigenSolver<Matrix> solver(B.B[0], true);
  if (solver.info() != Eigen::Success) return out;

  std::vector<Index> order(k);
  std::iota(order.begin(), order.end(), 0);
  const Vector& ev = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() < ev(b).real();
    return ev(a).imag() < ev(b).imag();
  });

  out.lambda = Vector(k);
  Matrix P(k, k);
  for (Index c = 0; c < k; ++c) {
    out.lambda(c) = ev(order[c]);
    Vector col = solver.eigenvectors().col(order[c]);
    Index lead = 0;
    while (lead < k && std::abs(col(lead)) <= 1e-12) ++lead;
    if (lead < k) {
      const Complex ph = col(lead) / std::abs(col(lead));
      col /= ph;
    }
    P.col(c) = col;
  }

  const SkMembership sk = sk_membership(out.lambda, tol);
  out.sk_margin = sk.margin;
  if (!sk.member) return out;

  Eigen::JacobiSVD<Matrix> psvd(P);
  const double smin = psvd.singularValues()(k - 1);
  if (smin < 1e-12 * psvd.singularValues()(0)) return out;  // defective B_1

  Matrix G = P.inverse() * B.B[1] * P;
  out.min_entry = G.cwiseAbs().minCoeff();
  out.member = out.min_entry > tol;
  if (out.member) out.witness = P;
  return out;
}

Matrix jordan_like_matrix(const std::vector<std::vector<Complex>>& blocks) {
  Index k = 0;
  for (const auto& b : blocks) k += static_cast<Index>(b.size());
  Matrix J = Matrix::Zero(k, k);
  Index pos = 0;
  for (const auto& b : blocks) {
    const Index len = static_cast<Index>(b.size());
    for (Index a = 0; a < len; ++a) {
      J(pos + a, pos + a) = b[a];
      if (a > 0) J(pos + a - 1, pos + a) = 1.0;
    }
    pos += len;
  }
  return J;
}

JordanDiagonalizer explicit_diagonalizer(const std::vector<std::vector<Complex>>& blocks) {
  Index k = 0;
  for (const auto& b : blocks) {
    for (size_t a = 0; a < b.size(); ++a)
      for (size_t j = a + 1; j < b.size(); ++j)
        if (std::abs(b[a] - b[j]) <= 1e-12)
          throw Error(ErrorCode::DegenerateEigenvalues,
                      "eigenvalues inside a block must be pairwise distinct");
    k += static_cast<Index>(b.size());
  }
  JordanDiagonalizer out;
  out.P = Matrix::Zero(k, k);
  out.P_inv = Matrix::Zero(k, k);
  out.D = Matrix::Zero(k, k);
  Index pos = 0;
  for (const auto& b : blocks) {
    const Index len = static_cast<Index>(b.size());
    for (Index a = 0; a < len; ++a) out.D(pos + a, pos + a) = b[a];
    for (Index beta = 0; beta < len; ++beta)
      for (Index alpha = 0; alpha < len; ++alpha) {
        if (alpha == beta) {
          out.P(pos + beta, pos + alpha) = 1.0;
          out.P_inv(pos + alpha, pos + beta) = 1.0;
        } else if (alpha > beta) {
          Complex c = 1.0;
          for (Index j = beta; j < alpha; ++j) c /= (b[alpha] - b[j]);
          out.P(pos + beta, pos + alpha) = c;
        } else {
          Complex d = 1.0;
          for (Index j = alpha + 1; j <= beta; ++j) d /= (b[alpha] - b[j]);
          out.P_inv(pos + alpha, pos + beta) = d;
        }
      }
    pos += len;
  }
  return out;
}

JordanStructure jordan_structure(const Matrix& A1) {
  if (A1.rows() != A1.cols()) throw Error(ErrorCode::ShapeMismatch, "matrix not square");
  const Index k = A1.rows();
  const double scale = std::max(A1.norm(), 1e-300);
  const double ctol = 1e-8 * scale;

  Vector ev = general_spectrum(A1);

  // single-linkage clustering of the spectrum at ctol
  std::vector<int> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Index i = 0; i < k; ++i)
    for (Index j = i + 1; j < k; ++j)
      if (std::abs(ev(i) - ev(j)) <= ctol) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));

  struct Cluster {
    Complex centroid;
    std::vector<Index> members;
    double radius = 0.0;
  };
  std::vector<Cluster> clusters;
  std::vector<int> root_to_cluster(k, -1);
  for (Index i = 0; i < k; ++i) {
    const int r = find(static_cast<int>(i));
    if (root_to_cluster[r] < 0) {
      root_to_cluster[r] = static_cast<int>(clusters.size());
      clusters.push_back({});
    }
    clusters[root_to_cluster[r]].members.push_back(i);
  }
  for (auto& c : clusters) {
    Complex sum = 0.0;
    for (Index i : c.members) sum += ev(i);
    c.centroid = sum / static_cast<double>(c.members.size());
    for (Index i : c.members) c.radius = std::max(c.radius, std::abs(ev(i) - c.centroid));
  }
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.centroid.real() != b.centroid.real()) return a.centroid.real() < b.centroid.real();
    return a.centroid.imag() < b.centroid.imag();
  });
  for (size_t i = 0; i < clusters.size(); ++i)
    for (size_t j = i + 1; j < clusters.size(); ++j)
      if (std::abs(clusters[i].centroid - clusters[j].centroid) < 10.0 * ctol)
        throw Error(ErrorCode::JordanFailure,
                    "ambiguous eigenvalue clustering; supply the structure explicitly");

  JordanStructure structure;
  structure.R = Matrix(k, k);
  Index col = 0;

  for (const auto& cluster : clusters) {
    const Index mult = static_cast<Index>(cluster.members.size());
    Matrix M = A1 - cluster.centroid * Matrix::Identity(k, k);

    // null-space ladder of M^j
    std::vector<Matrix> null_bases;
    std::vector<Index> null_dims;
    Matrix Mp = M;
    for (Index j = 1; j <= mult + 1; ++j) {
      Eigen::JacobiSVD<Matrix> svd(Mp, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      const double smax = std::max(sv(0), 1e-300);
      const double tol_j = std::max({10.0 * cluster.radius, 1e-8 * scale, 1e-12 * smax});
      Index nulldim = 0;
      for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= tol_j) ++nulldim;
      null_bases.push_back(svd.matrixV().rightCols(nulldim));
      null_dims.push_back(nulldim);
      if (nulldim >= mult) break;
      if (j == mult + 1)
        throw Error(ErrorCode::JordanFailure, "null-space ladder failed to reach multiplicity");
      Mp = Mp * M;
    }
    if (null_dims.back() != mult)
      throw Error(ErrorCode::JordanFailure, "null-space dimension overshoots multiplicity");
    const int p = static_cast<int>(null_dims.size());

    struct Chain {
      std::vector<Vector> vs;  // top first, then M*top, ...
    };
    std::vector<Chain> chains;
    for (int j = p; j >= 1; --j) {
      for (auto& ch : chains) ch.vs.push_back(M * ch.vs.back());
      const Index b_j = null_dims[j - 1] - (j >= 2 ? null_dims[j - 2] : 0);
      const Index existing = static_cast<Index>(chains.size());
      const Index need = b_j - existing;
      if (need < 0) throw Error(ErrorCode::JordanFailure, "inconsistent block counts");
      if (need == 0) continue;

      Matrix forbidden(k, (j >= 2 ? null_bases[j - 2].cols() : 0) + existing);
      Index fc = 0;
      if (j >= 2)
        for (Index i = 0; i < null_bases[j - 2].cols(); ++i)
          forbidden.col(fc++) = null_bases[j - 2].col(i);
      for (const auto& ch : chains) forbidden.col(fc++) = ch.vs.back().normalized();

      Matrix cand = null_bases[j - 1];
      if (forbidden.cols() > 0) {
        Subspace F = orthonormal_range(forbidden);
        cand -= F.basis * (F.basis.adjoint() * cand);
      }
      Subspace fresh = orthonormal_range(cand, 1e-8);
      if (fresh.dim() < need)
        throw Error(ErrorCode::JordanFailure, "could not complete the Jordan chains");
      for (Index i = 0; i < need; ++i) {
        Chain ch;
        ch.vs.push_back(fresh.basis.col(i));
        chains.push_back(std::move(ch));
      }
    }

    std::stable_sort(chains.begin(), chains.end(),
                     [](const Chain& a, const Chain& b) { return a.vs.size() > b.vs.size(); });
    for (const auto& ch : chains) {
      const Index len = static_cast<Index>(ch.vs.size());
      const double norm0 = ch.vs.back().norm();
      if (norm0 < 1e-300) throw Error(ErrorCode::JordanFailure, "degenerate chain vector");
      structure.blocks.emplace_back(cluster.centroid, static_cast<int>(len));
      for (Index i = 0; i < len; ++i)
        structure.R.col(col++) = ch.vs[len - 1 - i] / norm0;
    }
  }

  // consistency: A1 R = R J within tolerance, R invertible
  std::vector<std::vector<Complex>> blockvals;
  for (const auto& [lam, len] : structure.blocks)
    blockvals.push_back(std::vector<Complex>(len, lam));
  Matrix J = jordan_like_matrix(blockvals);
  Eigen::JacobiSVD<Matrix> rsvd(structure.R);
  if (rsvd.singularValues()(k - 1) < 1e-12 * rsvd.singularValues()(0))
    throw Error(ErrorCode::JordanFailure, "Jordan basis is numerically singular");
  if ((A1 * structure.R - structure.R * J).norm() > 1e-6 * scale)
    throw Error(ErrorCode::JordanFailure, "Jordan reconstruction check failed");
  return structure;
}

KrausTuple JordanApproachSeg::evaluate(double t) const {
  if (t <= 0.0) return A;
  const double s = delta * t;
  const Index k = A.k;
  Matrix J = Matrix::Zero(k, k);
  Index pos = 0;
  for (const auto& [lam, len] : jordan.blocks) {
    for (Index a = 0; a < len; ++a) {
      J(pos + a, pos + a) = lam + std::pow(s, exponents[pos + a]);
      if (a > 0) J(pos + a - 1, pos + a) = 1.0;
    }
    pos += len;
  }
  KrausTuple out = A;
  out.B[0] = jordan.R * J * R_inv;
  out.B[1] = A.B[1] + s * kick;
  return out;
}

namespace {

JordanApproachSeg build_jordan_approach(const KrausTuple& A, const JordanStructure& structure) {
  A.validate();
  const Index k = A.k;
  JordanApproachSeg seg;
  seg.A = A;
  seg.jordan = structure;
  seg.R_inv = structure.R.inverse();

  seg.exponents.resize(k);
  Index g = 0;
  for (const auto& [lam, len] : structure.blocks) {
    (void)lam;
    for (int a = 0; a < len; ++a) {
      seg.exponents[g] = 1 << (g + 2);  // 2^(m+1) with m the 1-based global index
      ++g;
    }
  }

  // kick matrix: ones between each block's last and each block's first vector
  Matrix K = Matrix::Zero(k, k);
  {
    std::vector<Index> first, last;
    Index pos = 0;
    for (const auto& [lam, len] : structure.blocks) {
      (void)lam;
      first.push_back(pos);
      last.push_back(pos + len - 1);
      pos += len;
    }
    for (Index l = 0; l < static_cast<Index>(first.size()); ++l)
      for (Index lp = 0; lp < static_cast<Index>(first.size()); ++lp)
        K(last[l], first[lp]) = 1.0;
  }
  seg.kick = structure.R * K * seg.R_inv;

  // delta search: bisection from 1/2 over a 10^3-point grid. The S_k margins
  // necessarily collapse as s -> 0 whenever A_1 is degenerate, so the floor
  // scales with the slowest perturbation power; the s = delta endpoint must
  // pass at the absolute tolerance.
  const Matrix G = seg.R_inv * A.B[1] * structure.R;
  const double norm_G = spectral_norm(G);
  std::vector<Complex> gvals;
  {
    Index pos = 0;
    std::vector<Index> first, last;
    for (const auto& [lam, len] : structure.blocks) {
      (void)lam;
      first.push_back(pos);
      last.push_back(pos + len - 1);
      pos += len;
    }
    for (Index l = 0; l < static_cast<Index>(first.size()); ++l)
      for (Index lp = 0; lp < static_cast<Index>(first.size()); ++lp)
        gvals.push_back(G(last[l], first[lp]));
  }
  const int n_max = *std::max_element(seg.exponents.begin(), seg.exponents.end());
  const double k2 = static_cast<double>(k) * static_cast<double>(k);

  auto lambda_at = [&](double s) {
    Vector lam(k);
    Index gg = 0;
    for (const auto& [lv, len] : seg.jordan.blocks)
      for (int a = 0; a < len; ++a, ++gg) lam(gg) = lv + std::pow(s, seg.exponents[gg]);
    return lam;
  };

  double delta = 0.5;
  for (int halving = 0; halving < 60; ++halving, delta /= 2.0) {
    bool ok = true;
    for (int i = 1; i <= 1000 && ok; ++i) {
      const double s = delta * i / 1000.0;
      const SkMembership mem = sk_membership(lambda_at(s), 0.0);
      const double floor = 1e-10 * std::min(1.0, std::pow(s, n_max));
      if (!(mem.margin > floor)) ok = false;
      for (const Complex& gv : gvals) {
        if (!(norm_G * k2 * s * s < std::abs(gv + s))) {
          ok = false;
          break;
        }
      }
    }
    if (ok && !sk_membership(lambda_at(delta), 1e-10).member) ok = false;
    if (ok) {
      seg.delta = delta;
      return seg;
    }
  }
  throw Error(ErrorCode::DeltaNotFound, "no admissible delta after 60 halvings");
}

}  // namespace

JordanApproachSeg jordan_approach_segment(const KrausTuple& A) {
  return build_jordan_approach(A, jordan_structure(A.B[0]));
}

JordanApproachSeg jordan_approach_segment(const KrausTuple& A, const JordanStructure& structure) {
  return build_jordan_approach(A, structure);
}

Matrix InsideZSeg::gl_interp(double t) const {
  Matrix e = (t * W).exp();
  return P_A * (std::polar(1.0, phi * t) * e);
}

KrausTuple InsideZSeg::evaluate(double t) const {
  if (t <= 0.0) return A;
  if (t >= 1.0) return E;
  const Index k = A.k;
  KrausTuple bar = A;
  bar.B[0] = Matrix::Zero(k, k);
  Vector lam = eigen_path.evaluate(t);
  for (Index i = 0; i < k; ++i) bar.B[0](i, i) = lam(i);
  bar.B[1] = Matrix(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) bar.B[1](a, b) = entry_paths[a * k + b].evaluate(t);
  for (int i = 2; i < A.n; ++i)
    bar.B[i] = (1.0 - t) * tail_A[i - 2] + t * tail_E[i - 2];
  Matrix P = gl_interp(t);
  Matrix P_inv = P.inverse();
  KrausTuple out = A;
  for (int i = 0; i < A.n; ++i) out.B[i] = P * bar.B[i] * P_inv;
  return out;
}

InsideZSeg inz_segment(const KrausTuple& A, const KrausTuple& E, std::uint64_t seed, double tol) {
  A.validate();
  E.validate();
  if (A.n != E.n || A.k != E.k)
    throw Error(ErrorCode::DimensionMismatch, "endpoint shapes differ");
  ZMembership zA = z_membership(A, tol);
  ZMembership zE = z_membership(E, tol);
  if (!zA.member || !zE.member)
    throw Error(ErrorCode::MembershipLost, "segment endpoints must lie in Z_{n,k}");

  const Index k = A.k;
  InsideZSeg seg;
  seg.A = A;
  seg.E = E;
  seg.P_A = *zA.witness;
  seg.P_E = *zE.witness;
  seg.eigen_path = sk_path(zA.lambda, zE.lambda, seed);

  Matrix PAi = seg.P_A.inverse();
  Matrix PEi = seg.P_E.inverse();
  Matrix A2 = PAi * A.B[1] * seg.P_A;
  Matrix E2 = PEi * E.B[1] * seg.P_E;
  seg.entry_paths.resize(k * k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) {
      const Complex chi = A2(a, b);
      const Complex eta = E2(a, b);
      if (chi == eta)
        seg.entry_paths[a * k + b] = PlanarCurve{PlanarCurve::Kind::Line, chi, eta, 0.0, {}};
      else
        seg.entry_paths[a * k + b] = avoid_finite_path(chi, eta, {Complex(0, 0)}).curve;
    }
  for (int i = 2; i < A.n; ++i) {
    seg.tail_A.push_back(PAi * A.B[i] * seg.P_A);
    seg.tail_E.push_back(PEi * E.B[i] * seg.P_E);
  }

  // GL interpolation: rotate the spectrum of M = P_A^{-1} P_E off the
  // principal-log cut, then take the logarithm.
  Matrix M = PAi * seg.P_E;
  Vector mev = general_spectrum(M);
  // angular clearance between the rotated spectrum and the log cut at pi
  auto cut_distance = [&](double phi) {
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < mev.size(); ++i) {
      const double a = std::arg(mev(i) * std::polar(1.0, -phi));
      best = std::min(best, M_PI - std::abs(a));
    }
    return best;
  };
  double phi = 0.0;
  if (cut_distance(0.0) < M_PI / 8) {
    double best = -1.0;
    for (int j = 0; j < 720; ++j) {
      const double cand = 2.0 * M_PI * j / 720.0;
      const double d = cut_distance(cand);
      if (d > best) {
        best = d;
        phi = cand;
      }
    }
  }
  seg.phi = phi;
  Matrix rotated = std::polar(1.0, -phi) * M;
  seg.W = rotated.log();
  if ((seg.P_A * (std::polar(1.0, phi) * seg.W.exp()) - seg.P_E).norm() > 1e-8 * seg.P_E.norm())
    throw Error(ErrorCode::NoConvergence, "GL interpolation logarithm failed");

  // interior grid verification
  for (int i = 1; i < 100; ++i) {
    const double t = static_cast<double>(i) / 100.0;
    if (!z_membership(seg.evaluate(t), tol).member)
      throw Error(ErrorCode::MembershipLost,
                  "Z membership lost at t = " + std::to_string(t));
  }
  return seg;
}

KrausTuple PathSegment::evaluate(double t) const {
  return std::visit(
      [&](const auto& seg) -> KrausTuple {
        using T = std::decay_t<decltype(seg)>;
        if constexpr (std::is_same_v<T, ReversedSeg>) {
          return seg.inner->evaluate(1.0 - t);
        } else if constexpr (std::is_same_v<T, ConstantReparamSeg>) {
          return seg.inner->evaluate((1.0 - t) * seg.a + t * seg.b);
        } else {
          return seg.evaluate(t);
        }
      },
      node);
}

KrausTuple MatrixPath::evaluate_raw(double t) const {
  if (entries.empty()) throw Error(ErrorCode::InvalidArgument, "empty path");
  t = std::clamp(t, 0.0, 1.0);
  size_t idx = 0;
  while (idx + 1 < entries.size() && t > entries[idx].t1) ++idx;
  const Entry& entry = entries[idx];
  double u = entry.t1 > entry.t0 ? (t - entry.t0) / (entry.t1 - entry.t0) : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  if (ramped) u = u * u * (3.0 - 2.0 * u);
  return entry.segment.evaluate(u);
}

KrausTuple MatrixPath::evaluate(double t) const {
  KrausTuple tuple = evaluate_raw(t);
  if (!normalized) return tuple;
  const double r = gapflow::spectral_radius(tuple);
  if (!(r > 1e-300))
    throw Error(ErrorCode::NotPrimitiveAt, "zero spectral radius at t = " + std::to_string(t));
  const double scale = 1.0 / std::sqrt(r);
  for (auto& m : tuple.B) m *= scale;
  return tuple;
}

MatrixPath connect(const KrausTuple& A, const KrausTuple& E, int m, std::uint64_t seed) {
  A.validate();
  E.validate();
  if (A.n != E.n || A.k != E.k)
    throw Error(ErrorCode::DimensionMismatch, "endpoint shapes differ");
  const int k = A.k;
  if (m < 2 * k * (k - 1) + 3)
    throw Error(ErrorCode::InvalidArgument,
                "need m >= 2k(k-1)+3 = " + std::to_string(2 * k * (k - 1) + 3));

  JordanApproachSeg segA = jordan_approach_segment(A);
  JordanApproachSeg segE = jordan_approach_segment(E);
  KrausTuple midA = segA.evaluate(1.0);
  KrausTuple midE = segE.evaluate(1.0);
  InsideZSeg mid = inz_segment(midA, midE, seed);

  MatrixPath path;
  path.n = A.n;
  path.k = A.k;
  path.entries.push_back({PathSegment{std::move(segA)}, 0.0, 1.0 / 3.0});
  path.entries.push_back({PathSegment{std::move(mid)}, 1.0 / 3.0, 2.0 / 3.0});
  auto segE_holder = std::make_shared<const PathSegment>(PathSegment{std::move(segE)});
  path.entries.push_back({PathSegment{ReversedSeg{segE_holder}}, 2.0 / 3.0, 1.0});
  path.breakpoints = {1.0 / 3.0, 2.0 / 3.0};
  return path;
}

MatrixPath constant_path(const KrausTuple& B) {
  B.validate();
  auto holder = std::make_shared<const PathSegment>(PathSegment{jordan_approach_segment(B)});
  MatrixPath path;
  path.n = B.n;
  path.k = B.k;
  path.entries.push_back({PathSegment{ConstantReparamSeg{holder, 0.0, 0.0}}, 0.0, 1.0});
  return path;
}

MatrixPath normalize_path(const MatrixPath& path) {
  MatrixPath out = path;
  out.normalized = true;
  if (!is_primitive(path.evaluate_raw(0.0)))
    throw Error(ErrorCode::NotPrimitiveAt, "path start is not primitive");
  if (!is_primitive(path.evaluate_raw(1.0)))
    throw Error(ErrorCode::NotPrimitiveAt, "path end is not primitive");
  return out;
}

double spectral_radius(const KrausTuple& B) {
  Vector ev = general_spectrum(matricize_channel(B));
  return ev.cwiseAbs().maxCoeff();
}

}  // namespace gapflow
