#include "gapflow/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include "gapflow/groundspace.hpp"

namespace gapflow {

namespace {

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = std::min(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<double> uniform_grid(int grid_size) {
  if (grid_size < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points");
  std::vector<double> grid(grid_size);
  for (int i = 0; i < grid_size; ++i)
    grid[i] = static_cast<double>(i) / (grid_size - 1);
  return grid;
}

double tuple_norm(const KrausTuple& t) {
  double s = 0.0;
  for (const auto& m : t.B) s += m.squaredNorm();
  return std::sqrt(s);
}

KrausTuple tuple_lincomb(double a, const KrausTuple& x, double b, const KrausTuple& y) {
  KrausTuple out = x;
  for (int i = 0; i < x.n; ++i) out.B[i] = a * x.B[i] + b * y.B[i];
  return out;
}

void fail(PathCertRecord& rec, const std::string& reason) {
  if (rec.ok) {
    rec.ok = false;
    rec.failure = reason;
  }
}

}  // namespace

GapCertificate verify_path(const MatrixPath& path, int m, std::optional<int> l, int N,
                           int grid_size, const CertifyOptions& opts) {
  if (m < 1 || N < m) throw Error(ErrorCode::InvalidArgument, "need 1 <= m <= N");
  if (l && !(*l >= 1 && *l < N)) throw Error(ErrorCode::InvalidArgument, "need 1 <= l < N");
  const int k = path.k;
  const int k2 = k * k;

  GapCertificate cert;
  cert.kind = "path";
  cert.m = m;
  cert.l = l;
  cert.N = N;
  cert.grid_size = grid_size;
  cert.seed = opts.seed;
  cert.tol_ker = opts.tol_ker;
  cert.grid = uniform_grid(grid_size);
  cert.breakpoints = path.breakpoints;
  cert.records.resize(grid_size);

  std::vector<Matrix> gm_bases(grid_size);

  parallel_for(grid_size, opts.threads, [&](int i) {
    const double t = cert.grid[i];
    PathCertRecord& rec = cert.records[i];
    rec.t = t;
    try {
      KrausTuple tuple = path.evaluate(t);
      rec.r = spectral_radius(tuple);
      if (std::abs(rec.r - 1.0) > 1e-8) fail(rec, "NotNormalized: r deviates from 1");

      auto s_opt = try_wielandt_index(tuple, m - 1);
      if (s_opt) {
        rec.s = *s_opt;
      } else {
        fail(rec, "NotPrimitive: monomial span below Mat_k within m-1");
      }
      rec.sigma_min_B1 = smallest_singular_value(tuple.B[0]);

      GroundSpace gm = gamma_matrix(tuple, m);
      rec.rank_Gm = static_cast<int>(gm.space.dim());
      gm_bases[i] = gm.space.basis;
      if (rec.rank_Gm != k2) fail(rec, "GroundSpaceRank: rank G_m != k^2");

      if (rec.ok) {
        ChainInteraction interaction;
        interaction.n = tuple.n;
        interaction.components.push_back({m, gm.space.basis, 1.0, gm.injective});
        ChainHamiltonian HN = assemble(interaction, N, opts.dense_cap);
        KernelGapOptions kopts;
        kopts.tol_ker = opts.tol_ker;
        KernelGap kg = kernel_and_gap(HN, k2, kopts);
        rec.gap_N = kg.gap;
        rec.kernel_dim = k2;
        rec.dist_kernel_groundspace = kernel_groundspace_distance(tuple, kg, N);
        if (rec.dist_kernel_groundspace > 1e-8)
          fail(rec, "KernelMismatch: kernel differs from Ran Gamma_N");

        if (l) {
          GapConstants gc = gap_constants(tuple);
          if (!(std::max(gc.lbar, m) < *l && *l < N))
            fail(rec, "InvalidWindow: l outside (max{lbar,m}, N)");
          ChainHamiltonian Hl = assemble(interaction, *l, opts.dense_cap);
          rec.gap = kernel_and_gap(Hl, k2, kopts).gap;
        } else {
          rec.gap = rec.gap_N;
        }
      }
    } catch (const Error& e) {
      fail(rec, e.what());
    }
  });

  // Step continuity of the ground projectors: the Lipschitz scale comes from
  // a finer membership sweep (design default 101 points), times safety 3.
  {
    const int fine_n = std::max(grid_size, 101);
    std::vector<double> fine = uniform_grid(fine_n);
    std::vector<Matrix> fine_bases(fine_n);
    bool fine_ok = true;
    parallel_for(fine_n, opts.threads, [&](int i) {
      try {
        fine_bases[i] = gamma_matrix(path.evaluate(fine[i]), m).space.basis;
      } catch (const Error&) {
        fine_bases[i] = Matrix();
      }
    });
    double max_fine_step = 0.0;
    for (int i = 1; i < fine_n; ++i) {
      if (fine_bases[i].size() == 0 || fine_bases[i - 1].size() == 0 ||
          fine_bases[i].cols() != fine_bases[i - 1].cols()) {
        fine_ok = false;
        continue;
      }
      max_fine_step = std::max(
          max_fine_step, projector_distance(Subspace{fine_bases[i - 1]}, Subspace{fine_bases[i]}));
    }
    const double fine_spacing = 1.0 / (fine_n - 1);
    const double lipschitz = fine_ok ? 3.0 * max_fine_step / fine_spacing : 0.0;
    const double spacing = 1.0 / (grid_size - 1);
    const double threshold = std::max(10.0 * spacing * lipschitz, 1e-8);
    for (int i = 1; i < grid_size; ++i) {
      auto& rec = cert.records[i];
      if (gm_bases[i].size() == 0 || gm_bases[i - 1].size() == 0) continue;
      if (gm_bases[i].cols() != gm_bases[i - 1].cols()) {
        fail(rec, "ProjectorRankJump: rank changed between grid points");
        continue;
      }
      rec.proj_step =
          projector_distance(Subspace{gm_bases[i - 1]}, Subspace{gm_bases[i]});
      if (fine_ok && rec.proj_step > threshold)
        fail(rec, "ProjectorJump: step exceeds the Lipschitz bound");
    }
  }

  cert.pass = true;
  cert.uniform_gap = std::numeric_limits<double>::infinity();
  for (const auto& rec : cert.records) {
    if (!rec.ok) {
      cert.pass = false;
      cert.failures.push_back("t=" + std::to_string(rec.t) + ": " + rec.failure);
    }
    if (rec.kernel_dim > 0) cert.uniform_gap = std::min(cert.uniform_gap, rec.gap);
  }
  if (!std::isfinite(cert.uniform_gap)) cert.uniform_gap = 0.0;
  if (cert.uniform_gap <= 0.0) cert.pass = false;

  // finite surrogate for the uniform transfer-operator decay along the path
  if (cert.pass) {
    try {
      std::vector<SpectralData> samples(grid_size);
      parallel_for(grid_size, opts.threads, [&](int i) {
        samples[i] = spectral_data(path.evaluate(cert.grid[i]));
      });
      PathDecay decay = uniform_path_decay(samples);
      cert.decay_lambda = decay.lambda_unif;
      cert.decay_c = decay.c_unif;
    } catch (const Error&) {
      // decay surrogate is informational; certificates stay valid without it
    }
  }
  return cert;
}

SmoothnessReport smoothness_probe(const MatrixPath& path, int probe_points) {
  const double h = 1e-5;
  SmoothnessReport report;

  auto eval = [&](double t) { return path.evaluate(std::clamp(t, 0.0, 1.0)); };
  auto central = [&](double t, double step) {
    return tuple_lincomb(1.0 / (2.0 * step), eval(t + step), -1.0 / (2.0 * step), eval(t - step));
  };
  auto richardson = [&](double t, double step) {
    return tuple_lincomb(4.0 / 3.0, central(t, step / 2.0), -1.0 / 3.0, central(t, step));
  };

  for (int i = 0; i < probe_points; ++i) {
    double t = static_cast<double>(i + 1) / (probe_points + 1);
    for (double bp : path.breakpoints)
      while (std::abs(t - bp) < 10.0 * h) t += 12.0 * h;
    if (t >= 1.0 - 10.0 * h) t = 1.0 - 20.0 * h;
    if (t <= 10.0 * h) t = 20.0 * h;

    KrausTuple est1 = richardson(t, h);
    KrausTuple est2 = richardson(t, h / 2.0);
    const double n1 = tuple_norm(est1);
    const double n2 = tuple_norm(est2);
    const double change = tuple_norm(tuple_lincomb(1.0, est1, -1.0, est2));
    SmoothnessRow row;
    row.t = t;
    row.deriv_norm = n2;
    row.stabilization =
        (n1 < 1e-9 && n2 < 1e-9) ? 1.0 : 1.0 + change / std::max(n1, n2);
    report.rows.push_back(row);
  }

  for (double bp : path.breakpoints) {
    SmoothnessRow row;
    row.t = bp;
    row.breakpoint = true;
    // one-sided second-order differences
    KrausTuple right = tuple_lincomb(
        1.0 / (2.0 * h),
        tuple_lincomb(-3.0, eval(bp), 4.0, eval(bp + h)), -1.0 / (2.0 * h), eval(bp + 2 * h));
    KrausTuple left = tuple_lincomb(
        1.0 / (2.0 * h),
        tuple_lincomb(3.0, eval(bp), -4.0, eval(bp - h)), 1.0 / (2.0 * h), eval(bp - 2 * h));
    row.right_norm = tuple_norm(right);
    row.left_norm = tuple_norm(left);
    row.jump = tuple_norm(tuple_lincomb(1.0, right, -1.0, left));
    row.deriv_norm = std::max(row.left_norm, row.right_norm);
    report.rows.push_back(row);
  }
  return report;
}

GapCertificate mixed_length_certificate(const KrausTuple& B, int m, int m2, int N, int grid_size,
                                        const CertifyOptions& opts) {
  if (m == m2) throw Error(ErrorCode::InvalidArgument, "mixing needs m != m'");
  if (N < std::max(m, m2))
    throw Error(ErrorCode::InvalidArgument, "chain shorter than the interaction range");
  SpectralData sd = spectral_data(B);
  if (std::abs(sd.r - 1.0) > 1e-8)
    throw Error(ErrorCode::NotNormalized, "mixing certificate needs spectral radius 1");
  const int k2 = B.k * B.k;

  GapCertificate cert;
  cert.kind = "mixed-lengths";
  cert.m = m;
  cert.m2 = m2;
  cert.N = N;
  cert.grid_size = grid_size;
  cert.seed = opts.seed;
  cert.tol_ker = opts.tol_ker;
  cert.grid = uniform_grid(grid_size);
  cert.records.resize(grid_size);

  KernelGapOptions kopts;
  kopts.tol_ker = opts.tol_ker;

  // endpoint gaps for the recorded convex-combination bound
  double gap_m = std::numeric_limits<double>::quiet_NaN();
  double gap_m2 = std::numeric_limits<double>::quiet_NaN();
  try {
    gap_m = kernel_and_gap(
                assemble(build_interaction(B, m, true), N, opts.dense_cap), k2, kopts)
                .gap;
  } catch (const Error&) {
  }
  try {
    gap_m2 = kernel_and_gap(
                 assemble(build_interaction(B, m2, true), N, opts.dense_cap), k2, kopts)
                 .gap;
  } catch (const Error&) {
  }

  const double sigma_min = smallest_singular_value(B.B[0]);
  parallel_for(grid_size, opts.threads, [&](int i) {
    const double t = cert.grid[i];
    PathCertRecord& rec = cert.records[i];
    rec.t = t;
    rec.r = sd.r;
    rec.s = sd.s.value_or(-1);
    rec.sigma_min_B1 = sigma_min;
    rec.convex_bound = (1.0 - t) * gap_m + t * gap_m2;
    try {
      ChainHamiltonian H =
          mixed_length_hamiltonian(B, m, m2, t, N, opts.dense_cap, /*accept=*/true);
      KernelGap kg = kernel_and_gap(H, k2, kopts);
      rec.gap = kg.gap;
      rec.gap_N = kg.gap;
      rec.kernel_dim = k2;
      rec.dist_kernel_groundspace = kernel_groundspace_distance(B, kg, N);
      if (rec.dist_kernel_groundspace > 1e-8)
        fail(rec, "KernelMismatch: kernel differs from Ran Gamma_N");
      if (!(rec.gap > 0.0)) fail(rec, "GapClosed: no positive gap");
    } catch (const Error& e) {
      fail(rec, e.what());
    }
  });

  cert.pass = true;
  cert.uniform_gap = std::numeric_limits<double>::infinity();
  for (const auto& rec : cert.records) {
    if (!rec.ok) {
      cert.pass = false;
      cert.failures.push_back("t=" + std::to_string(rec.t) + ": " + rec.failure);
    }
    if (rec.kernel_dim > 0) cert.uniform_gap = std::min(cert.uniform_gap, rec.gap);
  }
  if (!std::isfinite(cert.uniform_gap)) cert.uniform_gap = 0.0;
  if (cert.uniform_gap <= 0.0) cert.pass = false;
  return cert;
}

}  // namespace gapflow
