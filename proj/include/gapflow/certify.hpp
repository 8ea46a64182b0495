#ifndef GAPFLOW_CERTIFY_HPP
#define GAPFLOW_CERTIFY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gapflow/hamiltonian.hpp"
#include "gapflow/pathlab.hpp"
#include "gapflow/types.hpp"

namespace gapflow {

struct PathCertRecord {
  double t = 0.0;
  double r = 0.0;
  int s = -1;
  double sigma_min_B1 = 0.0;
  double gap = 0.0;    // gamma_{l,m}(t) when l is given, else the N-window gap
  double gap_N = 0.0;
  int kernel_dim = 0;
  double proj_step = 0.0;               // ||G_m(t_i) - G_m(t_{i-1})||
  double dist_kernel_groundspace = 0.0;
  int rank_Gm = 0;
  double convex_bound = 0.0;            // mixed-length sweeps only
  bool ok = true;
  std::string failure;
};

struct GapCertificate {
  std::string kind;  // "path" or "mixed-lengths"
  int m = 0;
  std::optional<int> l;
  std::optional<int> m2;
  int N = 0;
  int grid_size = 0;
  std::uint64_t seed = 0;
  double tol_ker = 1e-8;
  std::string norm = "hilbert-schmidt-induced operator norm";
  std::string method = "grid-evidence";  // no claim between samples
  std::vector<double> grid;
  std::vector<PathCertRecord> records;
  std::vector<double> breakpoints;
  double uniform_gap = 0.0;
  bool pass = false;
  std::vector<std::string> failures;
  // measured decay surrogate for the compactness argument: max lambda2 over
  // the grid plus margin, and the matching prefactor (path sweeps only)
  double decay_lambda = 0.0;
  double decay_c = 0.0;
};

struct CertifyOptions {
  double tol_ker = 1e-8;
  int threads = 0;  // 0 or 1 = sequential
  std::uint64_t seed = 0;
  long long dense_cap = kDefaultDenseCap;
};

// Grid sweep over a normalized path: r = 1, Wielandt index <= m-1 (so the
// intersection property holds at range m), ground-projector rank k^2 with
// step continuity, kernel identification and gap on [0, N-1], and the
// gamma_{l,m} window when l is given. Failures are embedded per record.
GapCertificate verify_path(const MatrixPath& path, int m, std::optional<int> l,
                           int N, int grid_size, const CertifyOptions& opts = {});

struct SmoothnessRow {
  double t = 0.0;
  double deriv_norm = 0.0;
  double stabilization = 1.0;  // 1 + relative change between h and h/2 estimates
  bool breakpoint = false;
  double left_norm = 0.0;   // one-sided data at breakpoints
  double right_norm = 0.0;
  double jump = 0.0;
};

struct SmoothnessReport {
  std::vector<SmoothnessRow> rows;
};

SmoothnessReport smoothness_probe(const MatrixPath& path, int probe_points);

// Kernel constancy and positive gap for (1-t) H_m + t H_{m'} on [0, N-1];
// the convex combination of the endpoint gaps is recorded alongside the
// measured gap.
GapCertificate mixed_length_certificate(const KrausTuple& B, int m, int m2,
                                        int N, int grid_size,
                                        const CertifyOptions& opts = {});

}  // namespace gapflow

#endif
