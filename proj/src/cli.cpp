#include "gapflow/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "gapflow/certify.hpp"
#include "gapflow/edgestates.hpp"
#include "gapflow/groundspace.hpp"
#include "gapflow/hamiltonian.hpp"
#include "gapflow/pathlab.hpp"
#include "gapflow/serialize.hpp"
#include "gapflow/transfer.hpp"

namespace gapflow {

namespace {

namespace fs = std::filesystem;

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GAPFLOW_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return buf;
}

fs::path make_run_dir(const RunConfig& config) {
  fs::path dir = fs::path(config.out) / (config.command + "-" + timestamp());
  // avoid collisions from repeated runs within one second
  fs::path candidate = dir;
  int suffix = 1;
  while (fs::exists(candidate)) candidate = dir.string() + "-" + std::to_string(suffix++);
  fs::create_directories(candidate);
  return candidate;
}

NamedTuple load_input(const std::string& path) {
  return parse_tuple_file(read_text_file(path));
}

void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::InvalidArgument, message);
}

int cmd_analyze(const RunConfig& config, const fs::path& dir) {
  NamedTuple in = load_input(config.input);
  SpectralData sd = spectral_data(in.tuple);
  std::optional<GapConstants> gc;
  if (sd.primitive && std::abs(sd.r - 1.0) <= 1e-8) gc = gap_constants(in.tuple, sd);
  Json report = spectral_report_json(in.tuple, sd, gc);
  if (sd.s) report["certified_intersection_m"] = *sd.s + 1;
  write_text_file((dir / "report.json").string(), report.dump(2) + "\n");
  std::cout << "report: " << (dir / "report.json").string() << "\n";
  return 0;
}

int cmd_groundspace(const RunConfig& config, const fs::path& dir) {
  NamedTuple in = load_input(config.input);
  require(config.m >= 1, "--m is required");
  const int N_max = config.N >= config.m ? config.N : config.m + 4;
  IntersectionReport report = intersection_check(in.tuple, config.m, N_max);
  Json j;
  j["tool"] = {{"name", "gapflow"}, {"version", "1.0.0"}};
  j["m"] = config.m;
  j["N_max"] = N_max;
  j["certified_m"] = report.certified_m;
  j["certified_for_all_N"] = true;
  j["empirical_pass"] = report.pass;
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    GroundSpace gs = gamma_matrix(in.tuple, row.N);
    rows.push_back({{"N", row.N},
                    {"distance", row.distance},
                    {"dim_intersection", row.dim_intersection},
                    {"dim_gamma", row.dim_gamma},
                    {"injective", gs.injective},
                    {"sigma_min", gs.sigma_min}});
  }
  j["rows"] = rows;
  write_text_file((dir / "report.json").string(), j.dump(2) + "\n");
  std::cout << "report: " << (dir / "report.json").string() << "\n";
  return report.pass ? 0 : 1;
}

int cmd_gap(const RunConfig& config, const fs::path& dir) {
  NamedTuple in = load_input(config.input);
  require(config.m >= 1 && config.l >= 1 && config.N >= 1, "--m, --l, --N are required");
  GapInequalityReport gr = certify_gap_inequality(in.tuple, config.m, config.l, config.N,
                                                  !config.allow_outside_window, config.dense_cap);
  ChainHamiltonian H = assemble(build_interaction(in.tuple, config.m), config.N, config.dense_cap);
  KernelGapOptions kopts;
  kopts.tol_ker = config.tol_ker;
  KernelGap kg = kernel_and_gap(H, in.tuple.k * in.tuple.k, kopts);
  const double dist = kernel_groundspace_distance(in.tuple, kg, config.N);

  Json j;
  j["tool"] = {{"name", "gapflow"}, {"version", "1.0.0"}};
  j["norm"] = "hilbert-schmidt-induced operator norm";
  j["m"] = config.m;
  j["l"] = config.l;
  j["N"] = config.N;
  j["tol_ker"] = config.tol_ker;
  j["gamma_lm"] = gr.gamma_lm;
  j["prefactor"] = gr.prefactor;
  j["lbar"] = gr.lbar;
  j["window_valid"] = gr.window_valid;
  j["margin"] = gr.margin;
  j["gap_N"] = kg.gap;
  j["kernel_dim"] = kg.kernel.dim();
  j["dist_kernel_groundspace"] = dist;
  const bool pass = gr.margin >= -1e-9 && dist <= 1e-8;
  j["pass"] = pass;
  write_text_file((dir / "report.json").string(), j.dump(2) + "\n");
  std::cout << "report: " << (dir / "report.json").string() << "\n";
  return pass ? 0 : 1;
}

int cmd_edge(const RunConfig& config, const fs::path& dir) {
  NamedTuple in = load_input(config.input);
  require(config.m >= 1, "--m is required");
  const KrausTuple& B = in.tuple;
  SpectralData sd = spectral_data(B);
  const int shifts = 3;

  Json j;
  j["tool"] = {{"name", "gapflow"}, {"version", "1.0.0"}};
  j["m"] = config.m;

  bool pass = true;
  {
    Json rows = Json::array();
    for (int trial = 0; trial < 5; ++trial) {
      Matrix G = random_gaussian_matrix(B.k, B.k, config.seed + trial);
      Matrix omega = G * G.adjoint();
      omega /= omega.trace().real();
      const double right =
          frustration_check(B, config.m, EdgeStateSpec{Side::Right, omega}, shifts);
      const double left =
          frustration_check(B, config.m, EdgeStateSpec{Side::Left, omega}, shifts);
      rows.push_back({{"trial", trial}, {"right", right}, {"left", left}});
      if (right > 1e-9 || left > 1e-9) pass = false;
    }
    j["frustration"] = rows;
    const double bulk = frustration_check(B, config.m, std::nullopt, shifts);
    j["frustration_bulk"] = bulk;
    if (bulk > 1e-9) pass = false;
  }
  {
    const int a = sd.s.value_or(2);
    const int rank = surjectivity_check(B, a);
    j["surjectivity"] = {{"a", a}, {"rank", rank}, {"expected", B.k * B.k}};
    if (rank != B.k * B.k) pass = false;
  }
  {
    Matrix A0 = Matrix::Zero(B.n, B.n);
    for (int i = 0; i < B.n; ++i) A0(i, i) = static_cast<double>(i + 1) / B.n;
    LocalObservable obs{0, 0, A0};
    std::vector<int> Ns;
    const int N_hi = config.N >= 3 ? config.N : 9;
    for (int N = 3; N <= N_hi; ++N) Ns.push_back(N);
    DecayTable table =
        boundary_limit_check(B, Matrix::Identity(B.k, B.k), obs, Ns);
    Json rows = Json::array();
    for (const auto& row : table.rows) rows.push_back({{"N", row.N}, {"d", row.d}});
    j["boundary_limit"] = {
        {"rows", rows}, {"K", table.K}, {"lambda2", table.lambda2}, {"pass", table.pass}};
    if (!table.pass) pass = false;
  }
  j["pass"] = pass;
  write_text_file((dir / "report.json").string(), j.dump(2) + "\n");
  std::cout << "report: " << (dir / "report.json").string() << "\n";
  return pass ? 0 : 1;
}

int cmd_connect(const RunConfig& config, const fs::path& dir, bool verify) {
  NamedTuple a = load_input(config.input);
  require(!config.input_b.empty(), "--input-b is required");
  NamedTuple b = load_input(config.input_b);
  const int k = a.tuple.k;
  const int m = config.m >= 1 ? config.m : 2 * k * (k - 1) + 3;

  MatrixPath path = connect(a.tuple, b.tuple, m, config.seed);
  MatrixPath normalized = normalize_path(path);
  write_text_file((dir / "path.json").string(), matrix_path_json(normalized).dump(2) + "\n");

  if (!verify) {
    std::cout << "path: " << (dir / "path.json").string() << "\n";
    return 0;
  }

  require(config.N >= m, "--N is required and must be >= m");
  CertifyOptions opts;
  opts.tol_ker = config.tol_ker;
  opts.threads = resolve_threads(config.threads);
  opts.seed = config.seed;
  opts.dense_cap = config.dense_cap;
  std::optional<int> l;
  if (config.l >= 1) l = config.l;
  GapCertificate cert = verify_path(normalized, m, l, config.N, config.grid, opts);
  write_text_file((dir / "certificate.json").string(), certificate_json(cert).dump(2) + "\n");
  write_text_file((dir / "gaps.csv").string(), certificate_csv(cert));
  std::cout << "certificate: " << (dir / "certificate.json").string() << "\n";
  return cert.pass ? 0 : 1;
}

int cmd_mix_lengths(const RunConfig& config, const fs::path& dir) {
  NamedTuple in = load_input(config.input);
  require(config.m >= 1 && config.m2 >= 1, "--m and --m2 are required");
  require(config.N >= std::max(config.m, config.m2), "--N is required and must cover both ranges");
  CertifyOptions opts;
  opts.tol_ker = config.tol_ker;
  opts.threads = resolve_threads(config.threads);
  opts.seed = config.seed;
  opts.dense_cap = config.dense_cap;
  GapCertificate cert =
      mixed_length_certificate(in.tuple, config.m, config.m2, config.N, config.grid, opts);
  write_text_file((dir / "certificate.json").string(), certificate_json(cert).dump(2) + "\n");
  write_text_file((dir / "gaps.csv").string(), certificate_csv(cert));
  std::cout << "certificate: " << (dir / "certificate.json").string() << "\n";
  return cert.pass ? 0 : 1;
}

}  // namespace

int run(const RunConfig& config) {
  try {
    fs::path dir = make_run_dir(config);
    if (!config.input.empty())
      write_text_file((dir / "input.json").string(),
                      serialize_tuple(load_input(config.input)));
    if (!config.input_b.empty())
      write_text_file((dir / "input_b.json").string(),
                      serialize_tuple(load_input(config.input_b)));

    if (config.command == "analyze") return cmd_analyze(config, dir);
    if (config.command == "groundspace") return cmd_groundspace(config, dir);
    if (config.command == "gap") return cmd_gap(config, dir);
    if (config.command == "edge") return cmd_edge(config, dir);
    if (config.command == "connect") return cmd_connect(config, dir, /*verify=*/false);
    if (config.command == "verify-path") return cmd_connect(config, dir, /*verify=*/true);
    if (config.command == "mix-lengths") return cmd_mix_lengths(config, dir);
    std::cerr << "unknown command: " << config.command << "\n";
    return 2;
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::KernelDimensionMismatch:
      case ErrorCode::MembershipLost:
      case ErrorCode::RetriesExhausted:
      case ErrorCode::NotPrimitiveAt:
        std::cerr << "certified failure: " << e.what() << "\n";
        return 1;
      default:
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace gapflow
