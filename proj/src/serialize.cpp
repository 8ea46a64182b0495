#include "gapflow/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gapflow {

Json complex_to_json(const Complex& z) {
  return Json::array({z.real(), z.imag()});
}

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::ParseError, "complex entries must be [re, im] pairs");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(complex_to_json(M(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, "matrix must be a 2-d array");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Matrix M(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Index>(j[r].size()) != cols)
      throw Error(ErrorCode::ParseError, "ragged matrix rows");
    for (Index c = 0; c < cols; ++c) M(r, c) = complex_from_json(j[r][c]);
  }
  return M;
}

NamedTuple parse_tuple_file(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!j.contains("n") || !j.contains("k") || !j.contains("matrices"))
    throw Error(ErrorCode::ParseError, "tuple file needs n, k and matrices");
  NamedTuple out;
  out.tuple.n = j["n"].get<int>();
  out.tuple.k = j["k"].get<int>();
  if (!j["matrices"].is_array() || j["matrices"].empty())
    throw Error(ErrorCode::ParseError, "matrices must be a nonempty list");
  for (const auto& mj : j["matrices"]) {
    Matrix M = matrix_from_json(mj);
    if (M.rows() != out.tuple.k || M.cols() != out.tuple.k)
      throw Error(ErrorCode::ShapeError, "matrix shape is not k x k");
    out.tuple.B.push_back(M);
  }
  if (j.contains("name")) out.name = j["name"].get<std::string>();
  if (j.contains("seed")) out.seed = j["seed"].get<std::uint64_t>();
  out.tuple.validate();
  return out;
}

std::string serialize_tuple(const NamedTuple& tuple) {
  Json j;
  if (tuple.name) j["name"] = *tuple.name;
  j["n"] = tuple.tuple.n;
  j["k"] = tuple.tuple.k;
  if (tuple.seed) j["seed"] = *tuple.seed;
  Json mats = Json::array();
  for (const auto& M : tuple.tuple.B) mats.push_back(matrix_to_json(M));
  j["matrices"] = mats;
  return j.dump(2) + "\n";
}

namespace {

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

}  // namespace

Json spectral_report_json(const KrausTuple& B, const SpectralData& sd,
                          const std::optional<GapConstants>& gc) {
  Json j;
  j["tool"] = {{"name", "gapflow"}, {"version", "1.0.0"}};
  j["norm"] = "hilbert-schmidt-induced operator norm";
  j["tolerances"] = {{"rank", "1e-10 * sigma_max * max(rows, cols)"},
                     {"perron_cluster", 1e-8},
                     {"envelope_cutoff", 1e-14}};
  j["n"] = B.n;
  j["k"] = B.k;
  j["r"] = sd.r;
  j["eigenvalues"] = vector_to_json(sd.eigenvalues);
  j["e"] = matrix_to_json(sd.e);
  j["rho"] = matrix_to_json(sd.rho);
  j["a"] = sd.a;
  j["c"] = sd.c;
  j["lambda2"] = sd.lambda2;
  j["primitive"] = sd.primitive;
  if (sd.s) j["s"] = *sd.s;
  if (gc) {
    j["E"] = gc->E;
    j["E_sup"] = gc->E_sup;
    j["F"] = gc->F;
    j["L"] = gc->L;
    j["lbar"] = gc->lbar;
    j["envelope"] = {{"C", gc->envelope_C}, {"rate", gc->envelope_rate}};
  }
  return j;
}

Json certificate_json(const GapCertificate& cert) {
  Json j;
  j["tool"] = {{"name", "gapflow"}, {"version", "1.0.0"}};
  j["kind"] = cert.kind;
  Json params;
  params["m"] = cert.m;
  if (cert.l) params["l"] = *cert.l;
  if (cert.m2) params["m2"] = *cert.m2;
  params["N"] = cert.N;
  params["grid"] = cert.grid_size;
  params["seed"] = cert.seed;
  params["tol_ker"] = cert.tol_ker;
  params["norm"] = cert.norm;
  params["method"] = cert.method;
  j["params"] = params;
  j["breakpoints"] = cert.breakpoints;
  Json records = Json::array();
  for (const auto& rec : cert.records) {
    Json r;
    r["t"] = rec.t;
    r["r"] = rec.r;
    r["s"] = rec.s;
    r["sigma_min_B1"] = rec.sigma_min_B1;
    r["gap"] = rec.gap;
    r["gap_N"] = rec.gap_N;
    r["kernel_dim"] = rec.kernel_dim;
    r["rank_Gm"] = rec.rank_Gm;
    r["proj_step"] = rec.proj_step;
    r["dist_kernel_groundspace"] = rec.dist_kernel_groundspace;
    if (cert.kind == "mixed-lengths") r["convex_bound"] = rec.convex_bound;
    r["ok"] = rec.ok;
    if (!rec.ok) r["failure"] = rec.failure;
    records.push_back(r);
  }
  j["records"] = records;
  j["uniform_gap"] = cert.uniform_gap;
  if (cert.kind == "path" && cert.decay_lambda > 0.0)
    j["uniform_decay"] = {{"lambda", cert.decay_lambda}, {"c", cert.decay_c}};
  j["pass"] = cert.pass;
  j["failures"] = cert.failures;
  return j;
}

std::string certificate_csv(const GapCertificate& cert) {
  std::string out = "t,r,s,sigma_min_B1,gap,kernel_dim\n";
  char buf[256];
  for (const auto& rec : cert.records) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%.17g,%.17g,%d\n", rec.t, rec.r, rec.s,
                  rec.sigma_min_B1, rec.gap, rec.kernel_dim);
    out += buf;
  }
  return out;
}

Json planar_curve_json(const PlanarCurve& c) {
  Json j;
  switch (c.kind) {
    case PlanarCurve::Kind::Line: j["kind"] = "line"; break;
    case PlanarCurve::Kind::DetourArc: j["kind"] = "detour-arc"; break;
    case PlanarCurve::Kind::RandomBump: j["kind"] = "random-bump"; break;
  }
  j["start"] = complex_to_json(c.start);
  j["end"] = complex_to_json(c.end);
  if (c.kind == PlanarCurve::Kind::DetourArc) j["detour_amp"] = c.detour_amp;
  if (c.kind == PlanarCurve::Kind::RandomBump) {
    Json bumps = Json::array();
    for (const auto& b : c.bumps)
      bumps.push_back({{"center", b.center}, {"width", b.width}, {"amp", complex_to_json(b.amp)}});
    j["bumps"] = bumps;
  }
  return j;
}

Json sk_path_json(const SkPath& p) {
  Json j;
  Json coords = Json::array();
  for (const auto& c : p.coords) coords.push_back(planar_curve_json(c));
  j["coords"] = coords;
  j["min_margin"] = p.min_margin;
  j["retries"] = p.retries;
  return j;
}

namespace {

Json tuple_json(const KrausTuple& t) {
  Json mats = Json::array();
  for (const auto& M : t.B) mats.push_back(matrix_to_json(M));
  return Json{{"n", t.n}, {"k", t.k}, {"matrices", mats}};
}

}  // namespace

Json path_segment_json(const PathSegment& seg) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        Json j;
        if constexpr (std::is_same_v<T, JordanApproachSeg>) {
          j["kind"] = "jordan-approach";
          j["base"] = tuple_json(s.A);
          j["R"] = matrix_to_json(s.jordan.R);
          Json blocks = Json::array();
          for (const auto& [lam, len] : s.jordan.blocks)
            blocks.push_back({{"lambda", complex_to_json(lam)}, {"size", len}});
          j["blocks"] = blocks;
          j["exponents"] = s.exponents;
          j["delta"] = s.delta;
        } else if constexpr (std::is_same_v<T, InsideZSeg>) {
          j["kind"] = "inside-z";
          j["start"] = tuple_json(s.A);
          j["end"] = tuple_json(s.E);
          j["P_A"] = matrix_to_json(s.P_A);
          j["P_E"] = matrix_to_json(s.P_E);
          j["eigen_path"] = sk_path_json(s.eigen_path);
          Json entries = Json::array();
          for (const auto& c : s.entry_paths) entries.push_back(planar_curve_json(c));
          j["entry_paths"] = entries;
          j["gl"] = {{"phi", s.phi}, {"log", matrix_to_json(s.W)}};
          Json tails = Json::array();
          for (size_t i = 0; i < s.tail_A.size(); ++i)
            tails.push_back(
                {{"from", matrix_to_json(s.tail_A[i])}, {"to", matrix_to_json(s.tail_E[i])}});
          j["tails"] = tails;
        } else if constexpr (std::is_same_v<T, ReversedSeg>) {
          j["kind"] = "reversed";
          j["inner"] = path_segment_json(*s.inner);
        } else {
          j["kind"] = "constant-reparam";
          j["a"] = s.a;
          j["b"] = s.b;
          j["inner"] = path_segment_json(*s.inner);
        }
        return j;
      },
      seg.node);
}

Json matrix_path_json(const MatrixPath& path) {
  Json j;
  j["n"] = path.n;
  j["k"] = path.k;
  j["normalized"] = path.normalized;
  j["ramped"] = path.ramped;
  j["breakpoints"] = path.breakpoints;
  Json segs = Json::array();
  for (const auto& entry : path.entries) {
    Json e;
    e["t0"] = entry.t0;
    e["t1"] = entry.t1;
    e["segment"] = path_segment_json(entry.segment);
    segs.push_back(e);
  }
  j["segments"] = segs;
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  out << content;
}

}  // namespace gapflow
