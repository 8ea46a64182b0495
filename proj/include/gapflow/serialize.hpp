#ifndef GAPFLOW_SERIALIZE_HPP
#define GAPFLOW_SERIALIZE_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "gapflow/certify.hpp"
#include "gapflow/pathlab.hpp"
#include "gapflow/transfer.hpp"
#include "gapflow/types.hpp"

namespace gapflow {

using Json = nlohmann::ordered_json;

// Complex numbers are always [re, im] pairs.
Json complex_to_json(const Complex& z);
Complex complex_from_json(const Json& j);
Json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const Json& j);

struct NamedTuple {
  KrausTuple tuple;
  std::optional<std::string> name;
  std::optional<std::uint64_t> seed;
};

// Tuple file schema: {"n":., "k":., "matrices":[[[ [re,im], ...]]], "name"?, "seed"?}
NamedTuple parse_tuple_file(const std::string& text);
std::string serialize_tuple(const NamedTuple& tuple);

Json spectral_report_json(const KrausTuple& B, const SpectralData& sd,
                          const std::optional<GapConstants>& gc);
Json certificate_json(const GapCertificate& cert);
std::string certificate_csv(const GapCertificate& cert);

Json planar_curve_json(const PlanarCurve& c);
Json sk_path_json(const SkPath& p);
Json path_segment_json(const PathSegment& seg);
Json matrix_path_json(const MatrixPath& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace gapflow

#endif
