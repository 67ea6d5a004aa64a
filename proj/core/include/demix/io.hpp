#pragma once

#include "demix/certificate.hpp"
#include "demix/ensemble.hpp"
#include "demix/oracle.hpp"
#include "demix/solvers.hpp"
#include "demix/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>

namespace demix {

using Json = nlohmann::ordered_json;

// --- basic containers ------------------------------------------------------

/// {"re": [...], "im": [...]}.
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// {"blocks": [{"k", "n", "re", "im"}], "supports": [[...]]} with row-major
/// entry arrays and 0-based indices. supports is omitted when absent.
Json tuple_to_json(const MatrixTuple& t, const SupportPattern* support = nullptr);
MatrixTuple tuple_from_json(const Json& j);
std::optional<SupportPattern> support_from_json(const Json& j, const Profile& profile);

std::string convention_name(Convention c);
Convention convention_from_name(const std::string& name);

// --- reports ----------------------------------------------------------------

Json solve_report_to_json(const SolveReport& r);
Json certificate_to_json(const CertificateReport& r);
std::string certificate_csv_header();
std::string certificate_csv_row(const CertificateReport& r);
Json moment_report_to_json(const MomentReport& r);

// --- instance files ---------------------------------------------------------

/// One stored problem: the seeds that regenerate the ensemble (or embedded
/// dense arrays for cross-language replay), plus optional planted data.
struct ProblemInstance {
  Profile profile;
  Index q = 0;
  std::string frame_kind = "dft";
  std::uint64_t frame_seed = 0;
  std::uint64_t sketch_seed = 0;
  Convention convention = Convention::ComplexCircular;

  std::optional<SupportPattern> support;
  std::optional<MatrixTuple> planted;
  std::optional<Vector> measurements;
  double sigma = 0.0;
  std::optional<Vector> noise;

  /// Embedded sketches (and frames for the "random" kind) when present.
  std::optional<std::vector<Matrix>> dense_sketches;
  std::optional<std::vector<Matrix>> dense_frames;

  /// Rebuilds the ensemble, preferring embedded arrays over re-sampling.
  MeasurementEnsemble ensemble() const;
};

Json instance_to_json(const ProblemInstance& inst, bool embed_dense = false);
ProblemInstance instance_from_json(const Json& j);

Json load_json_file(const std::string& path);           // throws on I/O or parse
void save_json_file(const std::string& path, const Json& j);
void save_text_file(const std::string& path, const std::string& text);

}  // namespace demix
