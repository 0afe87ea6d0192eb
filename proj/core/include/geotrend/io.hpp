#pragma once

// File formats: versioned JSON documents, the plain-text landmark layout of
// the rat calvaria data, generic landmark CSV, run manifests and schema
// validation of everything written.

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geotrend/geodesic_space.hpp"
#include "geotrend/regression.hpp"

namespace geotrend::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kFormatVersion = "1.0";

/// {"type": "sphere", "dim": d} or {"type": "kendall", "m": m, "k": k}.
struct ManifoldSpec {
  std::string type = "kendall";
  int dim = 2;
  int m = 2;
  int k = 3;

  std::unique_ptr<Manifold> make() const;
  /// Shape of one raw observation: (m, k) for kendall, (dim + 1, 1) for sphere.
  int rows() const;
  int cols() const;
};

struct Subject {
  std::string id;
  std::string group;  ///< empty when absent
  std::vector<double> times;
  /// Raw observations, rows() x cols(); landmarks are columns.
  std::vector<Mat> observations;
};

struct TrajectoryFile {
  std::string format_version = kFormatVersion;
  ManifoldSpec manifold;
  std::vector<Subject> subjects;
};

Json to_json(const ManifoldSpec& spec);
ManifoldSpec manifold_from_json(const Json& j);

/// Schema-checked conversions; from_json also checks shapes and strictly
/// increasing times, throwing Schema errors naming the offending subject.
Json to_json(const TrajectoryFile& file);
TrajectoryFile trajectory_from_json(const Json& j);
void check_trajectory_file(const TrajectoryFile& file);

/// Raw observation to a manifold point: pre-shape for kendall, the unit
/// vector itself (checked) for sphere.
Vec to_point(const ManifoldSpec& spec, const Mat& raw);
Trajectory to_trajectory(const ManifoldSpec& spec, const Subject& subject);

/// Points are written as landmark rows [[x, y], ...] for kendall and as flat
/// arrays for sphere.
Json point_to_json(const ManifoldSpec& spec, const Vec& p);
Vec point_from_json(const ManifoldSpec& spec, const Json& j);
Json geodesic_to_json(const ManifoldSpec& spec, const GeodesicPoint& g);
GeodesicPoint geodesic_from_json(const ManifoldSpec& spec, const Json& j);

/// {"format_version", "manifold", "geodesic": {"x", "y"}}.
struct GeodesicFile {
  ManifoldSpec manifold;
  GeodesicPoint geodesic;
};
GeodesicFile geodesic_file_from_json(const Json& j);
Json to_json(const GeodesicFile& file);

/// Landmark text layout (see docs/rats_format.md):
///   <n_subjects> <n_times> <n_landmarks>
/// then n_subjects * n_times records, each a header line
/// "<subject_id> <time> [group]" followed by n_landmarks lines "<x> <y>".
/// '#' starts a comment. Throws Parse errors with line numbers.
TrajectoryFile parse_rats(std::string_view text);
std::string format_rats(const TrajectoryFile& file);

/// Header row naming at least subject, time, landmark, x, y (optional z,
/// group), one landmark per row. Landmark indices are 0- or 1-based and
/// must be contiguous per observation.
TrajectoryFile parse_landmark_csv(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
Json read_json(const std::filesystem::path& path);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Embedded schema by file name, e.g. "trajectory.schema.json".
const Json& schema(std::string_view name);
std::vector<std::string> schema_names();
/// Violations of the supported draft-07 subset, empty when valid.
std::vector<std::string> validate(const Json& doc, const Json& schema);
/// Throws Schema listing the violations.
void require_valid(const Json& doc, std::string_view schema_name);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct InputDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  Json config = Json::object();
  std::uint64_t seed = 0;
  std::string rng;
  std::string library_version;
  std::vector<InputDigest> inputs;
  /// Timestamp metadata; excluded from determinism comparisons.
  std::string started_at;
  double wall_clock_seconds = 0.0;
};
Json to_json(const RunManifest& m);

/// UTC time as 2026-01-31T12:00:00Z.
std::string utc_timestamp();

}  // namespace geotrend::io
