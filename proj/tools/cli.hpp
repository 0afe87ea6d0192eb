#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "geotrend/io.hpp"
#include "geotrend/regression.hpp"

namespace geotrend::cli {

using io::Json;

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kSchema = 3,
  kNonConvergence = 4,
  kIo = 5,
  kNumerical = 6,
  kCapability = 7,
};

int exit_code(ErrorKind kind);

/// {"error": {"kind", "message", "exit_code"}} on one line.
std::string error_record(const std::string& kind, const std::string& message, int code);

/// GEOTREND_SEED if set, else 1. Throws InvalidInput for unparsable values.
std::uint64_t default_seed();

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const;
};

std::string cell(double v);
std::string cell(long long v);
std::string cell(const std::string& s);

/// One command invocation: collects the manifest and writes results.
class Run {
 public:
  Run(std::string command, std::vector<std::string> arguments);

  void set_seed(std::uint64_t seed) { seed_ = seed; }
  Json& config() { return config_; }
  void add_input(const std::filesystem::path& path);

  /// Records a non-converged part of the computation; see finish().
  void note_nonconvergence(const std::string& what);
  void allow_nonconvergence(bool allow) { allow_nonconvergence_ = allow; }

  Json manifest() const;

  /// Validates {format_version, kind, manifest, result} against
  /// `<kind>_result.schema.json` and writes it to `out`, with `csv` next to
  /// it under the .csv extension.
  void write(const std::string& kind, Json result, const std::filesystem::path& out,
             const CsvTable& csv) const;
  void write_document(Json doc, const std::string& schema_name,
                      const std::filesystem::path& out, const CsvTable& csv) const;

  /// Throws NonConvergence after results were written, unless allowed.
  void finish() const;

 private:
  std::string command_;
  std::vector<std::string> arguments_;
  std::uint64_t seed_ = 0;
  Json config_ = Json::object();
  std::vector<io::InputDigest> inputs_;
  std::vector<std::string> nonconverged_;
  bool allow_nonconvergence_ = false;
  std::string started_at_;
  std::chrono::steady_clock::time_point start_;
};

/// Trajectory input by extension: .json trajectory documents, .csv landmark
/// tables, anything else the landmark text layout. `format` overrides with
/// json, csv or rats.
io::TrajectoryFile load_trajectories(Run& run, const std::filesystem::path& path,
                                     const std::string& format);

struct SubjectFit {
  std::string id;
  std::string group;
  GeodesicPoint geodesic;
};

struct FitSet {
  io::ManifoldSpec manifold;
  std::vector<SubjectFit> fits;
};

/// Fitted geodesics either read from a regression result document or fitted
/// from trajectory input.
FitSet load_fits(Run& run, const std::filesystem::path& path, const std::string& format,
                 int threads);

/// Per-subject fits in input order.
std::vector<FittedGeodesic> fit_subjects(const io::TrajectoryFile& file, int threads,
                                         const RegressionOptions& options = {});

/// Rows "<label>,<endpoint>,<landmark>,c0,c1,..." for a geodesic.
void append_geodesic_rows(CsvTable& table, const io::ManifoldSpec& spec,
                          const GeodesicPoint& g, const std::string& label);
std::vector<std::string> geodesic_header(const io::ManifoldSpec& spec,
                                         const std::string& label_column);

}  // namespace geotrend::cli
