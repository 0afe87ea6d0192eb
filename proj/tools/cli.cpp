#include "cli.hpp"

#include <charconv>
#include <cstdlib>

#include "geotrend/parallel.hpp"
#include "geotrend/random.hpp"
#include "geotrend/version.hpp"

namespace geotrend::cli {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
      return kUsage;
    case ErrorKind::Parse:
    case ErrorKind::Schema:
      return kSchema;
    case ErrorKind::NonConvergence:
      return kNonConvergence;
    case ErrorKind::Io:
      return kIo;
    case ErrorKind::Domain:
    case ErrorKind::DegenerateConfiguration:
    case ErrorKind::SingularFiber:
    case ErrorKind::UndefinedVariance:
      return kNumerical;
    case ErrorKind::Capability:
    case ErrorKind::Unsupported:
      return kCapability;
  }
  return kInternal;
}

std::string error_record(const std::string& kind, const std::string& message, int code) {
  const Json j = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  return j.dump();
}

std::uint64_t default_seed() {
  const char* env = std::getenv("GEOTREND_SEED");
  if (!env || !*env) return 1;
  std::uint64_t seed = 0;
  const std::string_view s(env);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::InvalidInput, "GEOTREND_SEED is not an unsigned integer: " + std::string(env));
  }
  return seed;
}

std::string cell(double v) { return io::format_double(v); }
std::string cell(long long v) { return std::to_string(v); }

std::string cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

Run::Run(std::string command, std::vector<std::string> arguments)
    : command_(std::move(command)),
      arguments_(std::move(arguments)),
      started_at_(io::utc_timestamp()),
      start_(std::chrono::steady_clock::now()) {}

void Run::add_input(const std::filesystem::path& path) {
  inputs_.push_back({path.string(), io::sha256_file(path)});
}

void Run::note_nonconvergence(const std::string& what) { nonconverged_.push_back(what); }

Json Run::manifest() const {
  io::RunManifest m;
  m.command = command_;
  m.arguments = arguments_;
  m.config = config_;
  m.seed = seed_;
  m.rng = kRngAlgorithm;
  m.library_version = kVersion;
  m.inputs = inputs_;
  m.started_at = started_at_;
  m.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  return io::to_json(m);
}

void Run::write(const std::string& kind, Json result, const std::filesystem::path& out,
                const CsvTable& csv) const {
  Json doc = {{"format_version", io::kFormatVersion},
              {"kind", kind},
              {"manifest", manifest()},
              {"result", std::move(result)}};
  write_document(std::move(doc), kind + "_result.schema.json", out, csv);
}

void Run::write_document(Json doc, const std::string& schema_name,
                         const std::filesystem::path& out, const CsvTable& csv) const {
  io::require_valid(doc, schema_name);
  io::write_file(out, doc.dump(2) + "\n");
  std::filesystem::path csv_path = out;
  csv_path.replace_extension(".csv");
  if (csv_path == out) csv_path += ".csv";
  io::write_file(csv_path, csv.str());
}

void Run::finish() const {
  if (nonconverged_.empty() || allow_nonconvergence_) return;
  std::string msg = "did not converge:";
  for (const auto& n : nonconverged_) msg += " " + n + ";";
  msg.pop_back();
  throw Error(ErrorKind::NonConvergence, msg);
}

io::TrajectoryFile load_trajectories(Run& run, const std::filesystem::path& path,
                                     const std::string& format) {
  std::string f = format;
  if (f.empty() || f == "auto") {
    const std::string ext = path.extension().string();
    f = ext == ".json" ? "json" : ext == ".csv" ? "csv" : "rats";
  }
  const std::string text = io::read_file(path);
  run.add_input(path);
  if (f == "json") {
    io::Json j;
    try {
      j = io::Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    return io::trajectory_from_json(j);
  }
  if (f == "csv") return io::parse_landmark_csv(text);
  if (f == "rats") return io::parse_rats(text);
  throw Error(ErrorKind::InvalidInput, "unknown input format '" + format + "'");
}

std::vector<FittedGeodesic> fit_subjects(const io::TrajectoryFile& file, int threads,
                                         const RegressionOptions& options) {
  const auto M = file.manifold.make();
  std::vector<FittedGeodesic> fits(file.subjects.size());
  parallel_for(fits.size(), threads, [&](std::size_t i) {
    fits[i] = geodesic_regression(*M, io::to_trajectory(file.manifold, file.subjects[i]), {},
                                   options);
  });
  return fits;
}

FitSet load_fits(Run& run, const std::filesystem::path& path, const std::string& format,
                 int threads) {
  if ((format.empty() || format == "auto" || format == "json") &&
      path.extension() == ".json") {
    const Json j = io::read_json(path);
    if (j.contains("kind") && j["kind"] == "regression") {
      run.add_input(path);
      io::require_valid(j, "regression_result.schema.json");
      FitSet set;
      set.manifold = io::manifold_from_json(j["result"]["manifold"]);
      const auto M = set.manifold.make();
      for (const auto& s : j["result"]["subjects"]) {
        SubjectFit f{s["id"].get<std::string>(), s.value("group", std::string()),
                     io::geodesic_from_json(set.manifold, s["geodesic"])};
        M->check_point(f.geodesic.x);
        M->check_point(f.geodesic.y);
        set.fits.push_back(std::move(f));
      }
      return set;
    }
  }
  const io::TrajectoryFile file = load_trajectories(run, path, format);
  const auto fitted = fit_subjects(file, threads);
  FitSet set;
  set.manifold = file.manifold;
  for (const auto& f : fitted) {
    if (!f.converged) run.note_nonconvergence("regression of subject " + f.subject_id);
    set.fits.push_back({f.subject_id, f.group, f.endpoints});
  }
  return set;
}

std::vector<std::string> geodesic_header(const io::ManifoldSpec& spec,
                                         const std::string& label_column) {
  std::vector<std::string> h{label_column, "endpoint", "landmark"};
  const int dims = spec.type == "sphere" ? spec.dim + 1 : spec.m;
  for (int c = 0; c < dims; ++c) h.push_back("c" + std::to_string(c));
  return h;
}

void append_geodesic_rows(CsvTable& table, const io::ManifoldSpec& spec,
                          const GeodesicPoint& g, const std::string& label) {
  for (const char* end : {"x", "y"}) {
    const Json p = io::point_to_json(spec, end[0] == 'x' ? g.x : g.y);
    if (spec.type == "sphere") {
      std::vector<std::string> row{cell(label), end, "0"};
      for (const auto& v : p) row.push_back(cell(v.get<double>()));
      table.rows.push_back(std::move(row));
      continue;
    }
    for (std::size_t l = 0; l < p.size(); ++l) {
      std::vector<std::string> row{cell(label), end, std::to_string(l)};
      for (const auto& v : p[l]) row.push_back(cell(v.get<double>()));
      table.rows.push_back(std::move(row));
    }
  }
}

}  // namespace geotrend::cli
