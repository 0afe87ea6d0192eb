#include "geotrend/io.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "geotrend/kendall.hpp"
#include "geotrend/sphere.hpp"

namespace geotrend::io {

namespace {

[[noreturn]] void schema_error(const std::string& msg) {
  throw Error(ErrorKind::Schema, msg);
}

[[noreturn]] void parse_error(int line, const std::string& msg) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + msg);
}

bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_count(std::string_view s, long& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct TextLine {
  int number;
  std::vector<std::string> tokens;
};

std::vector<TextLine> tokenize(std::string_view text) {
  std::vector<TextLine> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    TextLine tl{number, {}};
    std::string tok;
    while (ls >> tok) tl.tokens.push_back(tok);
    if (!tl.tokens.empty()) out.push_back(std::move(tl));
  }
  return out;
}

void check_times(const Subject& s) {
  for (std::size_t i = 1; i < s.times.size(); ++i) {
    if (!(s.times[i] > s.times[i - 1])) {
      schema_error("subject '" + s.id + "': times are not strictly increasing");
    }
  }
}

}  // namespace

std::unique_ptr<Manifold> ManifoldSpec::make() const {
  if (type == "sphere") return std::make_unique<Sphere>(dim);
  if (type == "kendall") return std::make_unique<Kendall>(m, k);
  schema_error("unknown manifold type '" + type + "'");
}

int ManifoldSpec::rows() const { return type == "sphere" ? dim + 1 : m; }
int ManifoldSpec::cols() const { return type == "sphere" ? 1 : k; }

Json to_json(const ManifoldSpec& spec) {
  if (spec.type == "sphere") return {{"type", "sphere"}, {"dim", spec.dim}};
  return {{"type", spec.type}, {"m", spec.m}, {"k", spec.k}};
}

ManifoldSpec manifold_from_json(const Json& j) {
  ManifoldSpec s;
  s.type = j.at("type").get<std::string>();
  if (s.type == "sphere") {
    s.dim = j.at("dim").get<int>();
  } else if (s.type == "kendall") {
    s.m = j.at("m").get<int>();
    s.k = j.at("k").get<int>();
  } else {
    schema_error("unknown manifold type '" + s.type + "'");
  }
  return s;
}

namespace {

Json matrix_to_json(const ManifoldSpec& spec, const Mat& a) {
  Json out = Json::array();
  if (spec.type == "sphere") {
    for (Eigen::Index i = 0; i < a.rows(); ++i) out.push_back(a(i, 0));
    return out;
  }
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    Json row = Json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) row.push_back(a(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Mat matrix_from_json(const ManifoldSpec& spec, const Json& j, const std::string& where) {
  Mat a(spec.rows(), spec.cols());
  if (!j.is_array()) schema_error(where + ": expected an array");
  if (spec.type == "sphere") {
    if (static_cast<int>(j.size()) != spec.rows()) {
      schema_error(where + ": expected " + std::to_string(spec.rows()) + " coordinates");
    }
    for (int i = 0; i < spec.rows(); ++i) a(i, 0) = j[i].get<double>();
    return a;
  }
  if (static_cast<int>(j.size()) != spec.k) {
    schema_error(where + ": expected " + std::to_string(spec.k) + " landmarks, found " +
                 std::to_string(j.size()));
  }
  for (int c = 0; c < spec.k; ++c) {
    if (!j[c].is_array() || static_cast<int>(j[c].size()) != spec.m) {
      schema_error(where + ": landmark " + std::to_string(c) + " does not have " +
                   std::to_string(spec.m) + " coordinates");
    }
    for (int r = 0; r < spec.m; ++r) a(r, c) = j[c][r].get<double>();
  }
  return a;
}

}  // namespace

void check_trajectory_file(const TrajectoryFile& f) {
  std::set<std::string> ids;
  for (const auto& s : f.subjects) {
    if (!ids.insert(s.id).second) schema_error("duplicate subject id '" + s.id + "'");
    if (s.times.size() != s.observations.size()) {
      schema_error("subject '" + s.id + "': times and observations differ in length");
    }
    for (const auto& o : s.observations) {
      if (o.rows() != f.manifold.rows() || o.cols() != f.manifold.cols()) {
        schema_error("subject '" + s.id + "': observation has the wrong shape");
      }
      if (!o.allFinite()) schema_error("subject '" + s.id + "': non-finite coordinate");
    }
    check_times(s);
  }
}

Json to_json(const TrajectoryFile& f) {
  Json subjects = Json::array();
  for (const auto& s : f.subjects) {
    Json js{{"id", s.id}};
    if (!s.group.empty()) js["group"] = s.group;
    js["times"] = s.times;
    Json obs = Json::array();
    for (const auto& o : s.observations) obs.push_back(matrix_to_json(f.manifold, o));
    js["observations"] = std::move(obs);
    subjects.push_back(std::move(js));
  }
  return {{"format_version", f.format_version},
          {"manifold", to_json(f.manifold)},
          {"subjects", std::move(subjects)}};
}

TrajectoryFile trajectory_from_json(const Json& j) {
  require_valid(j, "trajectory.schema.json");
  TrajectoryFile f;
  f.format_version = j.at("format_version").get<std::string>();
  f.manifold = manifold_from_json(j.at("manifold"));
  for (const auto& js : j.at("subjects")) {
    Subject s;
    s.id = js.at("id").get<std::string>();
    if (js.contains("group")) s.group = js.at("group").get<std::string>();
    s.times = js.at("times").get<std::vector<double>>();
    int idx = 0;
    for (const auto& o : js.at("observations")) {
      s.observations.push_back(matrix_from_json(
          f.manifold, o, "subject '" + s.id + "' observation " + std::to_string(idx++)));
    }
    f.subjects.push_back(std::move(s));
  }
  check_trajectory_file(f);
  return f;
}

Vec to_point(const ManifoldSpec& spec, const Mat& raw) {
  if (spec.type == "kendall") return Kendall::as_vector(to_preshape(raw));
  const Vec v = raw.col(0);
  if (std::abs(v.norm() - 1.0) > 1e-6) {
    throw Error(ErrorKind::InvalidInput, "sphere observation is not unit-norm");
  }
  return v.normalized();
}

Trajectory to_trajectory(const ManifoldSpec& spec, const Subject& s) {
  Trajectory t;
  t.subject_id = s.id;
  t.group = s.group;
  t.times = s.times;
  for (const auto& o : s.observations) t.observations.push_back(to_point(spec, o));
  return t;
}

Json point_to_json(const ManifoldSpec& spec, const Vec& p) {
  if (spec.type == "sphere") return matrix_to_json(spec, p);
  return matrix_to_json(spec, Kendall(spec.m, spec.k).as_matrix(p));
}

Vec point_from_json(const ManifoldSpec& spec, const Json& j) {
  const Mat a = matrix_from_json(spec, j, "point");
  if (spec.type == "sphere") return a.col(0);
  return Kendall::as_vector(a);
}

Json geodesic_to_json(const ManifoldSpec& spec, const GeodesicPoint& g) {
  return {{"x", point_to_json(spec, g.x)}, {"y", point_to_json(spec, g.y)}};
}

GeodesicPoint geodesic_from_json(const ManifoldSpec& spec, const Json& j) {
  return {point_from_json(spec, j.at("x")), point_from_json(spec, j.at("y"))};
}

GeodesicFile geodesic_file_from_json(const Json& j) {
  require_valid(j, "geodesic.schema.json");
  GeodesicFile f;
  f.manifold = manifold_from_json(j.at("manifold"));
  f.geodesic = geodesic_from_json(f.manifold, j.at("geodesic"));
  const auto M = f.manifold.make();
  M->check_point(f.geodesic.x);
  M->check_point(f.geodesic.y);
  return f;
}

Json to_json(const GeodesicFile& f) {
  return {{"format_version", kFormatVersion},
          {"manifold", to_json(f.manifold)},
          {"geodesic", geodesic_to_json(f.manifold, f.geodesic)}};
}

TrajectoryFile parse_rats(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty()) throw Error(ErrorKind::Parse, "empty landmark file");
  const auto& head = lines[0];
  long counts[3] = {0, 0, 0};
  if (head.tokens.size() != 3 || !parse_count(head.tokens[0], counts[0]) ||
      !parse_count(head.tokens[1], counts[1]) || !parse_count(head.tokens[2], counts[2]) ||
      counts[0] < 1 || counts[1] < 1 || counts[2] < 3) {
    parse_error(head.number,
                "header must be '<n_subjects> <n_times> <n_landmarks>' with n_landmarks >= 3");
  }
  const long n_subjects = counts[0], n_times = counts[1], n_landmarks = counts[2];

  TrajectoryFile f;
  f.manifold = {"kendall", 2, 2, static_cast<int>(n_landmarks)};
  std::map<std::string, std::size_t> index;
  std::size_t pos = 1;
  const long n_records = n_subjects * n_times;
  for (long r = 0; r < n_records; ++r) {
    if (pos >= lines.size()) {
      throw Error(ErrorKind::Parse, "record " + std::to_string(r + 1) + " of " +
                                        std::to_string(n_records) +
                                        " is missing (file ends after line " +
                                        std::to_string(lines.back().number) + ")");
    }
    const TextLine& rh = lines[pos++];
    double time = 0.0;
    if (rh.tokens.size() < 2 || rh.tokens.size() > 3 || !parse_number(rh.tokens[1], time)) {
      parse_error(rh.number, "record " + std::to_string(r + 1) +
                                 ": expected '<subject_id> <time> [group]'");
    }
    const std::string& id = rh.tokens[0];
    Mat obs(2, n_landmarks);
    for (long l = 0; l < n_landmarks; ++l) {
      if (pos >= lines.size()) {
        parse_error(rh.number, "record " + std::to_string(r + 1) + " (subject " + id +
                                   ", time " + rh.tokens[1] + ") is incomplete: expected " +
                                   std::to_string(n_landmarks) + " landmark lines, found " +
                                   std::to_string(l));
      }
      const TextLine& ll = lines[pos];
      double x = 0.0, y = 0.0;
      if (ll.tokens.size() != 2 || !parse_number(ll.tokens[0], x) ||
          !parse_number(ll.tokens[1], y)) {
        parse_error(ll.number, "record " + std::to_string(r + 1) + " (subject " + id +
                                   ", time " + rh.tokens[1] + ") is incomplete: landmark " +
                                   std::to_string(l + 1) + " is not a coordinate pair");
      }
      obs(0, l) = x;
      obs(1, l) = y;
      ++pos;
    }
    auto [it, fresh] = index.emplace(id, f.subjects.size());
    if (fresh) f.subjects.push_back(Subject{id, rh.tokens.size() == 3 ? rh.tokens[2] : "", {}, {}});
    Subject& s = f.subjects[it->second];
    if (!fresh && rh.tokens.size() == 3 && rh.tokens[2] != s.group) {
      parse_error(rh.number, "subject " + id + " changes group");
    }
    s.times.push_back(time);
    s.observations.push_back(std::move(obs));
  }
  if (pos < lines.size()) {
    parse_error(lines[pos].number, "unexpected content after the last record");
  }
  if (static_cast<long>(f.subjects.size()) != n_subjects) {
    throw Error(ErrorKind::Parse, "header declares " + std::to_string(n_subjects) +
                                      " subjects, records name " +
                                      std::to_string(f.subjects.size()));
  }
  for (const auto& s : f.subjects) {
    if (static_cast<long>(s.times.size()) != n_times) {
      throw Error(ErrorKind::Parse, "subject " + s.id + " has " +
                                        std::to_string(s.times.size()) + " records, expected " +
                                        std::to_string(n_times));
    }
  }
  check_trajectory_file(f);
  return f;
}

std::string format_rats(const TrajectoryFile& f) {
  if (f.manifold.type != "kendall" || f.manifold.m != 2) {
    throw Error(ErrorKind::InvalidInput, "landmark text layout holds planar shapes only");
  }
  if (f.subjects.empty()) throw Error(ErrorKind::InvalidInput, "no subjects");
  const std::size_t n_times = f.subjects.front().times.size();
  std::ostringstream out;
  out << f.subjects.size() << ' ' << n_times << ' ' << f.manifold.k << '\n';
  for (const auto& s : f.subjects) {
    if (s.times.size() != n_times) {
      throw Error(ErrorKind::InvalidInput, "subjects differ in number of time points");
    }
    if (s.id.find_first_of(" \t#") != std::string::npos ||
        s.group.find_first_of(" \t#") != std::string::npos) {
      throw Error(ErrorKind::InvalidInput, "subject ids and groups must not contain blanks or '#'");
    }
    for (std::size_t i = 0; i < n_times; ++i) {
      out << s.id << ' ' << format_double(s.times[i]);
      if (!s.group.empty()) out << ' ' << s.group;
      out << '\n';
      const Mat& o = s.observations[i];
      for (Eigen::Index l = 0; l < o.cols(); ++l) {
        out << format_double(o(0, l)) << ' ' << format_double(o(1, l)) << '\n';
      }
    }
  }
  return out.str();
}

TrajectoryFile parse_landmark_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string_view rest(l);
    while (true) {
      const auto comma = rest.find(',');
      cells.emplace_back(trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return cells;
  };
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++number;
    if (!trim(line).empty()) {
      header = split(line);
      break;
    }
  }
  if (header.empty()) throw Error(ErrorKind::Parse, "empty CSV file");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* req : {"subject", "time", "landmark", "x", "y"}) {
    if (!col.count(req)) parse_error(number, std::string("missing column '") + req + "'");
  }
  const bool has_z = col.count("z") > 0;
  const bool has_group = col.count("group") > 0;
  const int m = has_z ? 3 : 2;

  struct Obs {
    std::map<long, Eigen::Vector3d> landmarks;
  };
  struct Acc {
    std::string group;
    std::map<double, Obs> obs;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> subjects;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      parse_error(number, "expected " + std::to_string(header.size()) + " cells, found " +
                              std::to_string(cells.size()));
    }
    const std::string& id = cells[col["subject"]];
    double t = 0.0;
    long lm = 0;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    if (!parse_number(cells[col["time"]], t)) parse_error(number, "bad time");
    if (!parse_count(cells[col["landmark"]], lm)) parse_error(number, "bad landmark index");
    const char* axes[] = {"x", "y", "z"};
    for (int a = 0; a < m; ++a) {
      if (!parse_number(cells[col[axes[a]]], c(a))) {
        parse_error(number, std::string("bad ") + axes[a] + " coordinate");
      }
    }
    auto [it, fresh] = subjects.try_emplace(id);
    if (fresh) {
      order.push_back(id);
      if (has_group) it->second.group = cells[col["group"]];
    } else if (has_group && it->second.group != cells[col["group"]]) {
      parse_error(number, "subject " + id + " changes group");
    }
    if (!it->second.obs[t].landmarks.emplace(lm, c).second) {
      parse_error(number, "duplicate landmark " + std::to_string(lm) + " for subject " + id);
    }
  }

  TrajectoryFile f;
  int k = -1;
  for (const auto& id : order) {
    const Acc& acc = subjects[id];
    Subject s{id, acc.group, {}, {}};
    for (const auto& [t, o] : acc.obs) {
      const long first = o.landmarks.begin()->first;
      const long last = o.landmarks.rbegin()->first;
      const int count = static_cast<int>(o.landmarks.size());
      if ((first != 0 && first != 1) || last - first + 1 != count) {
        throw Error(ErrorKind::Parse, "subject " + id + " time " + format_double(t) +
                                          ": landmark indices are not contiguous");
      }
      if (k < 0) k = count;
      if (count != k) {
        throw Error(ErrorKind::Parse, "subject " + id + " time " + format_double(t) +
                                          ": expected " + std::to_string(k) + " landmarks");
      }
      Mat a(m, k);
      int j = 0;
      for (const auto& [idx, p] : o.landmarks) a.col(j++) = p.head(m);
      s.times.push_back(t);
      s.observations.push_back(std::move(a));
    }
    f.subjects.push_back(std::move(s));
  }
  if (f.subjects.empty()) throw Error(ErrorKind::Parse, "CSV has no data rows");
  f.manifold = {"kendall", 2, m, k};
  check_trajectory_file(f);
  return f;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

Json read_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const RunManifest& m) {
  Json inputs = Json::array();
  for (const auto& d : m.inputs) inputs.push_back({{"path", d.path}, {"sha256", d.sha256}});
  return {{"command", m.command},
          {"arguments", m.arguments},
          {"config", m.config},
          {"seed", m.seed},
          {"rng", m.rng},
          {"library_version", m.library_version},
          {"inputs", std::move(inputs)},
          {"started_at", m.started_at},
          {"wall_clock_seconds", m.wall_clock_seconds}};
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace geotrend::io
