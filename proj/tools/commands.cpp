#include "commands.hpp"

#include <algorithm>
#include <iostream>

#include "geotrend/geodesic_space.hpp"
#include "geotrend/parallel.hpp"
#include "geotrend/sasaki.hpp"
#include "geotrend/sphere.hpp"
#include "geotrend/stats.hpp"
#include "geotrend/synthetic.hpp"

namespace geotrend::cli {

namespace {

Json warnings_json(const std::vector<std::string>& w) { return Json(w); }

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void require_positive(int v, const char* flag) {
  if (v < 1) throw Error(ErrorKind::InvalidInput, std::string(flag) + " must be at least 1");
}

struct MeanEstimate {
  GeodesicPoint mean;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

MeanEstimate estimate(const Manifold& M, const std::vector<GeodesicPoint>& geodesics,
                      Metric metric, int n, const QuadratureRule& quad, int threads) {
  MeanEstimate out;
  if (metric == Metric::L2) {
    MeanOptions opts;
    opts.threads = threads;
    const MeanGeodesic m = mean_geodesic(M, geodesics, n, quad, opts);
    out.mean = m.mean;
    out.objective = m.g_n;
    out.iterations = m.outer_iterations;
    out.converged = m.converged;
    out.warnings = m.warnings;
    return out;
  }
  SasakiOptions opts;
  opts.threads = threads;
  std::vector<TangentBundlePoint> points;
  for (const auto& g : geodesics) points.push_back(to_bundle(M, g));
  const SasakiMean m = sasaki_mean(M, points, opts);
  out.mean = to_geodesic(M, m.mean);
  std::vector<double> sq(points.size());
  parallel_for(points.size(), threads, [&](std::size_t j) {
    const double d = sasaki_distance(M, m.mean, points[j], opts);
    sq[j] = d * d;
  });
  for (double s : sq) out.objective += s;
  out.iterations = m.iterations;
  out.converged = m.converged;
  out.warnings = m.warnings;
  return out;
}

std::vector<SubjectFit> select_group(const FitSet& set, const std::string& label) {
  std::vector<SubjectFit> out;
  for (const auto& f : set.fits) {
    if (f.group == label) out.push_back(f);
  }
  if (out.empty()) {
    throw Error(ErrorKind::InvalidInput, "no subjects in group '" + label + "'");
  }
  return out;
}

Json string_list(const std::vector<SubjectFit>& fits) {
  Json out = Json::array();
  for (const auto& f : fits) out.push_back(f.id);
  return out;
}

}  // namespace

void run_simulate(Run& run, const Common& c, const SimulateArgs& a) {
  SimulationConfig cfg;
  cfg.distribution = parse_distribution(a.distribution);
  cfg.metric = parse_metric(a.metric);
  cfg.sigma = a.sigma;
  cfg.n_geodesics = a.n_geodesics;
  cfg.n_repetitions = a.repetitions;
  cfg.seed = a.seed;
  cfg.n = a.n_segments;
  cfg.quad = QuadratureRule::parse(a.quadrature);
  cfg.threads = resolve_threads(c.threads);
  cfg.mu = default_simulation_mean();
  cfg.validate();
  if (a.study != "repeated" && a.study != "increasing") {
    throw Error(ErrorKind::InvalidInput, "--study must be repeated or increasing");
  }
  for (int n : a.n_list) require_positive(n, "--n-list entries");

  const io::ManifoldSpec sphere{"sphere", 2};
  Json config = {{"sigma", cfg.sigma},
                 {"n_geodesics", cfg.n_geodesics},
                 {"repetitions", cfg.n_repetitions},
                 {"distribution", to_string(cfg.distribution)},
                 {"metric", to_string(cfg.metric)},
                 {"n_segments", cfg.n},
                 {"quadrature", cfg.quad.describe()},
                 {"mu", io::geodesic_to_json(sphere, cfg.mu)}};
  if (a.study == "increasing") config["n_list"] = a.n_list;
  run.set_seed(a.seed);
  run.config() = config;
  run.config()["study"] = a.study;

  Json result = {{"study", a.study}, {"config", config}};
  CsvTable csv;
  std::size_t failures = 0;
  if (a.study == "repeated") {
    const RepeatedStudy s = study_repeated(cfg);
    Json reps = Json::array();
    csv.header = {"index", "ok", "error"};
    for (std::size_t r = 0; r < s.repetitions.size(); ++r) {
      const Repetition& rep = s.repetitions[r];
      Json jr = {{"index", r}, {"ok", rep.ok}, {"error", rep.ok ? Json(rep.error) : Json()}};
      if (!rep.ok) jr["failure"] = rep.failure;
      if (rep.ok) jr["estimate"] = io::geodesic_to_json(sphere, rep.estimate);
      reps.push_back(std::move(jr));
      csv.rows.push_back({cell(static_cast<long long>(r)), rep.ok ? "true" : "false",
                          rep.ok ? cell(rep.error) : ""});
    }
    const ErrorSummary& m = s.summary;
    result["repetitions"] = std::move(reps);
    result["summary"] = {{"count", m.count},   {"mean", m.mean},       {"median", m.median},
                         {"stdev", m.stdev},   {"ci_low", m.ci_low},   {"ci_high", m.ci_high},
                         {"beta_a", m.beta_a}, {"beta_b", m.beta_b}};
    result["failures"] = s.failures;
    failures = s.failures;
  } else {
    const IncreasingStudy s = study_increasing(cfg, a.n_list);
    Json rows = Json::array();
    csv.header = {"n_geodesics", "mean", "stdev", "failures"};
    for (const auto& row : s.rows) {
      rows.push_back({{"n_geodesics", row.n_geodesics},
                      {"mean", row.mean},
                      {"stdev", row.stdev},
                      {"failures", row.failures},
                      {"errors", row.errors}});
      csv.rows.push_back({cell(static_cast<long long>(row.n_geodesics)), cell(row.mean),
                          cell(row.stdev), cell(static_cast<long long>(row.failures))});
      failures += row.failures;
    }
    result["rows"] = std::move(rows);
    result["slope"] = s.slope;
  }
  if (failures > 0) run.note_nonconvergence(std::to_string(failures) + " repetitions");
  run.write("simulation", std::move(result), a.out, csv);
}

void run_regress(Run& run, const Common& c, const RegressArgs& a) {
  io::TrajectoryFile file = load_trajectories(run, a.input, a.format);
  require_positive(a.max_iterations, "--max-iterations");
  run.config() = {{"input", a.input},
                  {"format", a.format},
                  {"subject", a.subject},
                  {"max_iterations", a.max_iterations}};
  if (a.subject != "all") {
    std::erase_if(file.subjects, [&](const io::Subject& s) { return s.id != a.subject; });
    if (file.subjects.empty()) {
      throw Error(ErrorKind::InvalidInput, "no subject '" + a.subject + "' in the input");
    }
  }
  RegressionOptions opts;
  opts.max_iterations = a.max_iterations;
  const auto fits = fit_subjects(file, resolve_threads(c.threads), opts);

  Json subjects = Json::array();
  CsvTable csv;
  csv.header = {"id", "group", "t0", "t1", "f_min", "g_min", "r_squared", "iterations",
                "converged"};
  double f_sum = 0.0, g_sum = 0.0;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const FittedGeodesic& f = fits[i];
    const auto& times = file.subjects[i].times;
    Json js = {{"id", f.subject_id}};
    if (!f.group.empty()) js["group"] = f.group;
    js["geodesic"] = io::geodesic_to_json(file.manifold, f.endpoints);
    js["time_range"] = {times.front(), times.back()};
    js["f_min"] = f.f_min;
    js["g_min"] = f.g_min;
    js["r_squared"] = nullable(f.r_squared);
    js["iterations"] = f.iterations;
    js["converged"] = f.converged;
    js["gradient_norm"] = f.gradient_norm;
    js["warnings"] = warnings_json(f.warnings);
    subjects.push_back(std::move(js));
    csv.rows.push_back({cell(f.subject_id), cell(f.group), cell(times.front()),
                        cell(times.back()), cell(f.f_min), cell(f.g_min),
                        std::isfinite(f.r_squared) ? cell(f.r_squared) : "",
                        cell(static_cast<long long>(f.iterations)),
                        f.converged ? "true" : "false"});
    f_sum += f.f_min;
    g_sum += f.g_min;
    if (!f.converged) run.note_nonconvergence("regression of subject " + f.subject_id);
  }
  Json pooled = {{"f_sum", f_sum}, {"g_sum", g_sum}, {"r_squared", nullptr}};
  if (g_sum > 0.0) {
    const PooledRSquared p = pooled_r_squared(fits);
    pooled = {{"f_sum", p.f_sum}, {"g_sum", p.g_sum}, {"r_squared", p.r_squared}};
  }
  csv.rows.push_back({"pooled", "", "", "", cell(pooled["f_sum"].get<double>()),
                      cell(pooled["g_sum"].get<double>()),
                      pooled["r_squared"].is_null() ? "" : cell(pooled["r_squared"].get<double>()),
                      "", ""});
  Json result = {{"manifold", io::to_json(file.manifold)},
                 {"subjects", std::move(subjects)},
                 {"pooled", std::move(pooled)}};
  run.write("regression", std::move(result), a.out, csv);
}

void run_mean_geodesic(Run& run, const Common& c, const MeanArgs& a) {
  const Metric metric = parse_metric(a.metric);
  const bool compare = !a.compare.empty();
  const Metric other = compare ? parse_metric(a.compare) : metric;
  require_positive(a.n_segments, "--n-segments");
  const QuadratureRule quad = QuadratureRule::parse(a.quadrature);
  const int threads = resolve_threads(c.threads);
  run.config() = {{"input", a.input},         {"format", a.format},
                  {"metric", to_string(metric)}, {"compare", a.compare},
                  {"group", a.group},         {"n_segments", a.n_segments},
                  {"quadrature", quad.describe()}};

  FitSet set = load_fits(run, a.input, a.format, threads);
  std::vector<SubjectFit> fits = a.group.empty() ? set.fits : select_group(set, a.group);
  if (fits.empty()) throw Error(ErrorKind::InvalidInput, "no subjects in the input");
  std::vector<GeodesicPoint> geodesics;
  for (const auto& f : fits) geodesics.push_back(f.geodesic);
  const auto M = set.manifold.make();

  const MeanEstimate m = estimate(*M, geodesics, metric, a.n_segments, quad, threads);
  if (!m.converged) run.note_nonconvergence(std::string(to_string(metric)) + " mean");
  CsvTable csv;
  csv.header = geodesic_header(set.manifold, "geodesic");
  append_geodesic_rows(csv, set.manifold, m.mean, "mean");
  Json result = {{"manifold", io::to_json(set.manifold)},
                 {"metric", to_string(metric)},
                 {"n_segments", a.n_segments},
                 {"quadrature", quad.describe()},
                 {"subjects", string_list(fits)},
                 {"mean", io::geodesic_to_json(set.manifold, m.mean)},
                 {"objective", m.objective},
                 {"iterations", m.iterations},
                 {"converged", m.converged},
                 {"warnings", warnings_json(m.warnings)}};
  if (compare) {
    const MeanEstimate o = estimate(*M, geodesics, other, a.n_segments, quad, threads);
    if (!o.converged) run.note_nonconvergence(std::string(to_string(other)) + " mean");
    const double d = std::max(M->distance(m.mean.x, o.mean.x), M->distance(m.mean.y, o.mean.y));
    result["comparison"] = {{"metric", to_string(other)},
                            {"mean", io::geodesic_to_json(set.manifold, o.mean)},
                            {"max_endpoint_distance", d},
                            {"converged", o.converged}};
    append_geodesic_rows(csv, set.manifold, o.mean, "comparison");
  }
  run.write("mean_geodesic", std::move(result), a.out, csv);
}

void run_shortest_path(Run& run, const Common& c, const PathArgs& a) {
  (void)c;
  require_positive(a.n_segments, "--n-segments");
  const QuadratureRule quad = QuadratureRule::parse(a.quadrature);
  run.config() = {{"from_geodesic", a.from},
                  {"to_geodesic", a.to},
                  {"n_segments", a.n_segments},
                  {"quadrature", quad.describe()}};
  const io::GeodesicFile from = io::geodesic_file_from_json(io::read_json(a.from));
  run.add_input(a.from);
  const io::GeodesicFile to = io::geodesic_file_from_json(io::read_json(a.to));
  run.add_input(a.to);
  if (io::to_json(from.manifold) != io::to_json(to.manifold)) {
    throw Error(ErrorKind::InvalidInput, "the two geodesics live on different manifolds");
  }
  const auto M = from.manifold.make();
  const ShortestPath sp =
      discrete_shortest_path(*M, from.geodesic, to.geodesic, a.n_segments, quad);
  if (!sp.converged) run.note_nonconvergence("shortest path");

  Json nodes = Json::array();
  CsvTable csv;
  csv.header = geodesic_header(from.manifold, "node");
  for (std::size_t i = 0; i < sp.path.nodes.size(); ++i) {
    nodes.push_back(io::geodesic_to_json(from.manifold, sp.path.nodes[i]));
    append_geodesic_rows(csv, from.manifold, sp.path.nodes[i], std::to_string(i));
  }
  Json result = {{"manifold", io::to_json(from.manifold)},
                 {"n_segments", a.n_segments},
                 {"quadrature", quad.describe()},
                 {"nodes", std::move(nodes)},
                 {"energy", sp.energy},
                 {"length", discrete_length(*M, sp.path, quad)},
                 {"sweeps", sp.sweeps},
                 {"converged", sp.converged},
                 {"energy_history", sp.energy_history},
                 {"warnings", warnings_json(sp.warnings)}};
  run.write("shortest_path", std::move(result), a.out, csv);
}

void run_group_test(Run& run, const Common& c, const GroupTestArgs& a) {
  require_positive(a.permutations, "--permutations");
  require_positive(a.n_segments, "--n-segments");
  StatsOptions opts;
  opts.n = a.n_segments;
  opts.quad = QuadratureRule::parse(a.quadrature);
  opts.smoothed_p = a.smoothed;
  opts.threads = resolve_threads(c.threads);
  run.set_seed(a.seed);
  run.config() = {{"input", a.input},         {"format", a.format},
                  {"group_a", a.group_a},     {"group_b", a.group_b},
                  {"permutations", a.permutations}, {"smoothed", a.smoothed},
                  {"n_segments", a.n_segments}, {"quadrature", opts.quad.describe()}};

  const FitSet set = load_fits(run, a.input, a.format, opts.threads);
  const auto fa = select_group(set, a.group_a);
  const auto fb = select_group(set, a.group_b);
  GroupSample ga{a.group_a, {}}, gb{a.group_b, {}};
  for (const auto& f : fa) ga.geodesics.push_back(f.geodesic);
  for (const auto& f : fb) gb.geodesics.push_back(f.geodesic);
  const auto M = set.manifold.make();
  const HotellingResult h = hotelling(*M, ga, gb, opts);
  const TestResult t = permutation_test(*M, ga, gb, a.permutations, a.seed, opts);

  std::vector<std::string> warnings = h.warnings;
  for (const auto& w : t.warnings) {
    if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  }
  CsvTable csv;
  csv.header = {"kind", "index", "t2"};
  csv.rows.push_back({"observed", "", cell(t.t2)});
  for (std::size_t i = 0; i < t.null_t2.size(); ++i) {
    csv.rows.push_back({"null", cell(static_cast<long long>(i)), cell(t.null_t2[i])});
  }
  Json result = {
      {"manifold", io::to_json(set.manifold)},
      {"group_a",
       {{"label", a.group_a},
        {"subjects", string_list(fa)},
        {"mean", io::geodesic_to_json(set.manifold, h.mean_x)}}},
      {"group_b",
       {{"label", a.group_b},
        {"subjects", string_list(fb)},
        {"mean", io::geodesic_to_json(set.manifold, h.mean_y)}}},
      {"n_segments", a.n_segments},
      {"quadrature", opts.quad.describe()},
      {"t2", t.t2},
      {"p_value", t.p_value},
      {"permutations", t.permutations},
      {"smoothed", t.smoothed},
      {"null_t2", t.null_t2},
      {"warnings", warnings_json(warnings)}};
  run.write("group_test", std::move(result), a.out, csv);
}

void run_tpca(Run& run, const Common& c, const TpcaArgs& a) {
  require_positive(a.components, "--components");
  run.config() = {{"input", a.input}, {"format", a.format}, {"components", a.components}};
  const io::TrajectoryFile file = load_trajectories(run, a.input, a.format);
  const auto M = file.manifold.make();
  const auto fits = fit_subjects(file, resolve_threads(c.threads));

  struct RowKey {
    std::string subject, group;
    double time;
  };
  std::vector<RowKey> keys;
  std::vector<Vec> observations, trend;
  for (std::size_t s = 0; s < file.subjects.size(); ++s) {
    const auto& sub = file.subjects[s];
    const double t0 = sub.times.front();
    const double span = sub.times.back() - t0;
    if (!fits[s].converged) run.note_nonconvergence("regression of subject " + sub.id);
    for (std::size_t i = 0; i < sub.times.size(); ++i) {
      keys.push_back({sub.id, sub.group, sub.times[i]});
      observations.push_back(io::to_point(file.manifold, sub.observations[i]));
      const double u = span > 0.0 ? (sub.times[i] - t0) / span : 0.0;
      trend.push_back(M->geodesic(fits[s].endpoints.x, fits[s].endpoints.y, u));
    }
  }
  const TangentPCA pca = tangent_pca(*M, observations, a.components);
  const Mat trend_scores = tangent_pca_scores(*M, pca, trend);
  const auto cols = pca.scores.cols();

  std::vector<double> eigenvalues;
  double total = 0.0;
  for (Eigen::Index i = 0; i < pca.eigenvalues.size(); ++i) {
    eigenvalues.push_back(std::max(0.0, pca.eigenvalues(i)));
    total += eigenvalues.back();
  }
  std::vector<double> ratio;
  for (Eigen::Index i = 0; i < cols; ++i) {
    ratio.push_back(total > 0.0 ? eigenvalues[static_cast<std::size_t>(i)] / total : 0.0);
  }

  CsvTable csv;
  csv.header = {"subject", "group", "time", "kind"};
  for (Eigen::Index j = 0; j < cols; ++j) csv.header.push_back("pc" + std::to_string(j + 1));
  Json rows = Json::array();
  for (const char* kind : {"observation", "trend"}) {
    const Mat& scores = kind[0] == 'o' ? pca.scores : trend_scores;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      std::vector<double> sc(static_cast<std::size_t>(cols));
      std::vector<std::string> row{cell(keys[i].subject), cell(keys[i].group),
                                   cell(keys[i].time), kind};
      for (Eigen::Index j = 0; j < cols; ++j) {
        sc[static_cast<std::size_t>(j)] = scores(static_cast<Eigen::Index>(i), j);
        row.push_back(cell(sc[static_cast<std::size_t>(j)]));
      }
      rows.push_back({{"subject", keys[i].subject},
                      {"group", keys[i].group},
                      {"time", keys[i].time},
                      {"kind", kind},
                      {"scores", sc}});
      csv.rows.push_back(std::move(row));
    }
  }
  Json result = {{"manifold", io::to_json(file.manifold)},
                 {"components", static_cast<int>(cols)},
                 {"mean", io::point_to_json(file.manifold, pca.mean)},
                 {"eigenvalues", eigenvalues},
                 {"explained_variance_ratio", ratio},
                 {"rows", std::move(rows)},
                 {"warnings", warnings_json(pca.warnings)}};
  run.write("tpca", std::move(result), a.out, csv);
}

void run_import(Run& run, const ImportArgs& a, const std::string& format) {
  run.config() = {{"input", a.input}, {"format", format}};
  const io::TrajectoryFile file = load_trajectories(run, a.input, format);
  Json doc = io::to_json(file);
  doc["manifest"] = run.manifest();

  const int m = file.manifold.rows();
  CsvTable csv;
  csv.header = {"subject", "group", "time", "landmark", "x", "y"};
  if (m == 3) csv.header.push_back("z");
  for (const auto& s : file.subjects) {
    for (std::size_t i = 0; i < s.times.size(); ++i) {
      const Mat& o = s.observations[i];
      for (Eigen::Index l = 0; l < o.cols(); ++l) {
        std::vector<std::string> row{cell(s.id), cell(s.group), cell(s.times[i]),
                                     cell(static_cast<long long>(l))};
        for (int r = 0; r < m; ++r) row.push_back(cell(o(r, l)));
        csv.rows.push_back(std::move(row));
      }
    }
  }
  run.write_document(std::move(doc), "trajectory.schema.json", a.out, csv);
}

void run_validate(const ValidateArgs& a) {
  const Json j = io::read_json(a.input);
  std::string name = a.schema;
  if (name.empty()) {
    if (j.is_object() && j.contains("kind") && j["kind"].is_string()) {
      name = j["kind"].get<std::string>() + "_result.schema.json";
    } else if (j.is_object() && j.contains("geodesic")) {
      name = "geodesic.schema.json";
    } else if (j.is_object() && j.contains("error")) {
      name = "error.schema.json";
    } else {
      name = "trajectory.schema.json";
    }
  }
  io::require_valid(j, name);
  if (name == "trajectory.schema.json") io::trajectory_from_json(j);
  if (name == "geodesic.schema.json") io::geodesic_file_from_json(j);
  std::cout << "valid " << name << "\n";
}

}  // namespace geotrend::cli
