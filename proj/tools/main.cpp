#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "geotrend/version.hpp"

using namespace geotrend;
using namespace geotrend::cli;

namespace {

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << error_record(kind, message, code) << std::endl;
  return code;
}

void add_out(CLI::App* sub, std::string& out) {
  sub->add_option("--out", out, "Result JSON path; a CSV table is written next to it")
      ->required();
}

void add_geometry(CLI::App* sub, int& n_segments, std::string& quadrature) {
  sub->add_option("--n-segments", n_segments, "Segments of the discrete paths")
      ->capture_default_str();
  sub->add_option("--quadrature", quadrature, "trapezoid:K or gauss:K")->capture_default_str();
}

void add_input(CLI::App* sub, std::string& input, std::string& format) {
  sub->add_option("--input", input, "Trajectory file (JSON, CSV or landmark text)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--format", format, "auto, json, csv or rats")
      ->check(CLI::IsMember({"auto", "json", "csv", "rats"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Longitudinal shape analysis with geodesic trends", "geotrend"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  app.add_option("--threads", common.threads, "Worker threads (default GEOTREND_THREADS or 1)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--allow-nonconvergence", common.allow_nonconvergence,
               "Exit 0 even if an iteration did not converge");

  std::uint64_t seed = 1;
  try {
    seed = default_seed();
  } catch (const Error& e) {
    return fail("invalid_input", e.what(), kUsage);
  }

  SimulateArgs sim;
  sim.seed = seed;
  auto* simulate = app.add_subcommand("simulate", "Synthetic mean-estimation study on S2");
  simulate->add_option("--distribution", sim.distribution)
      ->check(CLI::IsMember({"m2", "sasaki"}))
      ->capture_default_str();
  simulate->add_option("--metric", sim.metric)
      ->check(CLI::IsMember({"l2", "sasaki"}))
      ->capture_default_str();
  simulate->add_option("--sigma", sim.sigma)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--n-geodesics", sim.n_geodesics)->capture_default_str();
  simulate->add_option("--repetitions", sim.repetitions)->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Default GEOTREND_SEED or 1");
  simulate->add_option("--study", sim.study)
      ->check(CLI::IsMember({"repeated", "increasing"}))
      ->capture_default_str();
  simulate->add_option("--n-list", sim.n_list, "Sample sizes of the increasing study")
      ->delimiter(',');
  add_geometry(simulate, sim.n_segments, sim.quadrature);
  add_out(simulate, sim.out);

  RegressArgs reg;
  auto* regress = app.add_subcommand("regress", "Per-subject geodesic regression");
  add_input(regress, reg.input, reg.format);
  regress->add_option("--subject", reg.subject, "Subject id or all")->capture_default_str();
  regress->add_option("--max-iterations", reg.max_iterations, "Descent iterations per subject")
      ->capture_default_str();
  add_out(regress, reg.out);

  MeanArgs mean;
  auto* mean_cmd = app.add_subcommand("mean-geodesic", "Mean of the fitted subject geodesics");
  mean_cmd->add_option("--input", mean.input, "Trajectory file or regression result")
      ->required()
      ->check(CLI::ExistingFile);
  mean_cmd->add_option("--format", mean.format)
      ->check(CLI::IsMember({"auto", "json", "csv", "rats"}))
      ->capture_default_str();
  mean_cmd->add_option("--metric", mean.metric)
      ->check(CLI::IsMember({"l2", "sasaki"}))
      ->capture_default_str();
  mean_cmd->add_option("--compare", mean.compare, "Also compute the mean under this metric")
      ->check(CLI::IsMember({"l2", "sasaki"}));
  mean_cmd->add_option("--group", mean.group, "Restrict to one group label");
  add_geometry(mean_cmd, mean.n_segments, mean.quadrature);
  add_out(mean_cmd, mean.out);

  PathArgs path;
  auto* path_cmd = app.add_subcommand("shortest-path", "Discrete shortest path of geodesics");
  path_cmd->add_option("--from-geodesic", path.from)->required()->check(CLI::ExistingFile);
  path_cmd->add_option("--to-geodesic", path.to)->required()->check(CLI::ExistingFile);
  add_geometry(path_cmd, path.n_segments, path.quadrature);
  add_out(path_cmd, path.out);

  GroupTestArgs gt;
  gt.seed = seed;
  auto* group = app.add_subcommand("group-test", "Permutation test of two groups of trends");
  group->add_option("--input", gt.input, "Trajectory file or regression result")
      ->required()
      ->check(CLI::ExistingFile);
  group->add_option("--format", gt.format)
      ->check(CLI::IsMember({"auto", "json", "csv", "rats"}))
      ->capture_default_str();
  group->add_option("--group-a", gt.group_a)->required();
  group->add_option("--group-b", gt.group_b)->required();
  group->add_option("--permutations", gt.permutations)->capture_default_str();
  group->add_option("--seed", gt.seed, "Default GEOTREND_SEED or 1");
  group->add_flag("--smoothed", gt.smoothed, "Report (count + 1) / (B + 1)");
  add_geometry(group, gt.n_segments, gt.quadrature);
  add_out(group, gt.out);

  TpcaArgs tp;
  auto* tpca = app.add_subcommand("tpca", "Tangent PCA scores of observations and trends");
  add_input(tpca, tp.input, tp.format);
  tpca->add_option("--components", tp.components)->capture_default_str();
  add_out(tpca, tp.out);

  ImportArgs rats, csv;
  auto* import_rats = app.add_subcommand("import-rats", "Landmark text layout to JSON");
  import_rats->add_option("--input", rats.input)->required()->check(CLI::ExistingFile);
  add_out(import_rats, rats.out);
  auto* import_csv = app.add_subcommand("import-csv", "Per-landmark CSV to JSON");
  import_csv->add_option("--input", csv.input)->required()->check(CLI::ExistingFile);
  add_out(import_csv, csv.out);

  ValidateArgs val;
  auto* validate = app.add_subcommand("validate", "Check a document against its schema");
  validate->add_option("--input", val.input)->required()->check(CLI::ExistingFile);
  validate->add_option("--schema", val.schema, "Schema file name; inferred when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kUsage);
  }

  CLI::App* sub = app.get_subcommands().front();
  Run run(sub->get_name(), std::vector<std::string>(argv + 1, argv + argc));
  run.allow_nonconvergence(common.allow_nonconvergence);
  try {
    if (sub == simulate) run_simulate(run, common, sim);
    else if (sub == regress) run_regress(run, common, reg);
    else if (sub == mean_cmd) run_mean_geodesic(run, common, mean);
    else if (sub == path_cmd) run_shortest_path(run, common, path);
    else if (sub == group) run_group_test(run, common, gt);
    else if (sub == tpca) run_tpca(run, common, tp);
    else if (sub == import_rats) run_import(run, rats, "rats");
    else if (sub == import_csv) run_import(run, csv, "csv");
    else if (sub == validate) run_validate(val);
    run.finish();
  } catch (const Error& e) {
    return fail(to_string(e.kind()), e.what(), exit_code(e.kind()));
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kInternal);
  }
  return kOk;
}
