#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cli.hpp"

namespace geotrend::cli {

struct Common {
  int threads = 0;  ///< 0: GEOTREND_THREADS or 1
  bool allow_nonconvergence = false;
};

struct SimulateArgs {
  std::string distribution = "m2";
  std::string metric = "l2";
  double sigma = 0.26179938779914941;  // pi / 12
  int n_geodesics = 25;
  int repetitions = 100;
  std::uint64_t seed = 1;
  std::string study = "repeated";
  std::vector<int> n_list{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  int n_segments = 4;
  std::string quadrature = "trapezoid:17";
  std::string out;
};

struct RegressArgs {
  std::string input;
  std::string format = "auto";
  std::string subject = "all";
  int max_iterations = 500;
  std::string out;
};

struct MeanArgs {
  std::string input;
  std::string format = "auto";
  std::string metric = "l2";
  std::string compare;
  std::string group;
  int n_segments = 4;
  std::string quadrature = "trapezoid:17";
  std::string out;
};

struct PathArgs {
  std::string from;
  std::string to;
  int n_segments = 8;
  std::string quadrature = "trapezoid:17";
  std::string out;
};

struct GroupTestArgs {
  std::string input;
  std::string format = "auto";
  std::string group_a;
  std::string group_b;
  int permutations = 1000;
  std::uint64_t seed = 1;
  bool smoothed = false;
  int n_segments = 4;
  std::string quadrature = "trapezoid:17";
  std::string out;
};

struct TpcaArgs {
  std::string input;
  std::string format = "auto";
  int components = 2;
  std::string out;
};

struct ImportArgs {
  std::string input;
  std::string out;
};

struct ValidateArgs {
  std::string input;
  std::string schema;
};

void run_simulate(Run& run, const Common& c, const SimulateArgs& a);
void run_regress(Run& run, const Common& c, const RegressArgs& a);
void run_mean_geodesic(Run& run, const Common& c, const MeanArgs& a);
void run_shortest_path(Run& run, const Common& c, const PathArgs& a);
void run_group_test(Run& run, const Common& c, const GroupTestArgs& a);
void run_tpca(Run& run, const Common& c, const TpcaArgs& a);
void run_import(Run& run, const ImportArgs& a, const std::string& format);
/// Prints "valid <schema>" or throws a Schema error listing violations.
void run_validate(const ValidateArgs& a);

}  // namespace geotrend::cli
