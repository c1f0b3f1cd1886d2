#pragma once
// Run configuration: one JSON document drives every CLI command.  The
// canonical JSON form (to_json) is what gets hashed into run manifests.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "epm/model.hpp"

namespace epm {

struct RunConfig {
  int n = 1;
  int m = 64;
  double epsilon = 1.0;
  double h = 1.0;
  std::vector<double> P;    // defaults to zeros(n)
  PotentialSpec potential;  // default: U == 0
  double cutoff_sigmas = 12.0;
  double tol = 1e-12;
  long max_iter = 200000;
  std::uint64_t seed = 1;
  std::int64_t T = 1000000;
  int n_max = 60;
  std::string out = "out";
  std::string process = "forward";  // forward | backward (simulate, correlate)
  TrigTerm observable_f;            // default cos(2 pi x_0)
  TrigTerm observable_g;
  int competitors = 0;  // objective command: number of random competitors to score
  int fit_window_lo = 5;
  double fit_floor = 1e-13;
  std::string traj_format = "csv";  // csv | binary
  std::vector<std::pair<double, double>> sweep_eps_h;

  static RunConfig from_json_file(const std::string& path);
  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  ModelParams model() const;
  TorusGrid make_grid() const;
  void validate() const;  // throws std::invalid_argument naming the failed invariant
};

// Evaluate a trigonometric observable on the grid.
ScalarField trig_field(const TorusGrid& grid, const TrigTerm& term);

}  // namespace epm
