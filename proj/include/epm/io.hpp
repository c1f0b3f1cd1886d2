#pragma once
// File outputs: CSV (floats at 17 significant digits, round-trip exact),
// summary/fit/objective JSON, trajectory CSV/binary, and run manifests.
// All writers are deterministic byte-for-byte given identical inputs.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "epm/correlation.hpp"
#include "epm/mather.hpp"
#include "epm/simulate.hpp"
#include "epm/solver.hpp"

namespace epm {

std::string fmt17(double v);
std::uint64_t fnv1a64(std::string_view s);

struct SolveSummary {
  bool converged = true;
  double lambda = 0.0;
  double Lambda = 0.0;
  double residual = 0.0;
  long iterations = 0;
  double lambda_backward = 0.0;
  double theta_l1_defect = 0.0;             // ||theta^T K - theta^T||_1 of the attached theta
  double q_rowsum_defect = 0.0;             // max |Q row sum - 1|
  double prenorm_defect = 0.0;              // K row-sum defect before renormalization
  double theta_formula_vs_stationary = 0.0; // l1 gap between e^{-(phi+phibar)/(eps h)} and left iteration
  bool has_gap = false;
  double lambda2_modulus = 0.0;
  double gap = 0.0;
  double window_dispersion = 0.0;
  long gap_iterations = 0;
  bool gap_converged = false;
  std::string error;
};

void write_summary_json(const std::string& path, const SolveSummary& s);

void write_fields_csv(const std::string& path, const TorusGrid& grid, const ScalarField& phi,
                      const ScalarField& phibar, const ScalarField& theta);

// lag, exact, empirical, stderr; missing columns left empty.
void write_correlation_csv(const std::string& path, const CorrelationSeries& series);

void write_fit_json(const std::string& path, const DecayFit& fit, double lambda2_reference);

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

void write_kernel_dump_csv(const std::string& path, const OperatorMatrix& A);

void write_trajectory_csv(const std::string& path, const Trajectory& traj, const TorusGrid& grid);

// 8-byte magic "EPMTRAJ1", then the grid size N as uint64, then the state
// indices as uint32, all little-endian.
void write_trajectory_binary(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_binary(const std::string& path);

struct ObjectiveReport {
  double epsilon = 0.0;
  double h = 0.0;
  double lambda = 0.0;
  double lambda_over_h = 0.0;
  double action_value = 0.0;
  double entropy_value = 0.0;
  double objective_value = 0.0;
  double identity_abs_error = 0.0;      // |objective - lambda/h|
  double holonomy_max_residual = 0.0;   // over the trigonometric test basis
  int competitors = 0;
  double competitor_min_margin = 0.0;   // min over competitors of objective' - objective
};

void write_objective_json(const std::string& path, const ObjectiveReport& r);

void write_manifest(const std::string& path, const std::string& command,
                    const nlohmann::json& config_json, std::uint64_t seed,
                    const std::vector<std::string>& outputs);

}  // namespace epm
