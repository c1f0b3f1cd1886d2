#pragma once
// Action, conditional entropy, the penalized objective, the holonomy
// constraint, competitor measures, and eps,h sweeps.
//
// A DiscreteMeasure is a joint measure mu_ij = theta_i * rows_ij on
// (position cell, landing cell).  Velocity-dependent quantities use the
// per-entry metadata of the assembled operator: mean_lagrangian for the
// action and the lump correction for the entropy.  The image-lumping weights
// are the Boltzmann weights of the model itself, which is also the optimal
// (Gibbs) split for any competitor kernel, so solved and competitor measures
// are scored by one convention.

#include <cstdint>
#include <string>
#include <vector>

#include "epm/operator.hpp"
#include "epm/simulate.hpp"
#include "epm/solver.hpp"

namespace epm {

struct DiscreteMeasure {
  TorusGrid grid;
  ScalarField theta;         // position marginal, sums to 1
  std::vector<double> rows;  // row-stochastic transition probabilities
  const OperatorMatrix* op = nullptr;  // non-owning; must outlive the measure

  double mu(std::int64_t i, std::int64_t j) const {
    return theta[i] * rows[i * grid.size + j];
  }
};

DiscreteMeasure solved_measure(const StochasticKernel& K, const OperatorMatrix& A);

// integral of L d mu via the per-entry mean Lagrangian.
double action(const DiscreteMeasure& mu);

// S[mu] = sum_i theta_i sum_j rows_ij * ln(gamma_ij) where gamma_ij is the
// velocity-space density carried by entry (i,j):
// ln gamma_ij = ln rows_ij + log_measure + lump_log_correction.  Computed in
// the log domain.  Throws when a positive kernel entry sits where the
// operator has no support.
double entropy(const DiscreteMeasure& mu, const ModelParams& params);

double objective(const DiscreteMeasure& mu, const ModelParams& params);  // action + eps*entropy

// |sum_ij mu_ij (psi_j - psi_i) / h|
double holonomy_residual(const DiscreteMeasure& mu, const ScalarField& psi, double h);

// Holonomic competitors: a row-stochastic kernel with everywhere-positive
// rows plus its own stationary vector (left power iteration).  Throws
// std::invalid_argument when the stationary vector fails to converge.
DiscreteMeasure competitor_dirichlet(std::uint64_t seed, const OperatorMatrix& A);
DiscreteMeasure competitor_uniform(const OperatorMatrix& A);
DiscreteMeasure competitor_from_kernel(std::vector<double> rows, const OperatorMatrix& A);

struct SweepRow {
  double epsilon = 0.0;
  double h = 0.0;
  bool solved = false;
  std::string error;
  double lambda = 0.0;
  double lambda_over_h = 0.0;
  double gap = 0.0;
  double action_value = 0.0;
  double entropy_value = 0.0;
  double objective_value = 0.0;  // action + eps*entropy by construction
  std::vector<double> theta_argmax_x;
  std::int64_t theta_argmax_index = 0;
};

struct SweepOptions {
  double cutoff_sigmas = 12.0;
  SolveOptions solve;
  double gap_tol = 1e-10;
  long gap_max_iter = 200000;
  std::uint64_t gap_seed = 1;
};

// Solves each (eps, h) configuration with fixed U, P and grid; failures are
// recorded in the row and the sweep continues.
std::vector<SweepRow> sweep(const ModelParams& base, const TorusGrid& grid,
                            const std::vector<std::pair<double, double>>& eps_h,
                            const SweepOptions& opts = {});

}  // namespace epm
