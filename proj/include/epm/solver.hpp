#pragma once
// Dominant eigenpairs of the assembled operators, the stationary density
// theta, the forward/backward stochastic kernels, and the spectral gap
// estimator.

#include <cstdint>
#include <vector>

#include "epm/operator.hpp"

namespace epm {

struct SolveOptions {
  double tol = 1e-12;
  long max_iter = 200000;
  enum class Path { Auto, Linear, Log } path = Path::Auto;
  // Auto switches to the log-domain iteration when the max row spread of
  // log entries exceeds this.
  double log_spread_threshold = 500.0;
};

// Additive eigenpair: G[potential] = potential + lambda, normalized so
// min potential = 0 (equivalently the matrix eigenvector u = e^{-potential/(eps h)}
// has max 1).  Lambda = e^{-lambda/(eps h)} is the matrix eigenvalue.
// residual = sup|G[potential] - potential - lambda| / (eps h), <= tol on success.
struct EigenSolution {
  Direction direction = Direction::Forward;
  double lambda = 0.0;
  double Lambda = 0.0;
  ScalarField potential;
  double residual = 0.0;
  long iterations = 0;
};

EigenSolution solve_forward(const OperatorMatrix& A, const ModelParams& params,
                            const SolveOptions& opts = {});
EigenSolution solve_backward(const OperatorMatrix& B, const ModelParams& params,
                             const SolveOptions& opts = {});

// theta_i proportional to exp(-(phi_i + phibar_i)/(eps h)), normalized to sum 1.
ScalarField build_theta(const EigenSolution& fwd, const EigenSolution& bwd,
                        const ModelParams& params);

struct StochasticKernel {
  TorusGrid grid;
  Direction direction = Direction::Forward;
  std::vector<double> rows;  // N*N, rows sum to 1 (forward kernels renormalized)
  ScalarField stationary;    // attached theta (left-iteration refined)
  double prenorm_defect = 0.0;        // max |row sum - 1| before renormalization
  double stationary_l1_defect = 0.0;  // ||theta^T K - theta^T||_1 of the attached theta

  double at(std::int64_t i, std::int64_t j) const { return rows[i * grid.size + j]; }
};

// K_ij = A_ij u_j / (Lambda u_i), rows renormalized to sum exactly 1.  The
// attached stationary vector starts from theta_init (or uniform) and is
// refined by left power iteration, which tightens theta^T K = theta^T well
// below the eigen residual.  Throws NonConvergenceError when the
// pre-normalization defect exceeds 100*tol.
StochasticKernel build_forward_kernel(const OperatorMatrix& A, const EigenSolution& fwd,
                                      const ModelParams& params, double tol = 1e-12,
                                      const ScalarField* theta_init = nullptr);

// Q_ij = theta_j K_ji / theta_i.  Rows are NOT renormalized: their sums
// deviating from 1 measures the stationarity defect, recorded in
// prenorm_defect.  Throws on theta underflow (< 1e-300).
StochasticKernel build_backward_kernel(const StochasticKernel& K);

ScalarField apply_F(const StochasticKernel& K, const ScalarField& g);
ScalarField apply_F_star(const StochasticKernel& Q, const ScalarField& f);

struct SpectrumEstimate {
  double lambda2_modulus = 0.0;
  double gap = 1.0;
  double window_dispersion = 0.0;
  long iterations = 0;
  bool converged = false;
};

// Deflated power iteration in the theta-weighted 2-norm: after every kernel
// application the iterate is re-projected onto {g : <g,1>_theta = 0} and
// renormalized.  lambda2_modulus is the geometric mean of the step ratios
// over a trailing window of 20 iterations; converged when the window's
// absolute dispersion around that mean drops below tol.  A complex or
// near-degenerate second eigenvalue keeps the dispersion high and the
// estimate comes back flagged non-converged.
SpectrumEstimate estimate_gap(const StochasticKernel& K, const ScalarField& theta,
                              double tol = 1e-12, long max_iter = 200000,
                              std::uint64_t seed = 1);

double stationary_l1_defect(const StochasticKernel& K, const ScalarField& theta);

}  // namespace epm
