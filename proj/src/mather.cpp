#include "epm/mather.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "epm/errors.hpp"

namespace epm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Left power iteration for the stationary vector of an arbitrary positive
// row-stochastic kernel.  Throws when it fails to settle (reducible kernel).
ScalarField stationary_of(const std::vector<double>& rows, const TorusGrid& grid) {
  const std::int64_t N = grid.size;
  ScalarField theta(grid, 1.0 / static_cast<double>(N));
  std::vector<double> next(static_cast<std::size_t>(N));
  for (long it = 0; it < 100000; ++it) {
    for (std::int64_t j = 0; j < N; ++j) {
      double s = 0.0;
      for (std::int64_t i = 0; i < N; ++i) s += theta[i] * rows[i * N + j];
      next[j] = s;
    }
    double sum = 0.0;
    for (double v : next) sum += v;
    double change = 0.0;
    for (std::int64_t j = 0; j < N; ++j) {
      next[j] /= sum;
      change = std::max(change, std::abs(next[j] - theta[j]) / std::max(next[j], 1e-300));
    }
    theta.values.swap(next);
    if (change < 1e-13) return theta;
  }
  throw std::invalid_argument("competitor: stationary vector did not converge (reducible kernel?)");
}

}  // namespace

DiscreteMeasure solved_measure(const StochasticKernel& K, const OperatorMatrix& A) {
  if (!(K.grid == A.grid)) throw std::invalid_argument("solved_measure: grid mismatch");
  DiscreteMeasure mu;
  mu.grid = K.grid;
  mu.theta = K.stationary;
  mu.rows = K.rows;
  mu.op = &A;
  return mu;
}

double action(const DiscreteMeasure& mu) {
  if (mu.op == nullptr) throw std::invalid_argument("action: measure carries no Lagrangian data");
  const std::int64_t N = mu.grid.size;
  double a = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    double row = 0.0;
    for (std::int64_t j = 0; j < N; ++j) {
      double p = mu.rows[i * N + j];
      if (p > 0.0) row += p * mu.op->mean_lagrangian[i * N + j];
    }
    a += mu.theta[i] * row;
  }
  return a;
}

double entropy(const DiscreteMeasure& mu, const ModelParams& params) {
  if (mu.op == nullptr) throw std::invalid_argument("entropy: measure carries no operator data");
  const std::int64_t N = mu.grid.size;
  const double eps = params.epsilon;
  double s = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    double row = 0.0;
    for (std::int64_t j = 0; j < N; ++j) {
      double p = mu.rows[i * N + j];
      if (p == 0.0) continue;  // 0 ln 0 = 0
      if (mu.op->log_at(i, j) == kNegInf)
        throw std::runtime_error("entropy: kernel mass outside the operator support");
      double log_density = std::log(p) + mu.op->log_measure +
                           mu.op->lump_log_correction(i, j, eps);
      row += p * log_density;
    }
    s += mu.theta[i] * row;
  }
  return s;
}

double objective(const DiscreteMeasure& mu, const ModelParams& params) {
  return action(mu) + params.epsilon * entropy(mu, params);
}

double holonomy_residual(const DiscreteMeasure& mu, const ScalarField& psi, double h) {
  if (!(psi.grid == mu.grid)) throw std::invalid_argument("holonomy_residual: grid mismatch");
  const std::int64_t N = mu.grid.size;
  double s = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    double row = 0.0;
    for (std::int64_t j = 0; j < N; ++j) row += mu.rows[i * N + j] * (psi[j] - psi[i]);
    s += mu.theta[i] * row;
  }
  return std::abs(s / h);
}

DiscreteMeasure competitor_from_kernel(std::vector<double> rows, const OperatorMatrix& A) {
  const std::int64_t N = A.grid.size;
  if (static_cast<std::int64_t>(rows.size()) != N * N)
    throw std::invalid_argument("competitor: kernel shape mismatch");
  for (std::int64_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (std::int64_t j = 0; j < N; ++j) {
      if (!(rows[i * N + j] > 0.0))
        throw std::invalid_argument("competitor: rows must be strictly positive");
      s += rows[i * N + j];
    }
    for (std::int64_t j = 0; j < N; ++j) rows[i * N + j] /= s;
  }
  DiscreteMeasure mu;
  mu.grid = A.grid;
  mu.rows = std::move(rows);
  mu.theta = stationary_of(mu.rows, A.grid);
  mu.op = &A;
  return mu;
}

DiscreteMeasure competitor_dirichlet(std::uint64_t seed, const OperatorMatrix& A) {
  const std::int64_t N = A.grid.size;
  std::mt19937_64 eng(seed);
  std::vector<double> rows(static_cast<std::size_t>(N) * N);
  for (auto& w : rows) {
    // Exponential(1) weights from a strictly interior uniform; normalized
    // rows are Dirichlet(1,...,1)
    double u = (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
    w = -std::log(u);
    if (!(w > 0.0)) w = 1e-300;
  }
  return competitor_from_kernel(std::move(rows), A);
}

DiscreteMeasure competitor_uniform(const OperatorMatrix& A) {
  const std::int64_t N = A.grid.size;
  std::vector<double> rows(static_cast<std::size_t>(N) * N, 1.0);
  return competitor_from_kernel(std::move(rows), A);
}

std::vector<SweepRow> sweep(const ModelParams& base, const TorusGrid& grid,
                            const std::vector<std::pair<double, double>>& eps_h,
                            const SweepOptions& opts) {
  std::vector<SweepRow> out;
  out.reserve(eps_h.size());
  for (const auto& [eps, h] : eps_h) {
    SweepRow row;
    row.epsilon = eps;
    row.h = h;
    try {
      ModelParams params = base;
      params.epsilon = eps;
      params.h = h;
      params.validate();
      double sigma = h * std::sqrt(eps);
      if (sigma < 3.0 * grid.delta)
        throw std::invalid_argument("sweep: resolution rule h*sqrt(eps) >= 3/m violated");

      OperatorMatrix A = assemble_forward(params, grid, opts.cutoff_sigmas);
      OperatorMatrix B = assemble_backward(params, grid, opts.cutoff_sigmas);
      EigenSolution fwd = solve_forward(A, params, opts.solve);
      EigenSolution bwd = solve_backward(B, params, opts.solve);
      ScalarField theta = build_theta(fwd, bwd, params);
      StochasticKernel K = build_forward_kernel(A, fwd, params, opts.solve.tol, &theta);
      SpectrumEstimate gap =
          estimate_gap(K, K.stationary, opts.gap_tol, opts.gap_max_iter, opts.gap_seed);
      DiscreteMeasure mu = solved_measure(K, A);

      row.lambda = fwd.lambda;
      row.lambda_over_h = fwd.lambda / h;
      row.gap = gap.gap;
      row.action_value = action(mu);
      row.entropy_value = entropy(mu, params);
      row.objective_value = row.action_value + eps * row.entropy_value;
      row.theta_argmax_index = field_argmax(K.stationary);
      row.theta_argmax_x = grid.point(row.theta_argmax_index);
      row.solved = true;
    } catch (const std::exception& e) {
      row.solved = false;
      row.error = e.what();
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace epm
