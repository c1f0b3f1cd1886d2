#include "epm/solver.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "epm/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace epm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void matvec_rows(const std::vector<double>& rows, const std::vector<double>& u,
                 std::vector<double>& out) {
  const std::int64_t N = static_cast<std::int64_t>(u.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < N; ++i) {
    const double* row = &rows[i * N];
    double s = 0.0;
    for (std::int64_t j = 0; j < N; ++j) s += row[j] * u[j];
    out[i] = s;
  }
}

struct IterState {
  double lambda = 0.0;
  double residual = 0.0;  // sup|G[phi]-phi-lambda|/(eps h)
  long iterations = 0;
  bool converged = false;
};

// Linear-domain power iteration on u = e^{-phi/(eps h)}.  Returns false if the
// iterate underflows, in which case the caller restarts in the log domain.
bool iterate_linear(const OperatorMatrix& M, double eh, const SolveOptions& opts,
                    std::vector<double>& u, IterState& st) {
  const std::int64_t N = M.grid.size;
  std::vector<double> w(static_cast<std::size_t>(N));
  std::vector<double> diff(static_cast<std::size_t>(N));
  u.assign(static_cast<std::size_t>(N), 1.0);
  for (long it = 1; it <= opts.max_iter; ++it) {
    matvec_rows(M.entries, u, w);
    for (std::int64_t i = 0; i < N; ++i)
      if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
        if (w[i] < 0.0) throw std::logic_error("solve: negative iterate from a positive matrix");
        return false;  // underflow/overflow: retry in log domain
      }
    double mean = 0.0;
    for (std::int64_t i = 0; i < N; ++i) {
      diff[i] = std::log(w[i] / u[i]);
      mean += diff[i];
    }
    mean /= static_cast<double>(N);
    double sup = 0.0;
    for (std::int64_t i = 0; i < N; ++i) sup = std::max(sup, std::abs(diff[i] - mean));
    st.lambda = -eh * mean;
    st.residual = sup;
    st.iterations = it;
    double wmax = 0.0;
    for (double x : w) wmax = std::max(wmax, x);
    for (std::int64_t i = 0; i < N; ++i) u[i] = w[i] / wmax;
    if (sup < opts.tol) {
      st.converged = true;
      return true;
    }
  }
  return true;  // budget exhausted; caller reports non-convergence
}

// Log-domain iteration phi <- G[phi] - min(G[phi] - phi).
void iterate_log(const OperatorMatrix& M, const ModelParams& params, const SolveOptions& opts,
                 ScalarField& phi, IterState& st) {
  const std::int64_t N = M.grid.size;
  const double eh = params.epsilon * params.h;
  phi = ScalarField(M.grid, 0.0);
  std::vector<double> diff(static_cast<std::size_t>(N));
  for (long it = 1; it <= opts.max_iter; ++it) {
    ScalarField gphi = apply_G(params, M, phi);
    double mean = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < N; ++i) {
      diff[i] = gphi[i] - phi[i];
      mean += diff[i];
      dmin = std::min(dmin, diff[i]);
    }
    mean /= static_cast<double>(N);
    double sup = 0.0;
    for (std::int64_t i = 0; i < N; ++i) sup = std::max(sup, std::abs(diff[i] - mean));
    st.lambda = mean;
    st.residual = sup / eh;
    st.iterations = it;
    for (std::int64_t i = 0; i < N; ++i) phi[i] = gphi[i] - dmin;
    if (st.residual < opts.tol) {
      st.converged = true;
      return;
    }
  }
}

EigenSolution solve_impl(const OperatorMatrix& M, const ModelParams& params,
                         const SolveOptions& opts) {
  params.validate();
  if (M.grid.dim != params.dim) throw std::invalid_argument("solve: dimension mismatch");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solve: tol must be > 0");
  const double eh = params.epsilon * params.h;
  const std::int64_t N = M.grid.size;

  bool use_log;
  switch (opts.path) {
    case SolveOptions::Path::Linear:
      if (!M.linear_ok)
        throw std::invalid_argument("solve: linear path requested but entries overflowed");
      use_log = false;
      break;
    case SolveOptions::Path::Log:
      use_log = true;
      break;
    default:
      use_log = !M.linear_ok || M.max_row_log_spread() > opts.log_spread_threshold;
  }

  EigenSolution sol;
  sol.direction = M.direction;
  IterState st;
  ScalarField phi(M.grid);

  if (!use_log) {
    std::vector<double> u;
    if (iterate_linear(M, eh, opts, u, st)) {
      for (std::int64_t i = 0; i < N; ++i) phi[i] = -eh * std::log(u[i]);
    } else {
      use_log = true;  // underflow fallback
      st = IterState{};
    }
  }
  if (use_log) iterate_log(M, params, opts, phi, st);

  if (!st.converged)
    throw NonConvergenceError("solve: max_iter exceeded (residual " + std::to_string(st.residual) +
                                  ")",
                              st.residual, st.iterations);

  double pmin = phi[0];
  for (std::int64_t i = 0; i < N; ++i) pmin = std::min(pmin, phi[i]);
  for (std::int64_t i = 0; i < N; ++i) phi[i] -= pmin;

  sol.lambda = st.lambda;
  sol.Lambda = std::exp(-st.lambda / eh);
  sol.potential = std::move(phi);
  sol.residual = st.residual;
  sol.iterations = st.iterations;
  return sol;
}

}  // namespace

EigenSolution solve_forward(const OperatorMatrix& A, const ModelParams& params,
                            const SolveOptions& opts) {
  if (A.direction != Direction::Forward)
    throw std::invalid_argument("solve_forward: expected a forward operator");
  return solve_impl(A, params, opts);
}

EigenSolution solve_backward(const OperatorMatrix& B, const ModelParams& params,
                             const SolveOptions& opts) {
  if (B.direction != Direction::Backward)
    throw std::invalid_argument("solve_backward: expected a backward operator");
  return solve_impl(B, params, opts);
}

ScalarField build_theta(const EigenSolution& fwd, const EigenSolution& bwd,
                        const ModelParams& params) {
  if (!(fwd.potential.grid == bwd.potential.grid))
    throw std::invalid_argument("build_theta: solutions live on different grids");
  const std::int64_t N = fwd.potential.size();
  const double eh = params.epsilon * params.h;
  ScalarField theta(fwd.potential.grid);
  double tmax = kNegInf;
  for (std::int64_t i = 0; i < N; ++i) {
    theta[i] = -(fwd.potential[i] + bwd.potential[i]) / eh;
    tmax = std::max(tmax, theta[i]);
  }
  double sum = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    theta[i] = std::exp(theta[i] - tmax);
    sum += theta[i];
  }
  for (std::int64_t i = 0; i < N; ++i) theta[i] /= sum;
  return theta;
}

double stationary_l1_defect(const StochasticKernel& K, const ScalarField& theta) {
  const std::int64_t N = K.grid.size;
  double defect = 0.0;
  for (std::int64_t j = 0; j < N; ++j) {
    double s = 0.0;
    for (std::int64_t i = 0; i < N; ++i) s += theta[i] * K.rows[i * N + j];
    defect += std::abs(s - theta[j]);
  }
  return defect;
}

StochasticKernel build_forward_kernel(const OperatorMatrix& A, const EigenSolution& fwd,
                                      const ModelParams& params, double tol,
                                      const ScalarField* theta_init) {
  const std::int64_t N = A.grid.size;
  const double eh = params.epsilon * params.h;
  StochasticKernel K;
  K.grid = A.grid;
  K.direction = Direction::Forward;
  K.rows.resize(static_cast<std::size_t>(N) * N);
  const ScalarField& phi = fwd.potential;

  std::vector<double> defects(static_cast<std::size_t>(N));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < N; ++i) {
    double* row = &K.rows[i * N];
    double s = 0.0;
    for (std::int64_t j = 0; j < N; ++j) {
      double lk = A.log_entries[i * N + j] + (phi[i] - phi[j] + fwd.lambda) / eh;
      row[j] = std::exp(lk);
      s += row[j];
    }
    defects[i] = std::abs(s - 1.0);
    for (std::int64_t j = 0; j < N; ++j) row[j] /= s;
  }
  K.prenorm_defect = 0.0;
  for (double d : defects) K.prenorm_defect = std::max(K.prenorm_defect, d);
  if (K.prenorm_defect > 100.0 * tol)
    throw NonConvergenceError("build_forward_kernel: row-sum defect exceeds 100*tol",
                              K.prenorm_defect, fwd.iterations);

  // left power iteration for the stationary vector; theta^T K = theta^T holds
  // to near machine precision at the fixed point of the renormalized rows
  ScalarField theta = theta_init ? *theta_init : ScalarField(A.grid, 1.0 / static_cast<double>(N));
  std::vector<double> next(static_cast<std::size_t>(N));
  for (long it = 0; it < 20000; ++it) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t j = 0; j < N; ++j) {
      double s = 0.0;
      for (std::int64_t i = 0; i < N; ++i) s += theta[i] * K.rows[i * N + j];
      next[j] = s;
    }
    double sum = 0.0;
    for (double v : next) sum += v;
    double change = 0.0;
    for (std::int64_t j = 0; j < N; ++j) {
      next[j] /= sum;
      double base = std::max(next[j], 1e-300);
      change = std::max(change, std::abs(next[j] - theta[j]) / base);
    }
    theta.values.swap(next);
    if (change < 5e-14) break;
  }
  K.stationary = std::move(theta);
  K.stationary_l1_defect = stationary_l1_defect(K, K.stationary);
  return K;
}

StochasticKernel build_backward_kernel(const StochasticKernel& K) {
  const std::int64_t N = K.grid.size;
  const ScalarField& theta = K.stationary;
  for (std::int64_t i = 0; i < N; ++i)
    if (theta[i] < 1e-300)
      throw std::invalid_argument(
          "build_backward_kernel: stationary density underflow (epsilon too small for this grid)");
  StochasticKernel Q;
  Q.grid = K.grid;
  Q.direction = Direction::Backward;
  Q.rows.resize(static_cast<std::size_t>(N) * N);
  std::vector<double> defects(static_cast<std::size_t>(N));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < N; ++i) {
    double s = 0.0;
    for (std::int64_t j = 0; j < N; ++j) {
      double q = theta[j] * K.rows[j * N + i] / theta[i];
      Q.rows[i * N + j] = q;
      s += q;
    }
    defects[i] = std::abs(s - 1.0);
  }
  // rows are left as built: their sum defect is the stationarity check
  Q.prenorm_defect = 0.0;
  for (double d : defects) Q.prenorm_defect = std::max(Q.prenorm_defect, d);
  Q.stationary = theta;
  Q.stationary_l1_defect = stationary_l1_defect(Q, theta);
  return Q;
}

ScalarField apply_F(const StochasticKernel& K, const ScalarField& g) {
  if (!(g.grid == K.grid)) throw std::invalid_argument("apply_F: field grid mismatch");
  ScalarField out(K.grid);
  matvec_rows(K.rows, g.values, out.values);
  return out;
}

ScalarField apply_F_star(const StochasticKernel& Q, const ScalarField& f) {
  if (!(f.grid == Q.grid)) throw std::invalid_argument("apply_F_star: field grid mismatch");
  ScalarField out(Q.grid);
  matvec_rows(Q.rows, f.values, out.values);
  return out;
}

SpectrumEstimate estimate_gap(const StochasticKernel& K, const ScalarField& theta, double tol,
                              long max_iter, std::uint64_t seed) {
  if (!(theta.grid == K.grid)) throw std::invalid_argument("estimate_gap: theta grid mismatch");
  const std::int64_t N = K.grid.size;
  SpectrumEstimate est;
  if (N == 1) {
    est.converged = true;
    return est;
  }

  std::mt19937_64 eng(seed);
  std::vector<double> g(static_cast<std::size_t>(N));
  for (std::int64_t i = 0; i < N; ++i)
    g[i] = 2.0 * (static_cast<double>(eng() >> 11) * 0x1.0p-53) - 1.0;

  auto project = [&](std::vector<double>& v) {
    double m = 0.0;
    for (std::int64_t i = 0; i < N; ++i) m += theta[i] * v[i];
    for (std::int64_t i = 0; i < N; ++i) v[i] -= m;
  };
  auto norm_theta = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::int64_t i = 0; i < N; ++i) s += theta[i] * v[i] * v[i];
    return std::sqrt(s);
  };

  project(g);
  double nrm = norm_theta(g);
  if (nrm == 0.0) g[0] = 1.0, project(g), nrm = norm_theta(g);
  for (auto& v : g) v /= nrm;

  constexpr int kWindow = 20;
  double ring[kWindow];
  int filled = 0;
  std::vector<double> w(static_cast<std::size_t>(N));
  for (long it = 1; it <= max_iter; ++it) {
    matvec_rows(K.rows, g, w);
    project(w);
    double r = norm_theta(w);
    est.iterations = it;
    if (r == 0.0 || !std::isfinite(r)) {  // orthogonal complement annihilated in one step
      est.lambda2_modulus = 0.0;
      est.gap = 1.0;
      est.window_dispersion = 0.0;
      est.converged = std::isfinite(r);
      return est;
    }
    for (std::int64_t i = 0; i < N; ++i) g[i] = w[i] / r;
    ring[(it - 1) % kWindow] = r;
    if (filled < kWindow) ++filled;
    if (filled == kWindow) {
      double mean_log = 0.0;
      for (int q = 0; q < kWindow; ++q) mean_log += std::log(ring[q]);
      double geo = std::exp(mean_log / kWindow);
      double disp = 0.0;
      for (int q = 0; q < kWindow; ++q) disp = std::max(disp, std::abs(ring[q] - geo));
      est.lambda2_modulus = geo;
      est.gap = 1.0 - geo;
      est.window_dispersion = disp;
      if (disp < tol) {
        est.converged = true;
        return est;
      }
    }
  }
  est.converged = false;  // oscillating ratios: possible complex or near-degenerate pair
  return est;
}

}  // namespace epm
