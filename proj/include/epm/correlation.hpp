#pragma once
// Lagged correlations of the stationary processes, exact (operator powers)
// and empirical (trajectories), plus exponential decay-rate fits.
//
// exact_correlation(M, theta, f, g, n) computes C_n = <f_c, M^n g_c>_theta
// with both observables centered to theta-mean zero.  With M = K this is the
// lag-n correlation E[g(Y_0) f(Y_n)] of the backward process; with M = Q it
// is E[g(X_0) f(X_n)] of the forward process.

#include <cstdint>
#include <span>
#include <vector>

#include "epm/simulate.hpp"
#include "epm/solver.hpp"

namespace epm {

struct CorrelationSeries {
  int n_max = 0;
  std::vector<double> exact;      // size n_max+1 when computed
  std::vector<double> empirical;  // size n_max+1 when computed
  std::vector<double> stderrs;    // batch-means standard errors, parallel to empirical
  double f_mean = 0.0;            // theta-means subtracted from the observables
  double g_mean = 0.0;
};

CorrelationSeries exact_correlation(const StochasticKernel& M, const ScalarField& theta,
                                    const ScalarField& f, const ScalarField& g, int n_max);

// C_hat_n = (1/(T-n)) sum_t g_c(X_t) f_c(X_{t+n}) with theta-centered
// observables and 50-batch batch-means standard errors.  Requires trajectory
// length >= 100 * n_max.
CorrelationSeries empirical_correlation(const Trajectory& traj, const ScalarField& f,
                                        const ScalarField& g, const ScalarField& theta,
                                        int n_max);

struct DecayFit {
  double rate = 0.0;       // e^{slope} of the ln|C_n| least-squares line
  double intercept = 0.0;  // log-linear intercept
  int window_lo = 0;
  int window_hi = 0;
  double r2 = 0.0;
  bool oscillation = false;  // set when >25% of consecutive usable lags change sign
};

// Least squares through (n, ln|C_n|) for n in [window_lo, n_max] with
// |C_n| > floor.  Throws std::invalid_argument with fewer than 5 usable lags.
DecayFit fit_decay(std::span<const double> series, double floor = 1e-13, int window_lo = 5);

}  // namespace epm
