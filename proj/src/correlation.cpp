#include "epm/correlation.hpp"

#include <cmath>
#include <stdexcept>

namespace epm {

namespace {

// theta-centered copy of an observable
std::vector<double> centered(const ScalarField& f, const ScalarField& theta, double& mean_out) {
  double m = 0.0;
  for (std::int64_t i = 0; i < f.size(); ++i) m += f[i] * theta[i];
  std::vector<double> c(f.values);
  for (double& v : c) v -= m;
  mean_out = m;
  return c;
}

}  // namespace

CorrelationSeries exact_correlation(const StochasticKernel& M, const ScalarField& theta,
                                    const ScalarField& f, const ScalarField& g, int n_max) {
  if (n_max < 1) throw std::invalid_argument("exact_correlation: n_max must be >= 1");
  if (!(f.grid == M.grid) || !(g.grid == M.grid) || !(theta.grid == M.grid))
    throw std::invalid_argument("exact_correlation: grid mismatch");
  const std::int64_t N = M.grid.size;

  CorrelationSeries s;
  s.n_max = n_max;
  std::vector<double> fc = centered(f, theta, s.f_mean);
  std::vector<double> gc = centered(g, theta, s.g_mean);

  s.exact.resize(static_cast<std::size_t>(n_max) + 1);
  ScalarField w(M.grid, gc);
  auto pair_up = [&](const ScalarField& v) {
    double c = 0.0;
    for (std::int64_t i = 0; i < N; ++i) c += theta[i] * fc[i] * v[i];
    return c;
  };
  s.exact[0] = pair_up(w);
  for (int n = 1; n <= n_max; ++n) {
    w = apply_F(M, w);  // one kernel application per lag
    s.exact[static_cast<std::size_t>(n)] = pair_up(w);
  }
  return s;
}

CorrelationSeries empirical_correlation(const Trajectory& traj, const ScalarField& f,
                                        const ScalarField& g, const ScalarField& theta,
                                        int n_max) {
  if (n_max < 1) throw std::invalid_argument("empirical_correlation: n_max must be >= 1");
  const std::int64_t T = static_cast<std::int64_t>(traj.states.size()) - 1;
  if (T < 100 * static_cast<std::int64_t>(n_max))
    throw std::invalid_argument("empirical_correlation: trajectory shorter than 100*n_max");
  if (traj.grid_size != f.size())
    throw std::invalid_argument("empirical_correlation: trajectory grid mismatch");

  CorrelationSeries s;
  s.n_max = n_max;
  std::vector<double> fc = centered(f, theta, s.f_mean);
  std::vector<double> gc = centered(g, theta, s.g_mean);

  s.empirical.resize(static_cast<std::size_t>(n_max) + 1);
  s.stderrs.resize(static_cast<std::size_t>(n_max) + 1);
  constexpr int kBatches = 50;

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int n = 0; n <= n_max; ++n) {
    const std::int64_t count = T - n + 1;  // products g(X_t) f(X_{t+n}), t = 0..T-n
    double total = 0.0;
    for (std::int64_t t = 0; t < count; ++t)
      total += gc[traj.states[static_cast<std::size_t>(t)]] *
               fc[traj.states[static_cast<std::size_t>(t + n)]];
    double mean = total / static_cast<double>(count);

    const std::int64_t bsize = count / kBatches;
    double bsum = 0.0, bsq = 0.0;
    if (bsize >= 1) {
      for (int b = 0; b < kBatches; ++b) {
        double m = 0.0;
        for (std::int64_t t = b * bsize; t < (b + 1) * bsize; ++t)
          m += gc[traj.states[static_cast<std::size_t>(t)]] *
               fc[traj.states[static_cast<std::size_t>(t + n)]];
        m /= static_cast<double>(bsize);
        bsum += m;
        bsq += m * m;
      }
      double bmean = bsum / kBatches;
      double var = (bsq / kBatches - bmean * bmean) * kBatches / (kBatches - 1);
      s.stderrs[static_cast<std::size_t>(n)] = std::sqrt(std::max(var, 0.0) / kBatches);
    } else {
      s.stderrs[static_cast<std::size_t>(n)] = 0.0;
    }
    s.empirical[static_cast<std::size_t>(n)] = mean;
  }
  return s;
}

DecayFit fit_decay(std::span<const double> series, double floor, int window_lo) {
  const int n_max = static_cast<int>(series.size()) - 1;
  std::vector<int> lags;
  std::vector<double> logs;
  for (int n = window_lo; n <= n_max; ++n) {
    double c = std::abs(series[static_cast<std::size_t>(n)]);
    if (c > floor) {
      lags.push_back(n);
      logs.push_back(std::log(c));
    }
  }
  if (lags.size() < 5)
    throw std::invalid_argument("fit_decay: fewer than 5 usable lags above the floor");

  const double m = static_cast<double>(lags.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t q = 0; q < lags.size(); ++q) {
    sx += lags[q];
    sy += logs[q];
    sxx += static_cast<double>(lags[q]) * lags[q];
    sxy += lags[q] * logs[q];
  }
  double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double intercept = (sy - slope * sx) / m;

  double ss_res = 0.0, ss_tot = 0.0;
  double ymean = sy / m;
  for (std::size_t q = 0; q < lags.size(); ++q) {
    double r = logs[q] - (intercept + slope * lags[q]);
    ss_res += r * r;
    double d = logs[q] - ymean;
    ss_tot += d * d;
  }

  DecayFit fit;
  fit.rate = std::exp(slope);
  fit.intercept = intercept;
  fit.window_lo = lags.front();
  fit.window_hi = lags.back();
  fit.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;

  int sign_changes = 0, pairs = 0;
  for (std::size_t q = 1; q < lags.size(); ++q) {
    if (lags[q] != lags[q - 1] + 1) continue;  // only consecutive lags count
    ++pairs;
    if ((series[static_cast<std::size_t>(lags[q])] < 0.0) !=
        (series[static_cast<std::size_t>(lags[q - 1])] < 0.0))
      ++sign_changes;
  }
  fit.oscillation = pairs > 0 && sign_changes > 0.25 * pairs;
  return fit;
}

}  // namespace epm
