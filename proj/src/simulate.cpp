#include "epm/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace epm {

AliasTable::AliasTable(std::span<const double> weights) {
  const std::int64_t n = static_cast<std::int64_t>(weights.size());
  if (n == 0) throw std::invalid_argument("AliasTable: empty distribution");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("AliasTable: weights must be finite and >= 0");
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("AliasTable: weights sum to zero");

  prob_.resize(static_cast<std::size_t>(n));
  alias_.assign(static_cast<std::size_t>(n), -1);
  std::vector<double> scaled(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) scaled[i] = weights[i] / sum * static_cast<double>(n);

  std::vector<std::int64_t> small, large;
  small.reserve(static_cast<std::size_t>(n));
  large.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) (scaled[i] < 1.0 ? small : large).push_back(i);

  while (!small.empty() && !large.empty()) {
    std::int64_t s = small.back(), l = large.back();
    small.pop_back();
    large.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::int64_t i : large) prob_[i] = 1.0;
  for (std::int64_t i : small) prob_[i] = 1.0;  // numerical leftovers
}

std::int64_t AliasTable::sample(Rng& rng) const {
  const std::int64_t n = size();
  std::int64_t cell = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(n));
  if (cell >= n) cell = n - 1;
  if (rng.uniform() < prob_[cell] || alias_[cell] < 0) return cell;
  return alias_[cell];
}

SamplerTable build_sampler(const StochasticKernel& kernel, const ScalarField& theta) {
  if (!(theta.grid == kernel.grid)) throw std::invalid_argument("build_sampler: grid mismatch");
  const std::int64_t N = kernel.grid.size;
  SamplerTable t;
  t.initial = AliasTable(theta.values);
  t.rows.reserve(static_cast<std::size_t>(N));
  for (std::int64_t i = 0; i < N; ++i)
    t.rows.emplace_back(std::span<const double>(&kernel.rows[i * N], static_cast<std::size_t>(N)));
  return t;
}

std::int64_t sample_initial(const ScalarField& theta, Rng& rng) {
  const std::int64_t N = theta.size();
  double sum = 0.0;
  for (std::int64_t i = 0; i < N; ++i) sum += theta[i];
  double u = rng.uniform() * sum;
  double acc = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    acc += theta[i];
    if (u < acc) return i;
  }
  return N - 1;
}

std::int64_t step(const StochasticKernel& kernel, std::int64_t i, Rng& rng) {
  const std::int64_t N = kernel.grid.size;
  if (i < 0 || i >= N) throw std::invalid_argument("step: state index out of range");
  const double* row = &kernel.rows[i * N];
  double sum = 0.0;
  for (std::int64_t j = 0; j < N; ++j) sum += row[j];
  double u = rng.uniform() * sum;
  double acc = 0.0;
  for (std::int64_t j = 0; j < N; ++j) {
    acc += row[j];
    if (u < acc) return j;
  }
  return N - 1;
}

Trajectory simulate(const StochasticKernel& kernel, const ScalarField& theta, std::int64_t T,
                    std::uint64_t seed) {
  if (T < 0) throw std::invalid_argument("simulate: T must be >= 0");
  SamplerTable table = build_sampler(kernel, theta);
  Rng rng(seed);
  Trajectory traj;
  traj.direction = kernel.direction;
  traj.seed = seed;
  traj.grid_size = kernel.grid.size;
  traj.states.resize(static_cast<std::size_t>(T) + 1);
  std::int64_t x = table.initial.sample(rng);
  traj.states[0] = static_cast<std::uint32_t>(x);
  for (std::int64_t t = 1; t <= T; ++t) {
    x = table.rows[static_cast<std::size_t>(x)].sample(rng);
    traj.states[static_cast<std::size_t>(t)] = static_cast<std::uint32_t>(x);
  }
  return traj;
}

double minimal_image(double d) {
  double r = d - std::floor(d);
  if (r >= 0.5) r -= 1.0;
  return r;
}

std::vector<double> kernel_mean_displacement(const StochasticKernel& kernel) {
  const TorusGrid& grid = kernel.grid;
  const std::int64_t N = grid.size;
  const int n = grid.dim;
  const ScalarField& theta = kernel.stationary;
  std::vector<double> mean(n, 0.0);
  std::vector<int> mi(n), mj(n);
  for (std::int64_t i = 0; i < N; ++i) {
    grid.multi_index(i, mi);
    for (std::int64_t j = 0; j < N; ++j) {
      grid.multi_index(j, mj);
      double w = theta[i] * kernel.rows[i * N + j];
      for (int c = 0; c < n; ++c) {
        int dc = (mj[c] - mi[c] + grid.points) % grid.points;
        if (2 * dc == grid.points) continue;  // antipodal tie: +-1/2 images cancel
        mean[c] += w * minimal_image(dc * grid.delta);
      }
    }
  }
  return mean;
}

double kernel_displacement_variance(const StochasticKernel& kernel, int coord) {
  const TorusGrid& grid = kernel.grid;
  const std::int64_t N = grid.size;
  const ScalarField& theta = kernel.stationary;
  std::vector<int> mi(grid.dim), mj(grid.dim);
  double m1 = 0.0, m2 = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    grid.multi_index(i, mi);
    for (std::int64_t j = 0; j < N; ++j) {
      grid.multi_index(j, mj);
      double w = theta[i] * kernel.rows[i * N + j];
      int dc = (mj[coord] - mi[coord] + grid.points) % grid.points;
      double disp = minimal_image(dc * grid.delta);
      if (2 * dc == grid.points) {
        m2 += w * 0.25;  // mean contribution cancels, second moment does not
      } else {
        m1 += w * disp;
        m2 += w * disp * disp;
      }
    }
  }
  return m2 - m1 * m1;
}

}  // namespace epm
