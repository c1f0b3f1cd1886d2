#pragma once
// Stationary chain simulation on the discrete torus: the chain lives on grid
// indices and steps by sampling rows of the discretized kernel, so simulator
// output is directly comparable to operator computations.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "epm/solver.hpp"

namespace epm {

// Uniform doubles built from raw mt19937_64 output ((bits >> 11) * 2^-53),
// so draws do not depend on library distribution internals.  Streams for
// parallel trajectories use seed = base_seed + trajectory_index.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t bits() { return eng_(); }
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }  // [0,1)
  double uniform_open() {                                                     // (0,1)
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 eng_;
};

// Walker alias table: O(n) build, two uniforms per draw.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);  // normalizes internally

  std::int64_t sample(Rng& rng) const;
  std::int64_t size() const { return static_cast<std::int64_t>(prob_.size()); }

 private:
  std::vector<double> prob_;
  std::vector<std::int64_t> alias_;
};

struct SamplerTable {
  AliasTable initial;            // theta
  std::vector<AliasTable> rows;  // one per kernel row
};

SamplerTable build_sampler(const StochasticKernel& kernel, const ScalarField& theta);

struct Trajectory {
  Direction direction = Direction::Forward;
  std::uint64_t seed = 0;
  std::int64_t grid_size = 0;
  std::vector<std::uint32_t> states;  // length T+1
};

// One-shot draws by inverse-CDF scan (exact, O(N)).
std::int64_t sample_initial(const ScalarField& theta, Rng& rng);
std::int64_t step(const StochasticKernel& kernel, std::int64_t i, Rng& rng);

// X_0 ~ theta, X_{t+1} ~ kernel row X_t, via alias tables.  Deterministic
// given (kernel, theta, T, seed) and independent of thread count.
Trajectory simulate(const StochasticKernel& kernel, const ScalarField& theta, std::int64_t T,
                    std::uint64_t seed);

// Minimal-image displacement, wrapped to [-1/2, 1/2).
double minimal_image(double d);

// Exact kernel displacement moments (theta-averaged over rows).  The mean
// uses a tie-averaged convention at the antipodal cell of an even grid
// (its +-1/2 images cancel), so symmetric kernels have mean exactly zero.
std::vector<double> kernel_mean_displacement(const StochasticKernel& kernel);
double kernel_displacement_variance(const StochasticKernel& kernel, int coord);

}  // namespace epm
