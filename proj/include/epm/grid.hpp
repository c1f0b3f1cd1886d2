#pragma once
// Uniform periodic grid on the unit torus [0,1)^n and scalar fields on it.
// All types are immutable-by-convention after construction and safe to read
// from multiple threads.

#include <cstdint>
#include <span>
#include <vector>

namespace epm {

struct TorusGrid {
  int dim = 1;            // n
  int points = 1;         // m, points per axis
  std::int64_t size = 1;  // N = m^n
  double delta = 1.0;     // 1/m

  TorusGrid() = default;
  TorusGrid(int n, int m);

  bool operator==(const TorusGrid&) const = default;

  // flat <-> multi index maps; the last coordinate varies fastest.
  void multi_index(std::int64_t flat, std::span<int> out) const;
  std::vector<int> multi_index(std::int64_t flat) const;
  // Accepts out-of-range components and wraps them mod m.
  std::int64_t flat_index(std::span<const int> mi) const;

  void point(std::int64_t flat, std::span<double> out) const;
  std::vector<double> point(std::int64_t flat) const;
};

struct ScalarField {
  TorusGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const TorusGrid& g, double fill = 0.0);
  ScalarField(const TorusGrid& g, std::vector<double> v);  // throws on length mismatch

  double& operator[](std::int64_t i) { return values[i]; }
  double operator[](std::int64_t i) const { return values[i]; }
  std::int64_t size() const { return grid.size; }
};

double wrap1(double x);  // x mod 1 in [0,1); throws std::domain_error on non-finite
std::vector<double> wrap(std::span<const double> x);

// (1/N) sum_i f(x_i): the trapezoidal rule on a uniform periodic grid.
double integrate(const ScalarField& f);

// sum_i f_i g_i theta_i with theta a discrete probability vector.
double weighted_inner(const ScalarField& f, const ScalarField& g, const ScalarField& theta);

double field_min(const ScalarField& f);
double field_max(const ScalarField& f);
std::int64_t field_argmax(const ScalarField& f);  // first index attaining the max

}  // namespace epm
