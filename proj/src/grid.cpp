#include "epm/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace epm {

TorusGrid::TorusGrid(int n, int m) : dim(n), points(m) {
  if (n < 1) throw std::invalid_argument("TorusGrid: dimension n must be >= 1");
  if (m < 1) throw std::invalid_argument("TorusGrid: points per axis m must be >= 1");
  size = 1;
  for (int c = 0; c < n; ++c) {
    if (size > (std::int64_t(1) << 40) / m)
      throw std::invalid_argument("TorusGrid: m^n exceeds supported size");
    size *= m;
  }
  delta = 1.0 / m;
}

void TorusGrid::multi_index(std::int64_t flat, std::span<int> out) const {
  for (int c = dim - 1; c >= 0; --c) {
    out[c] = static_cast<int>(flat % points);
    flat /= points;
  }
}

std::vector<int> TorusGrid::multi_index(std::int64_t flat) const {
  std::vector<int> mi(dim);
  multi_index(flat, mi);
  return mi;
}

std::int64_t TorusGrid::flat_index(std::span<const int> mi) const {
  std::int64_t flat = 0;
  for (int c = 0; c < dim; ++c) {
    int v = mi[c] % points;
    if (v < 0) v += points;
    flat = flat * points + v;
  }
  return flat;
}

void TorusGrid::point(std::int64_t flat, std::span<double> out) const {
  for (int c = dim - 1; c >= 0; --c) {
    out[c] = static_cast<double>(flat % points) * delta;
    flat /= points;
  }
}

std::vector<double> TorusGrid::point(std::int64_t flat) const {
  std::vector<double> x(dim);
  point(flat, x);
  return x;
}

ScalarField::ScalarField(const TorusGrid& g, double fill)
    : grid(g), values(static_cast<std::size_t>(g.size), fill) {}

ScalarField::ScalarField(const TorusGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (static_cast<std::int64_t>(values.size()) != grid.size)
    throw std::invalid_argument("ScalarField: value count does not match grid size");
}

double wrap1(double x) {
  if (!std::isfinite(x)) throw std::domain_error("wrap: non-finite coordinate");
  double r = x - std::floor(x);
  if (r >= 1.0) r -= 1.0;  // rounding of x - floor(x) can land exactly on 1
  return r;
}

std::vector<double> wrap(std::span<const double> x) {
  std::vector<double> r(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) r[c] = wrap1(x[c]);
  return r;
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values) {
    if (!std::isfinite(v)) throw std::domain_error("integrate: non-finite field value");
    s += v;
  }
  return s / static_cast<double>(f.grid.size);
}

double weighted_inner(const ScalarField& f, const ScalarField& g, const ScalarField& theta) {
  if (!(f.grid == g.grid) || !(f.grid == theta.grid))
    throw std::invalid_argument("weighted_inner: fields live on different grids");
  double s = 0.0;
  for (std::int64_t i = 0; i < f.size(); ++i) {
    if (theta[i] < 0.0) throw std::invalid_argument("weighted_inner: theta has a negative entry");
    s += f[i] * g[i] * theta[i];
  }
  return s;
}

double field_min(const ScalarField& f) {
  double m = f.values[0];
  for (double v : f.values) m = std::min(m, v);
  return m;
}

double field_max(const ScalarField& f) {
  double m = f.values[0];
  for (double v : f.values) m = std::max(m, v);
  return m;
}

std::int64_t field_argmax(const ScalarField& f) {
  std::int64_t best = 0;
  for (std::int64_t i = 1; i < f.size(); ++i)
    if (f[i] > f[best]) best = i;
  return best;
}

}  // namespace epm
