#include <doctest.h>

#include <cmath>
#include <numeric>

#include "epm/grid.hpp"
#include "epm/model.hpp"
#include "test_helpers.hpp"

using namespace epm;
using epm::testing::kTwoPi;

TEST_CASE("wrap maps into [0,1) and is idempotent") {
  CHECK(wrap1(0.25) == 0.25);
  CHECK(wrap1(1.25) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(wrap1(-0.5) == 0.5);
  CHECK(wrap1(1.0) == 0.0);
  CHECK(wrap1(-3.0) == 0.0);

  std::vector<double> xs = {0.0,   0.25,  -0.5,  1.0,  -1e-17, 17.75,
                            -42.1, 1e-16, 0.999, -0.999, 123456.789};
  for (double x : xs) {
    double w = wrap1(x);
    CHECK(w >= 0.0);
    CHECK(w < 1.0);
    CHECK(wrap1(w) == w);  // exact idempotence
  }
  CHECK_THROWS_AS(wrap1(std::nan("")), std::domain_error);
  std::vector<double> bad = {1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(wrap(bad), std::domain_error);
}

TEST_CASE("flat and multi index maps are mutually inverse") {
  for (auto [n, m] : {std::pair{1, 7}, {2, 5}, {3, 4}}) {
    TorusGrid grid(n, m);
    for (std::int64_t flat = 0; flat < grid.size; ++flat) {
      auto mi = grid.multi_index(flat);
      CHECK(grid.flat_index(mi) == flat);
      for (int c = 0; c < n; ++c) {
        CHECK(mi[c] >= 0);
        CHECK(mi[c] < m);
      }
    }
    // wrapped components land on the same cell
    auto mi = grid.multi_index(grid.size / 2);
    auto shifted = mi;
    for (auto& v : shifted) v += m;
    CHECK(grid.flat_index(shifted) == grid.flat_index(mi));
  }
}

TEST_CASE("grid points lie in [0,1)") {
  TorusGrid grid(2, 9);
  for (std::int64_t i = 0; i < grid.size; ++i)
    for (double c : grid.point(i)) {
      CHECK(c >= 0.0);
      CHECK(c < 1.0);
    }
}

TEST_CASE("integrate: constants, harmonics, cos^2") {
  TorusGrid grid(1, 64);
  ScalarField c(grid, 3.25);
  CHECK(integrate(c) == doctest::Approx(3.25).epsilon(1e-15));

  ScalarField f(grid), f2(grid);
  for (std::int64_t i = 0; i < grid.size; ++i) {
    double x = grid.point(i)[0];
    f[i] = std::cos(kTwoPi * x);
    f2[i] = f[i] * f[i];
  }
  CHECK(std::abs(integrate(f)) < 1e-14);
  CHECK(integrate(f2) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("integrate is linear and shift invariant") {
  TorusGrid grid(1, 32);
  ScalarField f(grid), g(grid);
  for (std::int64_t i = 0; i < grid.size; ++i) {
    f[i] = std::sin(kTwoPi * 3.0 * i / 32.0) + 0.2 * i;
    g[i] = std::cos(kTwoPi * 2.0 * i / 32.0);
  }
  double a = 1.7, b = -0.3;
  ScalarField lin(grid);
  for (std::int64_t i = 0; i < grid.size; ++i) lin[i] = a * f[i] + b * g[i];
  CHECK(integrate(lin) ==
        doctest::Approx(a * integrate(f) + b * integrate(g)).epsilon(1e-13));

  for (int shift : {1, 5, 17}) {
    ScalarField rolled(grid);
    for (std::int64_t i = 0; i < grid.size; ++i) rolled[i] = f[(i + shift) % grid.size];
    CHECK(integrate(rolled) == doctest::Approx(integrate(f)).epsilon(1e-13));
  }
}

TEST_CASE("weighted_inner: normalization, means, symmetry") {
  TorusGrid grid(1, 64);
  ScalarField one(grid, 1.0);
  ScalarField theta(grid, 1.0 / 64.0);
  CHECK(weighted_inner(one, one, theta) == doctest::Approx(1.0).epsilon(1e-15));

  ScalarField g(grid);
  for (std::int64_t i = 0; i < grid.size; ++i) g[i] = 0.3 * i - 2.0;
  double mean = 0.0;
  for (std::int64_t i = 0; i < grid.size; ++i) mean += g[i] / 64.0;
  CHECK(weighted_inner(one, g, theta) == doctest::Approx(mean).epsilon(1e-13));

  ScalarField f = epm::testing::cos_field(grid);
  CHECK(weighted_inner(f, f, theta) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(weighted_inner(f, g, theta) == weighted_inner(g, f, theta));  // exact symmetry

  TorusGrid other(1, 32);
  ScalarField wrong(other, 1.0);
  CHECK_THROWS_AS(weighted_inner(f, wrong, theta), std::invalid_argument);
  ScalarField neg(grid, -1.0);
  CHECK_THROWS_AS(weighted_inner(f, g, neg), std::invalid_argument);
}
