#include <doctest.h>

#include <cmath>

#include "epm/model.hpp"
#include "test_helpers.hpp"

using namespace epm;
using epm::testing::kTwoPi;

TEST_CASE("eval_U: cosine values, periodicity, wrap") {
  PotentialSpec u = PotentialSpec::cosine(1);
  double x0 = 0.5;
  CHECK(eval_U(u, std::span<const double>(&x0, 1)) == doctest::Approx(-1.0).epsilon(1e-15));
  double x1 = 1.25;
  CHECK(std::abs(eval_U(u, std::span<const double>(&x1, 1))) < 1e-15);  // cos(pi/2)

  PotentialSpec z = PotentialSpec::zero();
  double x2 = 0.7312;
  CHECK(eval_U(z, std::span<const double>(&x2, 1)) == 0.0);

  for (double x : {0.1, 0.37, 0.92}) {
    double xp = x + 1.0;
    double a = eval_U(u, std::span<const double>(&x, 1));
    double b = eval_U(u, std::span<const double>(&xp, 1));
    CHECK(std::abs(a - b) < 1e-13);
  }
}

TEST_CASE("eval_U: tabulated accepts grid points only") {
  TorusGrid grid(1, 8);
  ScalarField tab(grid);
  for (std::int64_t i = 0; i < 8; ++i) tab[i] = static_cast<double>(i);
  PotentialSpec u = PotentialSpec::tabulated(tab);
  double x = 3.0 / 8.0;
  CHECK(eval_U(u, std::span<const double>(&x, 1)) == 3.0);
  double xw = 3.0 / 8.0 + 2.0;  // wraps onto the same node
  CHECK(eval_U(u, std::span<const double>(&xw, 1)) == 3.0);
  double bad = 0.3;
  CHECK_THROWS_AS(eval_U(u, std::span<const double>(&bad, 1)), std::invalid_argument);
}

TEST_CASE("eval_L matches direct substitution") {
  ModelParams p = epm::testing::cosine_params(1, 1.0, 1.0, 0.3);
  double x = 0.5, v = 2.0;
  // 0.5*4 - (-1) + 0.3*2 = 3.6
  CHECK(eval_L(p, std::span<const double>(&x, 1), std::span<const double>(&v, 1)) ==
        doctest::Approx(3.6).epsilon(1e-15));

  ModelParams fr = epm::testing::free_params();
  double v0 = 0.0;
  CHECK(eval_L(fr, std::span<const double>(&x, 1), std::span<const double>(&v0, 1)) == 0.0);

  ModelParams tilt = epm::testing::free_params();
  tilt.P[0] = 1.0;
  double vm = -1.0;
  CHECK(eval_L(tilt, std::span<const double>(&x, 1), std::span<const double>(&vm, 1)) ==
        doctest::Approx(-0.5).epsilon(1e-15));

  double xy[2] = {0.1, 0.2};
  CHECK_THROWS_AS(eval_L(fr, std::span<const double>(xy, 2), std::span<const double>(&v, 1)),
                  std::invalid_argument);
}

TEST_CASE("ModelParams::validate names the failing field") {
  ModelParams p = epm::testing::free_params();
  p.epsilon = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("epsilon"), std::invalid_argument);
  p = epm::testing::free_params();
  p.h = 0.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("h"), std::invalid_argument);
  p = epm::testing::free_params();
  p.P.push_back(1.0);
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("P"), std::invalid_argument);
}
