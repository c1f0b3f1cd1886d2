#pragma once
// Shared builders and small statistics helpers for the test suites.

#include <cmath>
#include <numbers>
#include <vector>

#include "epm/config.hpp"
#include "epm/model.hpp"
#include "epm/operator.hpp"
#include "epm/solver.hpp"

namespace epm::testing {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline ModelParams free_params(int n = 1, double eps = 1.0, double h = 1.0) {
  ModelParams p;
  p.dim = n;
  p.epsilon = eps;
  p.h = h;
  p.P.assign(n, 0.0);
  p.potential = PotentialSpec::zero();
  return p;
}

inline ModelParams cosine_params(int n = 1, double eps = 0.5, double h = 0.5, double tilt = 0.0) {
  ModelParams p = free_params(n, eps, h);
  p.potential = PotentialSpec::cosine(n);
  if (tilt != 0.0) p.P[0] = tilt;
  return p;
}

// closed-form effective value when U == 0
inline double free_lambda(const ModelParams& p) {
  double p2 = 0.0;
  for (double v : p.P) p2 += v * v;
  return -(p.epsilon * p.h * p.dim / 2.0) * std::log(kTwoPi * p.epsilon) - p.h * p2 / 2.0;
}

struct SolvedModel {
  OperatorMatrix A;
  OperatorMatrix B;
  EigenSolution fwd;
  EigenSolution bwd;
  ScalarField theta;  // paper-formula construction
  StochasticKernel K;
  StochasticKernel Q;
};

inline SolvedModel solve_model(const ModelParams& params, int m, double cutoff = 12.0,
                               double tol = 1e-12) {
  SolvedModel s;
  TorusGrid grid(params.dim, m);
  s.A = assemble_forward(params, grid, cutoff);
  s.B = assemble_backward(params, grid, cutoff);
  SolveOptions opts;
  opts.tol = tol;
  s.fwd = solve_forward(s.A, params, opts);
  s.bwd = solve_backward(s.B, params, opts);
  s.theta = build_theta(s.fwd, s.bwd, params);
  s.K = build_forward_kernel(s.A, s.fwd, params, tol, &s.theta);
  s.Q = build_backward_kernel(s.K);
  return s;
}

inline ScalarField cos_field(const TorusGrid& grid, int axis = 0) {
  TrigTerm t;
  t.freq.assign(grid.dim, 0);
  t.freq[axis] = 1;
  t.cos_amp = 1.0;
  return trig_field(grid, t);
}

// P(chi2 > x) via the Wilson-Hilferty normal approximation; adequate for the
// 1e-3 significance tests used here.
inline double chi2_sf(double x, double dof) {
  double z = (std::cbrt(x / dof) - (1.0 - 2.0 / (9.0 * dof))) / std::sqrt(2.0 / (9.0 * dof));
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace epm::testing
