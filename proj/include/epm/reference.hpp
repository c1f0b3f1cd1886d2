#pragma once
// Plain serial reference implementations of the hot kernels, kept independent
// of the OpenMP paths in operator.cpp/solver.cpp.  Tests compare the two and
// the benchmark target times them against each other.

#include <vector>

#include "epm/operator.hpp"

namespace epm::reference {

OperatorMatrix assemble_forward(const ModelParams& params, const TorusGrid& grid,
                                double cutoff_sigmas = 12.0);

std::vector<double> matvec(const std::vector<double>& row_major, const std::vector<double>& u);

ScalarField apply_G(const ModelParams& params, const OperatorMatrix& A, const ScalarField& phi);

struct PowerResult {
  double Lambda = 0.0;
  double lambda = 0.0;
  std::vector<double> u;  // max-normalized positive eigenvector
  long iterations = 0;
  double ratio_spread = 0.0;  // sup_i |ln((Au)_i/u_i) - mean| at exit
};

// Linear-domain power iteration, u <- Au / max(Au); stops when the per-entry
// log ratio spread drops below tol.
PowerResult power_iteration(const OperatorMatrix& A, const ModelParams& params, double tol,
                            long max_iter);

}  // namespace epm::reference
