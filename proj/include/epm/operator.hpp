#pragma once
// Dense discretizations of the forward transfer operator (kernel
// exp(-L(x,v)/eps), landing point y = x + hv) and its backward counterpart
// (landing y = x - hv).  The velocity integral is turned into a sum over the
// grid by the substitution y = x + hv and periodization over integer image
// shifts inside a cutoff ball of radius cutoff_sigmas * h * sqrt(eps) around
// the Gaussian center.

#include <cstdint>
#include <vector>

#include "epm/grid.hpp"
#include "epm/model.hpp"

namespace epm {

enum class Direction { Forward, Backward };

// Row i = source point, column j = landing cell.  entries[i][j] is
// (1/(N h^n)) * sum over included images k of exp(-L(x_i,(y_j+k-x_i)/h)/eps);
// mean_lagrangian[i][j] is the weight-averaged L over those images, so the
// action integral stays computable after images are lumped into one column.
// log_entries is always populated (-inf where no image falls in the cutoff);
// entries may overflow to +inf for extreme eps, in which case linear_ok is
// false and callers must stay in the log domain.
struct OperatorMatrix {
  TorusGrid grid;
  Direction direction = Direction::Forward;
  double cutoff_sigmas = 12.0;
  double log_measure = 0.0;  // ln(N h^n)
  bool linear_ok = true;
  std::vector<double> entries;
  std::vector<double> log_entries;
  std::vector<double> mean_lagrangian;

  double at(std::int64_t i, std::int64_t j) const { return entries[i * grid.size + j]; }
  double log_at(std::int64_t i, std::int64_t j) const { return log_entries[i * grid.size + j]; }
  double mean_L(std::int64_t i, std::int64_t j) const { return mean_lagrangian[i * grid.size + j]; }

  // ln correction from lumping several images into one column: the log of the
  // velocity-space density carried by a kernel probability p at entry (i,j)
  // is ln p + log_measure + lump_log_correction(i,j,eps).  Zero for a single
  // image, negative when several images share the column.
  double lump_log_correction(std::int64_t i, std::int64_t j, double epsilon) const;

  double max_row_log_spread() const;
};

OperatorMatrix assemble_forward(const ModelParams& params, const TorusGrid& grid,
                                double cutoff_sigmas = 12.0);
OperatorMatrix assemble_backward(const ModelParams& params, const TorusGrid& grid,
                                 double cutoff_sigmas = 12.0);

// G[phi]_i = -eps*h*ln( sum_j A_ij exp(-phi_j/(eps h)) ), evaluated with
// log-sum-exp stabilization (row max exponent subtracted).
ScalarField apply_G(const ModelParams& params, const OperatorMatrix& A, const ScalarField& phi);

}  // namespace epm
