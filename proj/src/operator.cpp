#include "epm/operator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace epm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Online log-sum accumulator over periodic images: tracks max exponent plus
// rescaled sums of e^{t-tmax} and e^{t-tmax}*L.
struct EntryAccum {
  double tmax = kNegInf;
  double w = 0.0;
  double wl = 0.0;

  void add(double t, double L) {
    if (t <= tmax) {
      double e = std::exp(t - tmax);
      w += e;
      wl += e * L;
    } else {
      double s = std::exp(tmax - t);
      w = w * s + 1.0;
      wl = wl * s + L;
      tmax = t;
    }
  }
};

struct AssemblyContext {
  const ModelParams* params;
  TorusGrid grid;
  Direction direction;
  double cutoff_sigmas;
  double rad2;                // (cutoff * h * sqrt(eps))^2
  std::vector<double> points; // N x n grid coordinates
  std::vector<double> U;      // potential at grid points
  std::vector<double> hP;     // h * P
};

// One matrix entry: sum over integer image shifts k of exp(-L(x_src,(d+k)/h)/eps)
// inside the cutoff ball |d + k + hP| <= c*sigma, in lexicographic k order so
// results do not depend on scheduling.  d is the landing-minus-source base
// displacement, U evaluated at the source point.
void accumulate_entry(const AssemblyContext& ctx, const double* d, double u_src, double& log_out,
                      double& meanL_out) {
  const int n = ctx.grid.dim;
  const double h = ctx.params->h;
  const double inv_eps = 1.0 / ctx.params->epsilon;

  int klo[8], khi[8], k[8];
  for (int c = 0; c < n; ++c) {
    double center = -d[c] - ctx.hP[c];
    double half = std::sqrt(ctx.rad2);
    klo[c] = static_cast<int>(std::ceil(center - half));
    khi[c] = static_cast<int>(std::floor(center + half));
    k[c] = klo[c];
  }
  for (int c = 0; c < n; ++c)
    if (klo[c] > khi[c]) {  // box empty
      log_out = kNegInf;
      meanL_out = 0.0;
      return;
    }

  EntryAccum acc;
  while (true) {
    double r2 = 0.0;
    for (int c = 0; c < n; ++c) {
      double z = d[c] + k[c] + ctx.hP[c];
      r2 += z * z;
    }
    if (r2 <= ctx.rad2) {
      double vv = 0.0, pv = 0.0;
      for (int c = 0; c < n; ++c) {
        double v = (d[c] + k[c]) / h;
        vv += v * v;
        pv += ctx.params->P[c] * v;
      }
      double L = 0.5 * vv - u_src + pv;
      acc.add(-L * inv_eps, L);
    }
    // lexicographic odometer, last coordinate fastest
    int c = n - 1;
    while (c >= 0 && k[c] == khi[c]) {
      k[c] = klo[c];
      --c;
    }
    if (c < 0) break;
    ++k[c];
  }

  if (acc.w == 0.0) {
    log_out = kNegInf;
    meanL_out = 0.0;
  } else {
    log_out = acc.tmax + std::log(acc.w);
    meanL_out = acc.wl / acc.w;
  }
}

OperatorMatrix assemble(const ModelParams& params, const TorusGrid& grid, double cutoff_sigmas,
                        Direction dir) {
  params.validate();
  if (params.dim != grid.dim)
    throw std::invalid_argument("assemble: params and grid dimension mismatch");
  if (grid.dim > 8) throw std::invalid_argument("assemble: dimension > 8 not supported");
  if (!(cutoff_sigmas >= 6.0))
    throw std::invalid_argument("assemble: cutoff_sigmas must be >= 6");

  AssemblyContext ctx;
  ctx.params = &params;
  ctx.grid = grid;
  ctx.direction = dir;
  ctx.cutoff_sigmas = cutoff_sigmas;
  double sigma = params.h * std::sqrt(params.epsilon);
  ctx.rad2 = (cutoff_sigmas * sigma) * (cutoff_sigmas * sigma);
  const std::int64_t N = grid.size;
  const int n = grid.dim;

  ctx.points.resize(static_cast<std::size_t>(N) * n);
  ctx.U.resize(static_cast<std::size_t>(N));
  for (std::int64_t i = 0; i < N; ++i) {
    grid.point(i, std::span<double>(&ctx.points[i * n], n));
    ctx.U[i] = eval_U(params.potential, std::span<const double>(&ctx.points[i * n], n));
  }
  ctx.hP.resize(n);
  for (int c = 0; c < n; ++c) ctx.hP[c] = params.h * params.P[c];

  OperatorMatrix A;
  A.grid = grid;
  A.direction = dir;
  A.cutoff_sigmas = cutoff_sigmas;
  A.log_measure = std::log(static_cast<double>(N)) + n * std::log(params.h);
  A.entries.resize(static_cast<std::size_t>(N) * N);
  A.log_entries.resize(static_cast<std::size_t>(N) * N);
  A.mean_lagrangian.resize(static_cast<std::size_t>(N) * N);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < N; ++i) {
    double d[8];
    const double* xi = &ctx.points[i * n];
    for (std::int64_t j = 0; j < N; ++j) {
      const double* xj = &ctx.points[j * n];
      double u_src;
      if (dir == Direction::Forward) {
        // row = source x_i, column = landing cell y_j
        for (int c = 0; c < n; ++c) d[c] = xj[c] - xi[c];
        u_src = ctx.U[i];
      } else {
        // backward: landing y = x - hv, kernel weight carries L at the landing
        // point, so the source of the Lagrangian is the column point
        for (int c = 0; c < n; ++c) d[c] = xi[c] - xj[c];
        u_src = ctx.U[j];
      }
      double logw, meanL;
      accumulate_entry(ctx, d, u_src, logw, meanL);
      std::int64_t idx = i * N + j;
      A.log_entries[idx] = (logw == kNegInf) ? kNegInf : logw - A.log_measure;
      A.mean_lagrangian[idx] = meanL;
    }
  }

  A.linear_ok = true;
  for (std::int64_t idx = 0; idx < N * N; ++idx) {
    double e = std::exp(A.log_entries[idx]);
    A.entries[idx] = e;
    if (std::isinf(e)) A.linear_ok = false;
  }

  for (std::int64_t i = 0; i < N; ++i) {
    bool nonempty = false;
    for (std::int64_t j = 0; j < N && !nonempty; ++j)
      nonempty = A.log_entries[i * N + j] > kNegInf;
    if (!nonempty)
      throw std::invalid_argument("assemble: cutoff_sigmas too small, a row has no quadrature image");
  }
  return A;
}

}  // namespace

double OperatorMatrix::lump_log_correction(std::int64_t i, std::int64_t j, double epsilon) const {
  double la = log_at(i, j);
  if (la == kNegInf) return 0.0;
  return -mean_L(i, j) / epsilon - la - log_measure;
}

double OperatorMatrix::max_row_log_spread() const {
  const std::int64_t N = grid.size;
  double spread = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    double lo = std::numeric_limits<double>::infinity(), hi = kNegInf;
    for (std::int64_t j = 0; j < N; ++j) {
      double v = log_entries[i * N + j];
      if (v == kNegInf) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi > kNegInf) spread = std::max(spread, hi - lo);
  }
  return spread;
}

OperatorMatrix assemble_forward(const ModelParams& params, const TorusGrid& grid,
                                double cutoff_sigmas) {
  return assemble(params, grid, cutoff_sigmas, Direction::Forward);
}

OperatorMatrix assemble_backward(const ModelParams& params, const TorusGrid& grid,
                                 double cutoff_sigmas) {
  return assemble(params, grid, cutoff_sigmas, Direction::Backward);
}

ScalarField apply_G(const ModelParams& params, const OperatorMatrix& A, const ScalarField& phi) {
  if (!(phi.grid == A.grid)) throw std::invalid_argument("apply_G: field grid mismatch");
  for (double v : phi.values)
    if (!std::isfinite(v)) throw std::domain_error("apply_G: non-finite potential value");
  const std::int64_t N = A.grid.size;
  const double eh = params.epsilon * params.h;
  const double inv_eh = 1.0 / eh;
  ScalarField out(A.grid);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t i = 0; i < N; ++i) {
    const double* logrow = &A.log_entries[i * N];
    double mx = kNegInf;
    for (std::int64_t j = 0; j < N; ++j) {
      double t = logrow[j] - phi[j] * inv_eh;
      if (t > mx) mx = t;
    }
    double s = 0.0;
    for (std::int64_t j = 0; j < N; ++j) s += std::exp(logrow[j] - phi[j] * inv_eh - mx);
    out[i] = -eh * (mx + std::log(s));
  }
  for (std::int64_t i = 0; i < N; ++i)
    if (!std::isfinite(out[i])) throw std::logic_error("apply_G: empty operator row");
  return out;
}

}  // namespace epm
