#include "epm/reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "epm/errors.hpp"

namespace epm::reference {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

// Straight-line serial assembly: per entry, collect the exponents of every
// image in a scratch buffer, then do a two-pass log-sum-exp.
OperatorMatrix assemble_forward(const ModelParams& params, const TorusGrid& grid,
                                double cutoff_sigmas) {
  params.validate();
  if (params.dim != grid.dim)
    throw std::invalid_argument("reference::assemble_forward: dimension mismatch");
  if (!(cutoff_sigmas >= 6.0))
    throw std::invalid_argument("reference::assemble_forward: cutoff_sigmas must be >= 6");

  const std::int64_t N = grid.size;
  const int n = grid.dim;
  const double h = params.h;
  const double eps = params.epsilon;
  const double sigma = h * std::sqrt(eps);
  const double rad = cutoff_sigmas * sigma;

  OperatorMatrix A;
  A.grid = grid;
  A.direction = Direction::Forward;
  A.cutoff_sigmas = cutoff_sigmas;
  A.log_measure = std::log(static_cast<double>(N)) + n * std::log(h);
  A.entries.assign(static_cast<std::size_t>(N) * N, 0.0);
  A.log_entries.assign(static_cast<std::size_t>(N) * N, kNegInf);
  A.mean_lagrangian.assign(static_cast<std::size_t>(N) * N, 0.0);

  std::vector<double> ts, ls, xi(n), xj(n), v(n);
  std::vector<int> k(n), klo(n), khi(n);
  for (std::int64_t i = 0; i < N; ++i) {
    grid.point(i, xi);
    for (std::int64_t j = 0; j < N; ++j) {
      grid.point(j, xj);
      ts.clear();
      ls.clear();
      bool empty = false;
      for (int c = 0; c < n; ++c) {
        double center = -(xj[c] - xi[c]) - h * params.P[c];
        klo[c] = static_cast<int>(std::ceil(center - rad));
        khi[c] = static_cast<int>(std::floor(center + rad));
        k[c] = klo[c];
        if (klo[c] > khi[c]) empty = true;
      }
      if (empty) continue;
      while (true) {
        double r2 = 0.0;
        for (int c = 0; c < n; ++c) {
          double z = (xj[c] - xi[c]) + k[c] + h * params.P[c];
          r2 += z * z;
        }
        if (r2 <= rad * rad) {
          for (int c = 0; c < n; ++c) v[c] = ((xj[c] - xi[c]) + k[c]) / h;
          double L = eval_L(params, xi, v);
          ts.push_back(-L / eps);
          ls.push_back(L);
        }
        int c = n - 1;
        while (c >= 0 && k[c] == khi[c]) {
          k[c] = klo[c];
          --c;
        }
        if (c < 0) break;
        ++k[c];
      }
      if (ts.empty()) continue;
      double mx = ts[0];
      for (double t : ts) mx = std::max(mx, t);
      double w = 0.0, wl = 0.0;
      for (std::size_t q = 0; q < ts.size(); ++q) {
        double e = std::exp(ts[q] - mx);
        w += e;
        wl += e * ls[q];
      }
      std::int64_t idx = i * N + j;
      A.log_entries[idx] = mx + std::log(w) - A.log_measure;
      A.entries[idx] = std::exp(A.log_entries[idx]);
      A.mean_lagrangian[idx] = wl / w;
    }
  }

  A.linear_ok = true;
  for (double e : A.entries)
    if (std::isinf(e)) A.linear_ok = false;
  return A;
}

std::vector<double> matvec(const std::vector<double>& row_major, const std::vector<double>& u) {
  const std::size_t N = u.size();
  if (row_major.size() != N * N)
    throw std::invalid_argument("reference::matvec: shape mismatch");
  std::vector<double> out(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    double s = 0.0;
    const double* row = &row_major[i * N];
    for (std::size_t j = 0; j < N; ++j) s += row[j] * u[j];
    out[i] = s;
  }
  return out;
}

ScalarField apply_G(const ModelParams& params, const OperatorMatrix& A, const ScalarField& phi) {
  const std::int64_t N = A.grid.size;
  const double eh = params.epsilon * params.h;
  ScalarField out(A.grid);
  for (std::int64_t i = 0; i < N; ++i) {
    double mx = kNegInf;
    for (std::int64_t j = 0; j < N; ++j)
      mx = std::max(mx, A.log_entries[i * N + j] - phi[j] / eh);
    double s = 0.0;
    for (std::int64_t j = 0; j < N; ++j)
      s += std::exp(A.log_entries[i * N + j] - phi[j] / eh - mx);
    out[i] = -eh * (mx + std::log(s));
  }
  return out;
}

PowerResult power_iteration(const OperatorMatrix& A, const ModelParams& params, double tol,
                            long max_iter) {
  if (!A.linear_ok)
    throw std::invalid_argument("reference::power_iteration: operator overflowed the linear domain");
  const std::int64_t N = A.grid.size;
  const double eh = params.epsilon * params.h;
  PowerResult res;
  res.u.assign(static_cast<std::size_t>(N), 1.0);
  for (long it = 1; it <= max_iter; ++it) {
    std::vector<double> w = matvec(A.entries, res.u);
    double mean_log = 0.0;
    for (std::int64_t i = 0; i < N; ++i) mean_log += std::log(w[i] / res.u[i]);
    mean_log /= static_cast<double>(N);
    double spread = 0.0;
    for (std::int64_t i = 0; i < N; ++i)
      spread = std::max(spread, std::abs(std::log(w[i] / res.u[i]) - mean_log));
    double wmax = 0.0;
    for (double x : w) wmax = std::max(wmax, x);
    for (std::int64_t i = 0; i < N; ++i) res.u[i] = w[i] / wmax;
    res.iterations = it;
    res.ratio_spread = spread;
    if (spread < tol) {
      res.Lambda = std::exp(mean_log);
      res.lambda = -eh * mean_log;
      return res;
    }
  }
  throw NonConvergenceError("reference::power_iteration: max_iter exceeded", res.ratio_spread,
                            res.iterations);
}

}  // namespace epm::reference
