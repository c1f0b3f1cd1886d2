// Times the OpenMP kernels against the serial reference implementations and
// checks they agree.  Usage: bench_kernels [n] [m] [epsilon] [h] [reps]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "epm/operator.hpp"
#include "epm/reference.hpp"
#include "epm/solver.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_ms(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    double t0 = now_ms();
    fn();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 1;
  int m = argc > 2 ? std::atoi(argv[2]) : 256;
  double eps = argc > 3 ? std::atof(argv[3]) : 0.5;
  double h = argc > 4 ? std::atof(argv[4]) : 0.5;
  int reps = argc > 5 ? std::atoi(argv[5]) : 3;

  epm::ModelParams params;
  params.dim = n;
  params.epsilon = eps;
  params.h = h;
  params.P.assign(n, 0.0);
  params.potential = epm::PotentialSpec::cosine(n);
  epm::TorusGrid grid(n, m);

  int threads = 1;
#ifdef _OPENMP
#pragma omp parallel
  {
#pragma omp master
    threads = omp_get_num_threads();
  }
#endif
  std::printf("n=%d m=%d N=%lld epsilon=%g h=%g threads=%d\n", n, m,
              static_cast<long long>(grid.size), eps, h, threads);

  epm::OperatorMatrix A_par, A_ser;
  double t_asm_par = time_ms(reps, [&] { A_par = epm::assemble_forward(params, grid); });
  double t_asm_ser = time_ms(reps, [&] { A_ser = epm::reference::assemble_forward(params, grid); });

  double max_diff = 0.0;
  for (std::int64_t idx = 0; idx < grid.size * grid.size; ++idx)
    max_diff = std::max(max_diff, std::abs(A_par.entries[idx] - A_ser.entries[idx]));
  std::printf("assemble   serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   max|diff| %.3g\n",
              t_asm_ser, t_asm_par, t_asm_ser / t_asm_par, max_diff);

  epm::ScalarField phi(grid, 0.0);
  for (std::int64_t i = 0; i < grid.size; ++i) phi[i] = 0.1 * std::sin(6.28 * i / grid.size);
  epm::ScalarField g_par(grid), g_ser(grid);
  double t_g_par = time_ms(reps, [&] { g_par = epm::apply_G(params, A_par, phi); });
  double t_g_ser = time_ms(reps, [&] { g_ser = epm::reference::apply_G(params, A_par, phi); });
  double gdiff = 0.0;
  for (std::int64_t i = 0; i < grid.size; ++i)
    gdiff = std::max(gdiff, std::abs(g_par[i] - g_ser[i]));
  std::printf("apply_G    serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   max|diff| %.3g\n",
              t_g_ser, t_g_par, t_g_ser / t_g_par, gdiff);

  epm::EigenSolution sol = epm::solve_forward(A_par, params);
  epm::StochasticKernel K = epm::build_forward_kernel(A_par, sol, params);
  epm::ScalarField f(grid);
  for (std::int64_t i = 0; i < grid.size; ++i) f[i] = std::cos(6.28 * i / grid.size);
  std::vector<double> out_ser;
  epm::ScalarField out_par(grid);
  double t_mv_par = time_ms(reps, [&] { out_par = epm::apply_F(K, f); });
  double t_mv_ser = time_ms(reps, [&] { out_ser = epm::reference::matvec(K.rows, f.values); });
  double mvdiff = 0.0;
  for (std::int64_t i = 0; i < grid.size; ++i)
    mvdiff = std::max(mvdiff, std::abs(out_par[i] - out_ser[i]));
  std::printf("matvec     serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   max|diff| %.3g\n",
              t_mv_ser, t_mv_par, t_mv_ser / t_mv_par, mvdiff);

  return 0;
}
