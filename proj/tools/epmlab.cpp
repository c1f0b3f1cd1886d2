// epmlab: solver and verification lab for the discrete-time entropy-penalized
// Mather problem.  One JSON config drives every subcommand; outputs are
// deterministic given (config, seed) and independent of --threads.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epm/config.hpp"
#include "epm/correlation.hpp"
#include "epm/errors.hpp"
#include "epm/io.hpp"
#include "epm/mather.hpp"
#include "epm/simulate.hpp"
#include "epm/solver.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace epm;

struct Pipeline {
  ModelParams params;
  TorusGrid grid;
  OperatorMatrix A;
  OperatorMatrix B;
  EigenSolution fwd;
  EigenSolution bwd;
  ScalarField theta_formula;
  StochasticKernel K;
  StochasticKernel Q;
};

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  return opts;
}

Pipeline run_pipeline(const RunConfig& cfg) {
  Pipeline p;
  p.params = cfg.model();
  p.grid = cfg.make_grid();
  p.A = assemble_forward(p.params, p.grid, cfg.cutoff_sigmas);
  p.B = assemble_backward(p.params, p.grid, cfg.cutoff_sigmas);
  SolveOptions opts = solve_options(cfg);
  p.fwd = solve_forward(p.A, p.params, opts);
  p.bwd = solve_backward(p.B, p.params, opts);
  p.theta_formula = build_theta(p.fwd, p.bwd, p.params);
  p.K = build_forward_kernel(p.A, p.fwd, p.params, cfg.tol, &p.theta_formula);
  p.Q = build_backward_kernel(p.K);
  return p;
}

SolveSummary make_summary(const Pipeline& p) {
  SolveSummary s;
  s.lambda = p.fwd.lambda;
  s.Lambda = p.fwd.Lambda;
  s.residual = p.fwd.residual;
  s.iterations = p.fwd.iterations;
  s.lambda_backward = p.bwd.lambda;
  s.theta_l1_defect = p.K.stationary_l1_defect;
  s.q_rowsum_defect = p.Q.prenorm_defect;
  s.prenorm_defect = p.K.prenorm_defect;
  double diff = 0.0;
  for (std::int64_t i = 0; i < p.grid.size; ++i)
    diff += std::abs(p.theta_formula[i] - p.K.stationary[i]);
  s.theta_formula_vs_stationary = diff;
  return s;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.out) / name).string();
}

void finish(const RunConfig& cfg, const std::string& command, std::vector<std::string> outputs) {
  write_manifest(out_path(cfg, "manifest.json"), command, cfg.to_json(), cfg.seed, outputs);
}

int cmd_solve(const RunConfig& cfg) {
  try {
    Pipeline p = run_pipeline(cfg);
    write_summary_json(out_path(cfg, "summary.json"), make_summary(p));
    write_fields_csv(out_path(cfg, "fields.csv"), p.grid, p.fwd.potential, p.bwd.potential,
                     p.K.stationary);
    finish(cfg, "solve", {"summary.json", "fields.csv"});
  } catch (const NonConvergenceError& e) {
    SolveSummary s;
    s.converged = false;
    s.residual = e.residual;
    s.iterations = e.iterations;
    s.error = e.what();
    write_summary_json(out_path(cfg, "summary.json"), s);
    finish(cfg, "solve", {"summary.json"});
    std::fprintf(stderr, "solve: %s\n", e.what());
    return 2;
  }
  return 0;
}

int cmd_gap(const RunConfig& cfg) {
  Pipeline p = run_pipeline(cfg);
  SpectrumEstimate est =
      estimate_gap(p.K, p.K.stationary, cfg.tol, cfg.max_iter, cfg.seed);
  SolveSummary s = make_summary(p);
  s.has_gap = true;
  s.lambda2_modulus = est.lambda2_modulus;
  s.gap = est.gap;
  s.window_dispersion = est.window_dispersion;
  s.gap_iterations = est.iterations;
  s.gap_converged = est.converged;
  write_summary_json(out_path(cfg, "summary.json"), s);
  finish(cfg, "gap", {"summary.json"});
  return est.converged ? 0 : 2;
}

int cmd_simulate(const RunConfig& cfg) {
  Pipeline p = run_pipeline(cfg);
  const StochasticKernel& kernel = (cfg.process == "backward") ? p.Q : p.K;
  double sigma = cfg.h * std::sqrt(cfg.epsilon);
  if (sigma >= 0.15)
    std::fprintf(stderr,
                 "simulate: warning: kernel sigma = %.4f >= 0.15, wrapped displacement "
                 "statistics are biased\n",
                 sigma);
  Trajectory traj = simulate(kernel, p.K.stationary, cfg.T, cfg.seed);
  std::vector<std::string> outputs;
  if (cfg.traj_format == "binary") {
    write_trajectory_binary(out_path(cfg, "trajectory.bin"), traj);
    outputs.push_back("trajectory.bin");
  } else {
    write_trajectory_csv(out_path(cfg, "trajectory.csv"), traj, p.grid);
    outputs.push_back("trajectory.csv");
  }
  finish(cfg, "simulate", outputs);
  return 0;
}

int cmd_correlate(const RunConfig& cfg) {
  Pipeline p = run_pipeline(cfg);
  ScalarField f = trig_field(p.grid, cfg.observable_f);
  ScalarField g = trig_field(p.grid, cfg.observable_g);
  // For the forward process X_n the lag-n correlation E[g(X_0) f(X_n)] equals
  // <f_c, Q^n g_c>_theta, so the exact series iterates the opposite kernel to
  // the one the trajectory is simulated with (and vice versa for Y_n).
  const StochasticKernel& exact_kernel = (cfg.process == "backward") ? p.K : p.Q;
  const StochasticKernel& sim_kernel = (cfg.process == "backward") ? p.Q : p.K;

  CorrelationSeries series = exact_correlation(exact_kernel, p.K.stationary, f, g, cfg.n_max);
  Trajectory traj = simulate(sim_kernel, p.K.stationary, cfg.T, cfg.seed);
  CorrelationSeries emp = empirical_correlation(traj, f, g, p.K.stationary, cfg.n_max);
  series.empirical = emp.empirical;
  series.stderrs = emp.stderrs;

  DecayFit fit = fit_decay(series.exact, cfg.fit_floor, cfg.fit_window_lo);
  SpectrumEstimate est = estimate_gap(p.K, p.K.stationary, 1e-10, cfg.max_iter, cfg.seed);

  write_correlation_csv(out_path(cfg, "correlation.csv"), series);
  write_fit_json(out_path(cfg, "fit.json"), fit, est.lambda2_modulus);
  finish(cfg, "correlate", {"correlation.csv", "fit.json"});
  return 0;
}

int cmd_objective(const RunConfig& cfg) {
  Pipeline p = run_pipeline(cfg);
  DiscreteMeasure mu = solved_measure(p.K, p.A);

  ObjectiveReport r;
  r.epsilon = cfg.epsilon;
  r.h = cfg.h;
  r.lambda = p.fwd.lambda;
  r.lambda_over_h = p.fwd.lambda / cfg.h;
  r.action_value = action(mu);
  r.entropy_value = entropy(mu, p.params);
  r.objective_value = r.action_value + cfg.epsilon * r.entropy_value;
  r.identity_abs_error = std::abs(r.objective_value - r.lambda_over_h);

  // holonomy over the 2n+1 trigonometric test functions
  double worst = 0.0;
  {
    ScalarField one(p.grid, 1.0);
    worst = holonomy_residual(mu, one, cfg.h);
    for (int c = 0; c < cfg.n; ++c) {
      TrigTerm tc, ts;
      tc.freq.assign(cfg.n, 0);
      tc.freq[c] = 1;
      tc.cos_amp = 1.0;
      ts.freq = tc.freq;
      ts.sin_amp = 1.0;
      worst = std::max(worst, holonomy_residual(mu, trig_field(p.grid, tc), cfg.h));
      worst = std::max(worst, holonomy_residual(mu, trig_field(p.grid, ts), cfg.h));
    }
  }
  r.holonomy_max_residual = worst;

  r.competitors = cfg.competitors;
  if (cfg.competitors > 0) {
    double min_margin = std::numeric_limits<double>::infinity();
    for (int q = 0; q < cfg.competitors; ++q) {
      DiscreteMeasure comp = competitor_dirichlet(cfg.seed + static_cast<std::uint64_t>(q), p.A);
      min_margin = std::min(min_margin, objective(comp, p.params) - r.objective_value);
    }
    r.competitor_min_margin = min_margin;
  }

  write_objective_json(out_path(cfg, "objective.json"), r);
  finish(cfg, "objective", {"objective.json"});
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.sweep_eps_h.empty())
    throw std::invalid_argument("config: sweep requires a non-empty sweep list");
  SweepOptions opts;
  opts.cutoff_sigmas = cfg.cutoff_sigmas;
  opts.solve = solve_options(cfg);
  opts.gap_seed = cfg.seed;
  std::vector<SweepRow> rows = sweep(cfg.model(), cfg.make_grid(), cfg.sweep_eps_h, opts);
  write_sweep_csv(out_path(cfg, "sweep.csv"), rows);
  finish(cfg, "sweep", {"sweep.csv"});
  for (const SweepRow& r : rows)
    if (!r.solved)
      std::fprintf(stderr, "sweep: row (epsilon=%g, h=%g) failed: %s\n", r.epsilon, r.h,
                   r.error.c_str());
  return 0;
}

int cmd_kernel_dump(const RunConfig& cfg) {
  ModelParams params = cfg.model();
  TorusGrid grid = cfg.make_grid();
  OperatorMatrix A = assemble_forward(params, grid, cfg.cutoff_sigmas);
  write_kernel_dump_csv(out_path(cfg, "kernel.csv"), A);
  finish(cfg, "kernel-dump", {"kernel.csv"});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epmlab: entropy-penalized Mather solver and verification lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  int threads = 0;
  std::int64_t seed_override = -1;

  const std::vector<std::string> names = {"solve",     "gap",   "simulate", "correlate",
                                          "objective", "sweep", "kernel-dump"};
  for (const std::string& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_override, "output directory (overrides config)");
    sub->add_option("--threads", threads, "worker thread cap (does not change results)");
    sub->add_option("--seed", seed_override, "RNG seed (overrides config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig cfg = epm::RunConfig::from_json_file(config_path);
    if (!out_override.empty()) cfg.out = out_override;
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    cfg.validate();
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    std::filesystem::create_directories(cfg.out);

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "solve") return cmd_solve(cfg);
    if (cmd == "gap") return cmd_gap(cfg);
    if (cmd == "simulate") return cmd_simulate(cfg);
    if (cmd == "correlate") return cmd_correlate(cfg);
    if (cmd == "objective") return cmd_objective(cfg);
    if (cmd == "sweep") return cmd_sweep(cfg);
    if (cmd == "kernel-dump") return cmd_kernel_dump(cfg);
    std::fprintf(stderr, "unknown command\n");
    return 1;
  } catch (const epm::NonConvergenceError& e) {
    std::fprintf(stderr, "error (non-convergence): %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error (config/usage): %s\n", e.what());
    return 1;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error (numeric domain): %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error (internal): %s\n", e.what());
    return 3;
  }
}
