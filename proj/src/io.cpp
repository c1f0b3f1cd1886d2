#include "epm/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "epm/version.hpp"

namespace epm {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline translation
  if (!out) throw std::runtime_error("io: cannot open for writing: " + path);
  return out;
}

void put_u32le(std::ofstream& out, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

void put_u64le(std::ofstream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

}  // namespace

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

void write_summary_json(const std::string& path, const SolveSummary& s) {
  nlohmann::json j;
  j["converged"] = s.converged;
  j["lambda"] = s.lambda;
  j["Lambda"] = s.Lambda;
  j["residual"] = s.residual;
  j["iterations"] = s.iterations;
  j["lambda_backward"] = s.lambda_backward;
  j["theta_l1_defect"] = s.theta_l1_defect;
  j["q_rowsum_defect"] = s.q_rowsum_defect;
  j["prenorm_defect"] = s.prenorm_defect;
  j["theta_formula_vs_stationary"] = s.theta_formula_vs_stationary;
  if (s.has_gap) {
    j["lambda2_modulus"] = s.lambda2_modulus;
    j["gap"] = s.gap;
    j["window_dispersion"] = s.window_dispersion;
    j["gap_iterations"] = s.gap_iterations;
    j["gap_converged"] = s.gap_converged;
  } else {
    j["lambda2_modulus"] = nullptr;
    j["gap"] = nullptr;
  }
  if (!s.error.empty()) j["error"] = s.error;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_fields_csv(const std::string& path, const TorusGrid& grid, const ScalarField& phi,
                      const ScalarField& phibar, const ScalarField& theta) {
  auto out = open_out(path);
  for (int c = 0; c < grid.dim; ++c) out << "i" << c << ",";
  for (int c = 0; c < grid.dim; ++c) out << "x" << c << ",";
  out << "phi,phibar,theta\n";
  std::vector<int> mi(grid.dim);
  std::vector<double> x(grid.dim);
  for (std::int64_t i = 0; i < grid.size; ++i) {
    grid.multi_index(i, mi);
    grid.point(i, x);
    for (int c = 0; c < grid.dim; ++c) out << mi[c] << ",";
    for (int c = 0; c < grid.dim; ++c) out << fmt17(x[c]) << ",";
    out << fmt17(phi[i]) << "," << fmt17(phibar[i]) << "," << fmt17(theta[i]) << "\n";
  }
}

void write_correlation_csv(const std::string& path, const CorrelationSeries& series) {
  auto out = open_out(path);
  out << "lag,exact,empirical,stderr\n";
  for (int n = 0; n <= series.n_max; ++n) {
    out << n << ",";
    if (!series.exact.empty()) out << fmt17(series.exact[static_cast<std::size_t>(n)]);
    out << ",";
    if (!series.empirical.empty()) out << fmt17(series.empirical[static_cast<std::size_t>(n)]);
    out << ",";
    if (!series.stderrs.empty()) out << fmt17(series.stderrs[static_cast<std::size_t>(n)]);
    out << "\n";
  }
}

void write_fit_json(const std::string& path, const DecayFit& fit, double lambda2_reference) {
  nlohmann::json j;
  j["rate"] = fit.rate;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r2;
  j["window"] = {fit.window_lo, fit.window_hi};
  j["oscillation"] = fit.oscillation;
  j["lambda2_modulus_reference"] = lambda2_reference;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  auto out = open_out(path);
  out << "epsilon,h,lambda,lambda_over_h,gap,action,entropy,objective,theta_argmax_x\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const SweepRow& r : rows) {
    out << fmt17(r.epsilon) << "," << fmt17(r.h) << ",";
    if (r.solved) {
      out << fmt17(r.lambda) << "," << fmt17(r.lambda_over_h) << "," << fmt17(r.gap) << ","
          << fmt17(r.action_value) << "," << fmt17(r.entropy_value) << ","
          << fmt17(r.objective_value) << ",";
      for (std::size_t c = 0; c < r.theta_argmax_x.size(); ++c) {
        if (c) out << ";";
        out << fmt17(r.theta_argmax_x[c]);
      }
    } else {
      out << fmt17(nan) << "," << fmt17(nan) << "," << fmt17(nan) << "," << fmt17(nan) << ","
          << fmt17(nan) << "," << fmt17(nan) << ",";
    }
    out << "\n";
  }
}

void write_kernel_dump_csv(const std::string& path, const OperatorMatrix& A) {
  auto out = open_out(path);
  out << "i,j,A_ij,meanL_ij\n";
  const std::int64_t N = A.grid.size;
  for (std::int64_t i = 0; i < N; ++i)
    for (std::int64_t j = 0; j < N; ++j)
      out << i << "," << j << "," << fmt17(A.at(i, j)) << "," << fmt17(A.mean_L(i, j)) << "\n";
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj, const TorusGrid& grid) {
  auto out = open_out(path);
  out << "step,flat_index";
  for (int c = 0; c < grid.dim; ++c) out << ",x" << c;
  out << "\n";
  std::vector<double> x(grid.dim);
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    grid.point(traj.states[t], x);
    out << t << "," << traj.states[t];
    for (int c = 0; c < grid.dim; ++c) out << "," << fmt17(x[c]);
    out << "\n";
  }
}

void write_trajectory_binary(const std::string& path, const Trajectory& traj) {
  auto out = open_out(path);
  out.write("EPMTRAJ1", 8);
  put_u64le(out, static_cast<std::uint64_t>(traj.grid_size));
  for (std::uint32_t s : traj.states) put_u32le(out, s);
}

Trajectory read_trajectory_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("io: cannot open trajectory file: " + path);
  char magic[8];
  in.read(magic, 8);
  if (in.gcount() != 8 || std::memcmp(magic, "EPMTRAJ1", 8) != 0)
    throw std::invalid_argument("io: bad trajectory magic in " + path);
  unsigned char nb[8];
  in.read(reinterpret_cast<char*>(nb), 8);
  if (in.gcount() != 8) throw std::invalid_argument("io: truncated trajectory header in " + path);
  std::uint64_t N = 0;
  for (int i = 7; i >= 0; --i) N = (N << 8) | nb[i];
  Trajectory traj;
  traj.grid_size = static_cast<std::int64_t>(N);
  unsigned char sb[4];
  while (in.read(reinterpret_cast<char*>(sb), 4))
    traj.states.push_back(static_cast<std::uint32_t>(sb[0]) | (static_cast<std::uint32_t>(sb[1]) << 8) |
                          (static_cast<std::uint32_t>(sb[2]) << 16) |
                          (static_cast<std::uint32_t>(sb[3]) << 24));
  return traj;
}

void write_objective_json(const std::string& path, const ObjectiveReport& r) {
  nlohmann::json j;
  j["epsilon"] = r.epsilon;
  j["h"] = r.h;
  j["lambda"] = r.lambda;
  j["lambda_over_h"] = r.lambda_over_h;
  j["action"] = r.action_value;
  j["entropy"] = r.entropy_value;
  j["objective"] = r.objective_value;
  j["identity_abs_error"] = r.identity_abs_error;
  j["holonomy_max_residual"] = r.holonomy_max_residual;
  j["competitors"] = r.competitors;
  if (r.competitors > 0) j["competitor_min_margin"] = r.competitor_min_margin;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_manifest(const std::string& path, const std::string& command,
                    const nlohmann::json& config_json, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_json.dump())));
  nlohmann::json j;
  j["command"] = command;
  j["config_hash"] = hash;
  j["seed"] = seed;
  j["version"] = kVersion;
  j["outputs"] = outputs;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace epm
