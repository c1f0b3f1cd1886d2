#include "epm/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace epm {

namespace {

TrigTerm default_observable(int n) {
  TrigTerm t;
  t.freq.assign(n, 0);
  t.freq[0] = 1;
  t.cos_amp = 1.0;
  return t;
}

TrigTerm trig_term_from_json(const nlohmann::json& j, int n) {
  TrigTerm t;
  t.freq = j.value("k", std::vector<int>(n, 0));
  t.cos_amp = j.value("cos_amp", 0.0);
  t.sin_amp = j.value("sin_amp", 0.0);
  return t;
}

nlohmann::json trig_term_to_json(const TrigTerm& t) {
  return nlohmann::json{{"k", t.freq}, {"cos_amp", t.cos_amp}, {"sin_amp", t.sin_amp}};
}

PotentialSpec potential_from_json(const nlohmann::json& j, int n, int m) {
  std::string type = j.value("type", "zero");
  if (type == "zero") return PotentialSpec::zero();
  if (type == "trig") {
    std::vector<TrigTerm> terms;
    for (const auto& tj : j.at("terms")) terms.push_back(trig_term_from_json(tj, n));
    return PotentialSpec::trig(std::move(terms));
  }
  if (type == "tabulated") {
    std::vector<double> values;
    if (j.contains("values_file")) {
      std::string path = j["values_file"].get<std::string>();
      std::ifstream in(path);
      if (!in) throw std::invalid_argument("config: missing upstream artifact: " + path);
      double v;
      while (in >> v) values.push_back(v);
    } else {
      values = j.at("values").get<std::vector<double>>();
    }
    TorusGrid grid(n, m);
    return PotentialSpec::tabulated(ScalarField(grid, std::move(values)));
  }
  throw std::invalid_argument("config: unknown potential type '" + type + "'");
}

nlohmann::json potential_to_json(const PotentialSpec& p) {
  switch (p.kind) {
    case PotentialSpec::Kind::Zero:
      return nlohmann::json{{"type", "zero"}};
    case PotentialSpec::Kind::Trig: {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& t : p.terms) terms.push_back(trig_term_to_json(t));
      return nlohmann::json{{"type", "trig"}, {"terms", terms}};
    }
    case PotentialSpec::Kind::Tabulated:
      return nlohmann::json{{"type", "tabulated"}, {"values", p.table->values}};
  }
  return {};
}

}  // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open file: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  c.n = j.value("n", 1);
  c.m = j.value("m", 64);
  c.epsilon = j.value("epsilon", 1.0);
  c.h = j.value("h", 1.0);
  c.P = j.value("P", std::vector<double>(static_cast<std::size_t>(std::max(c.n, 1)), 0.0));
  c.cutoff_sigmas = j.value("cutoff_sigmas", 12.0);
  c.tol = j.value("tol", 1e-12);
  c.max_iter = j.value("max_iter", 200000L);
  c.seed = j.value("seed", std::uint64_t{1});
  c.T = j.value("T", std::int64_t{1000000});
  c.n_max = j.value("n_max", 60);
  c.out = j.value("out", std::string("out"));
  c.process = j.value("process", std::string("forward"));
  c.competitors = j.value("competitors", 0);
  c.fit_window_lo = j.value("fit_window_lo", 5);
  c.fit_floor = j.value("fit_floor", 1e-13);
  c.traj_format = j.value("traj_format", std::string("csv"));
  if (j.contains("potential")) c.potential = potential_from_json(j["potential"], c.n, c.m);
  c.observable_f =
      j.contains("observable_f") ? trig_term_from_json(j["observable_f"], c.n) : default_observable(c.n);
  c.observable_g =
      j.contains("observable_g") ? trig_term_from_json(j["observable_g"], c.n) : default_observable(c.n);
  if (j.contains("sweep")) {
    for (const auto& row : j["sweep"])
      c.sweep_eps_h.emplace_back(row.at("epsilon").get<double>(), row.at("h").get<double>());
  }
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["m"] = m;
  j["epsilon"] = epsilon;
  j["h"] = h;
  j["P"] = P;
  j["potential"] = potential_to_json(potential);
  j["cutoff_sigmas"] = cutoff_sigmas;
  j["tol"] = tol;
  j["max_iter"] = max_iter;
  j["seed"] = seed;
  j["T"] = T;
  j["n_max"] = n_max;
  j["out"] = out;
  j["process"] = process;
  j["observable_f"] = trig_term_to_json(observable_f);
  j["observable_g"] = trig_term_to_json(observable_g);
  j["competitors"] = competitors;
  j["fit_window_lo"] = fit_window_lo;
  j["fit_floor"] = fit_floor;
  j["traj_format"] = traj_format;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [e, hh] : sweep_eps_h) rows.push_back({{"epsilon", e}, {"h", hh}});
  j["sweep"] = rows;
  return j;
}

ModelParams RunConfig::model() const {
  ModelParams p;
  p.epsilon = epsilon;
  p.h = h;
  p.P = P;
  p.potential = potential;
  p.dim = n;
  return p;
}

TorusGrid RunConfig::make_grid() const { return TorusGrid(n, m); }

void RunConfig::validate() const {
  if (n < 1) throw std::invalid_argument("config: n must be >= 1");
  if (m < 1) throw std::invalid_argument("config: m must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be > 0");
  if (!(h > 0.0)) throw std::invalid_argument("config: h must be > 0");
  if (static_cast<int>(P.size()) != n)
    throw std::invalid_argument("config: P must have exactly n entries");
  if (!(cutoff_sigmas >= 6.0)) throw std::invalid_argument("config: cutoff_sigmas must be >= 6");
  if (!(tol > 0.0)) throw std::invalid_argument("config: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("config: max_iter must be >= 1");
  if (T < 0) throw std::invalid_argument("config: T must be >= 0");
  if (n_max < 1) throw std::invalid_argument("config: n_max must be >= 1");
  if (process != "forward" && process != "backward")
    throw std::invalid_argument("config: process must be forward or backward");
  if (traj_format != "csv" && traj_format != "binary")
    throw std::invalid_argument("config: traj_format must be csv or binary");
  model().validate();
  // kernel standard deviation must span at least 3 grid cells or the
  // discretization is unresolved and all tolerances are void
  double sigma = h * std::sqrt(epsilon);
  double grid_delta = 1.0 / m;
  if (sigma < 3.0 * grid_delta)
    throw std::invalid_argument(
        "config: resolution rule h*sqrt(epsilon) >= 3/m violated (h*sqrt(epsilon)=" +
        std::to_string(sigma) + ", 3/m=" + std::to_string(3.0 * grid_delta) + ")");
  for (const auto& [e, hh] : sweep_eps_h) {
    if (!(e > 0.0)) throw std::invalid_argument("config: sweep epsilon must be > 0");
    if (!(hh > 0.0)) throw std::invalid_argument("config: sweep h must be > 0");
  }
}

ScalarField trig_field(const TorusGrid& grid, const TrigTerm& term) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  ScalarField f(grid);
  std::vector<double> x(grid.dim);
  for (std::int64_t i = 0; i < grid.size; ++i) {
    grid.point(i, x);
    double phase = 0.0;
    for (int c = 0; c < grid.dim; ++c) phase += term.freq[c] * x[c];
    phase *= kTwoPi;
    f[i] = term.cos_amp * std::cos(phase) + term.sin_amp * std::sin(phase);
  }
  return f;
}

}  // namespace epm
