#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "netepi/config.hpp"
#include "netepi/csv.hpp"
#include "netepi/dist.hpp"
#include "netepi/error.hpp"
#include "netepi/ode.hpp"
#include "netepi/outbreak.hpp"
#include "netepi/rates.hpp"
#include "netepi/rng.hpp"
#include "netepi/sim.hpp"
#include "netepi/stats.hpp"

namespace netepi {

/// Runs fn(0..count-1) on up to `threads` workers and returns results in
/// index order. The first failing index (lowest) is rethrown.
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
  using T = decltype(fn(std::size_t{0}));
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

enum class ExperimentKind { sim_vs_ode, outbreak_vs_kappa, periodic_sweep, ratio_scenarios, seir_lambda_panel };

inline std::string experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::sim_vs_ode: return "sim_vs_ode";
    case ExperimentKind::outbreak_vs_kappa: return "outbreak_vs_kappa";
    case ExperimentKind::periodic_sweep: return "periodic_sweep";
    case ExperimentKind::ratio_scenarios: return "ratio_scenarios";
    case ExperimentKind::seir_lambda_panel: return "seir_lambda_panel";
  }
  return "?";
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::sim_vs_ode;
  GraphSpec graph;
  EpidemicParams epidemic;
  /// Degree law for the limit equations; defaults to graph.limit_law().
  std::optional<DegreeDistribution> theta;
  std::size_t trials = 500;
  std::uint64_t seed = 1;
  double t_max = 10.0;
  double grid_step = 0.05;
  unsigned threads = 1;

  std::vector<int> kappas;
  std::vector<std::size_t> sizes;
  std::vector<double> omegas, deltas, amplitudes, lambdas;
  /// Parameters not stated by the experiment's source setup, recorded in
  /// the metadata sidecar.
  std::vector<std::string> reconstructions;

  DegreeDistribution limit_law() const { return theta ? *theta : graph.limit_law(); }

  void validate() const {
    epidemic.validate();
    if (trials == 0) throw config_error("trials must be >= 1");
    if (!(t_max > 0.0)) throw config_error("t_max must be > 0");
    if (!(grid_step > 0.0) || grid_step > t_max) throw config_error("grid_step must lie in (0, t_max]");
  }
};

/// Default setup for each experiment kind.
inline ExperimentConfig default_experiment(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  const auto one = RateFunction::constant(1.0);
  switch (kind) {
    case ExperimentKind::sim_vs_ode:
      c.graph.kind = GraphSpec::Kind::erdos_renyi;
      c.graph.n = 250;
      c.graph.mean_degree = 2.0;
      c.epidemic = EpidemicParams::sir(one, one, 0.9);
      c.reconstructions = {"rho=1", "s0=0.9"};
      break;
    case ExperimentKind::seir_lambda_panel:
      c.graph.kind = GraphSpec::Kind::erdos_renyi;
      c.graph.n = 200;
      c.graph.mean_degree = 3.0;
      c.epidemic = EpidemicParams::seir(one, one, one, 0.99, 0.01, 0.0);
      c.lambdas = {0.5, 2.0};
      c.t_max = 20.0;
      c.reconstructions = {"e0=0.01", "s0=0.99", "i0=0", "t_max=20"};
      break;
    case ExperimentKind::outbreak_vs_kappa:
      c.graph.kind = GraphSpec::Kind::configuration_model;
      c.graph.law = DegreeDistribution::point_mass(3);
      c.graph.n = 400;
      c.epidemic = EpidemicParams::sir(RateFunction::constant(0.5), one, 0.95);
      c.kappas = {2, 3, 4, 5, 6, 7, 8};
      c.sizes = {400};
      c.t_max = 1000.0;
      c.grid_step = c.t_max;
      break;
    case ExperimentKind::periodic_sweep:
      c.theta = DegreeDistribution::point_mass(3);
      c.epidemic = EpidemicParams::sir(one, one, 0.99);
      c.omegas = {0.5, 1.0, 5.0, 10.0};
      c.deltas = {0.0, 0.25, 0.5, 0.75};
      for (int k = 0; k < 10; ++k) c.amplitudes.push_back(0.1 * k);
      c.reconstructions = {"s0=0.99"};
      break;
    case ExperimentKind::ratio_scenarios:
      c.theta = DegreeDistribution::point_mass(3);
      c.epidemic = EpidemicParams::sir(one, one, 0.9);
      c.t_max = 30.0;
      c.grid_step = 0.05;
      c.reconstructions = {"s0=0.9"};
      break;
  }
  return c;
}

inline ExperimentKind parse_experiment_kind(const std::string& s) {
  for (auto k : {ExperimentKind::sim_vs_ode, ExperimentKind::outbreak_vs_kappa, ExperimentKind::periodic_sweep,
                 ExperimentKind::ratio_scenarios, ExperimentKind::seir_lambda_panel})
    if (experiment_name(k) == s) return k;
  throw config_error("unknown experiment kind \"" + s + "\"");
}

/// Overlays a JSON config on the defaults of its experiment kind
/// (taken from "experiment", else `fallback`).
inline ExperimentConfig parse_experiment(const json& j, ExperimentKind fallback) {
  using detail::field_or;
  if (!j.is_object()) throw config_error("config must be a JSON object");
  const ExperimentKind kind =
      j.contains("experiment") ? parse_experiment_kind(detail::field<std::string>(j, "experiment")) : fallback;
  ExperimentConfig c = default_experiment(kind);
  if (j.contains("graph")) c.graph = parse_graph(j.at("graph"));
  if (j.contains("epidemic")) {
    c.epidemic = parse_epidemic(j.at("epidemic"), c.epidemic);
    c.reconstructions.clear();
  }
  if (j.contains("theta")) c.theta = parse_degree_law(j.at("theta"));
  const auto trials = field_or<long long>(j, "trials", static_cast<long long>(c.trials));
  if (trials < 1) throw config_error("trials must be >= 1");
  c.trials = static_cast<std::size_t>(trials);
  c.seed = field_or<std::uint64_t>(j, "seed", c.seed);
  c.t_max = field_or<double>(j, "t_max", c.t_max);
  c.grid_step = field_or<double>(j, "grid_step", kind == ExperimentKind::outbreak_vs_kappa ? c.t_max : c.grid_step);
  c.kappas = field_or<std::vector<int>>(j, "kappas", c.kappas);
  c.sizes = field_or<std::vector<std::size_t>>(j, "sizes", c.sizes);
  c.omegas = field_or<std::vector<double>>(j, "omegas", c.omegas);
  c.deltas = field_or<std::vector<double>>(j, "deltas", c.deltas);
  c.amplitudes = field_or<std::vector<double>>(j, "amplitudes", c.amplitudes);
  c.lambdas = field_or<std::vector<double>>(j, "lambdas", c.lambdas);
  for (int k : c.kappas)
    if (k < 2) throw config_error("kappas must be >= 2");
  c.validate();
  return c;
}

/// Metadata common to every artifact.
inline json experiment_metadata(const ExperimentConfig& c) {
  json m;
  m["experiment"] = experiment_name(c.kind);
  m["seed"] = c.seed;
  m["trials"] = c.trials;
  m["t_max"] = c.t_max;
  m["grid_step"] = c.grid_step;
  m["graph"] = c.graph.describe();
  m["configuration_model_variant"] = "erased_cm";
  if (c.kind == ExperimentKind::outbreak_vs_kappa)
    m["limit_degree_law"] = "regular(kappa) per row";
  else
    m["limit_degree_law"] = c.limit_law().describe();
  m["alpha"] = c.epidemic.alpha;
  m["beta"] = c.epidemic.beta.describe();
  m["rho"] = c.epidemic.rho.describe();
  m["lambda"] = c.epidemic.lambda.describe();
  m["s0"] = c.epidemic.s0;
  m["e0"] = c.epidemic.e0;
  m["i0"] = c.epidemic.i0;
  m["ci"] = "normal approximation, 1.96 sd / sqrt(M)";
  m["reconstruction_defaults"] = c.reconstructions;
  return m;
}

inline void write_metadata(const std::filesystem::path& path, const json& meta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw config_error("cannot write " + path.string());
  os << meta.dump(2) << '\n';
}

// ---------------------------------------------------------------- sim vs ODE

inline constexpr std::array<State, 4> kAllStates{State::S, State::E, State::I, State::R};

struct SimVsOde {
  LimitModel model = LimitModel::sir;
  std::vector<double> t;
  std::array<std::vector<MeanCI>, 4> sim;     // indexed by State
  std::array<std::vector<double>, 4> ode;
  std::array<double, 4> sup_deviation{};      // sup_t |sim mean - ode|

  std::vector<State> states() const {
    if (model == LimitModel::sir) return {State::S, State::I, State::R};
    return {State::S, State::E, State::I, State::R};
  }
  double sup(State s) const { return sup_deviation[static_cast<int>(s)]; }
};

inline LimitSolution limit_on_grid(const ExperimentConfig& c) {
  const auto& p = c.epidemic;
  LimitOptions lo;
  lo.output_step = c.grid_step;
  lo.max_step = std::min(lo.max_step, c.grid_step);
  if (p.alpha == 0.0) return solve_sir_limit(c.limit_law(), p.beta, p.rho, p.s0, c.t_max, lo);
  if (p.alpha == 1.0) return solve_seir_limit(c.limit_law(), p.beta, p.rho, p.lambda, p.s0, p.e0, p.i0, c.t_max, lo);
  throw config_error("limit equations are available for alpha = 0 (SIR) or alpha = 1 (SEIR) only");
}

/// M independent trials, each on a freshly sampled graph, summarised per
/// grid time and compared with the limit curves.
inline SimVsOde run_sim_vs_ode(const ExperimentConfig& c) {
  c.validate();
  const LimitSolution sol = limit_on_grid(c);

  const auto runs = parallel_map(c.trials, c.threads, [&](std::size_t k) {
    const std::uint64_t trial_seed = split_seed(c.seed, k);
    const SparseGraph g = c.graph.sample(split_seed(trial_seed, 0));
    Trajectory tr = simulate(g, c.epidemic, c.t_max, c.grid_step, split_seed(trial_seed, 1));
    return std::pair(std::move(tr.grid), std::move(tr.fractions));
  });

  SimVsOde out;
  out.model = sol.model;
  const auto& grid = runs.front().first;
  const std::size_t points = std::min(grid.size(), sol.size());
  out.t.assign(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(points));
  for (std::size_t j = 0; j < points; ++j)
    if (std::abs(grid[j] - sol.t[j]) > 1e-9) throw numerical_error("simulation and limit grids disagree");

  std::vector<double> column(c.trials);
  for (State s : kAllStates) {
    const int si = static_cast<int>(s);
    for (std::size_t j = 0; j < points; ++j) {
      for (std::size_t k = 0; k < c.trials; ++k) column[k] = runs[k].second[j].get(s);
      out.sim[si].push_back(mean_ci(column));
      double ode = 0.0;
      switch (s) {
        case State::S: ode = sol.root_s[j]; break;
        case State::E: ode = sol.root_e[j]; break;
        case State::I: ode = sol.root_i[j]; break;
        case State::R: ode = 1.0 - sol.root_s[j] - sol.root_e[j] - sol.root_i[j]; break;
      }
      out.ode[si].push_back(ode);
      out.sup_deviation[si] = std::max(out.sup_deviation[si], std::abs(out.sim[si].back().mean - ode));
    }
  }
  return out;
}

/// CSV "t,state,sim_mean,ci_lo,ci_hi,ode"
inline void write_sim_vs_ode_csv(std::ostream& os, const SimVsOde& r) {
  os << "t,state,sim_mean,ci_lo,ci_hi,ode\n";
  for (State s : r.states()) {
    const int si = static_cast<int>(s);
    const std::string name(1, static_cast<char>(std::tolower(state_letter(s))));
    for (std::size_t j = 0; j < r.t.size(); ++j) {
      const MeanCI& m = r.sim[si][j];
      csv_row(os, r.t[j], name, m.mean, m.lo(), m.hi(), r.ode[si][j]);
    }
  }
}

/// One SEIR sim-vs-ODE comparison per lambda in c.lambdas.
inline std::vector<SimVsOde> run_seir_lambda_panel(const ExperimentConfig& c) {
  if (c.epidemic.alpha != 1.0) throw config_error("seir_lambda_panel needs alpha = 1");
  std::vector<SimVsOde> out;
  for (double lambda : c.lambdas) {
    ExperimentConfig ci = c;
    ci.epidemic.lambda = RateFunction::constant(lambda);
    out.push_back(run_sim_vs_ode(ci));
  }
  return out;
}

// ------------------------------------------------------- outbreak vs kappa

struct KappaRow {
  int kappa;
  std::size_t n;
  double r;
  MeanCI sim;
  double outbreak_limit;       // 1 - sigma_kappa
  double outbreak_mean_field;  // 1 - sigma_hat_kappa
};

/// Final outbreak on random kappa-regular graphs versus the regular-tree and
/// mean-field predictions. Needs constant beta and rho.
inline std::vector<KappaRow> run_outbreak_vs_kappa(const ExperimentConfig& c) {
  c.validate();
  const auto& p = c.epidemic;
  if (!p.beta.is_constant() || !p.rho.is_constant()) throw config_error("outbreak_vs_kappa needs constant rates");
  if (p.alpha != 0.0) throw config_error("outbreak_vs_kappa is an SIR experiment (alpha = 0)");
  const double r = p.rho.evaluate(0.0) / p.beta.evaluate(0.0);

  std::vector<KappaRow> rows;
  std::size_t cell = 0;
  for (std::size_t n : c.sizes) {
    for (int kappa : c.kappas) {
      if (static_cast<std::size_t>(kappa) >= n) throw config_error("kappa must be below n");
      const std::uint64_t cell_seed = split_seed(c.seed, cell++);
      const auto law = DegreeDistribution::point_mass(static_cast<std::size_t>(kappa));
      const auto sizes = parallel_map(c.trials, c.threads, [&](std::size_t k) {
        const std::uint64_t trial_seed = split_seed(cell_seed, k);
        const SparseGraph g = configuration_model(n, law, split_seed(trial_seed, 0));
        return simulate(g, p, c.t_max, c.grid_step, split_seed(trial_seed, 1)).final_outbreak();
      });
      rows.push_back({kappa, n, r, mean_ci(sizes), 1.0 - regular_outbreak(kappa, r, p.s0),
                      1.0 - mean_field_outbreak(kappa, r, p.s0)});
    }
  }
  return rows;
}

/// CSV "kappa,n,r,s0,sim_mean,ci_lo,ci_hi,outbreak_limit,outbreak_mean_field"
inline void write_kappa_csv(std::ostream& os, const std::vector<KappaRow>& rows, double s0) {
  os << "kappa,n,r,s0,sim_mean,ci_lo,ci_hi,outbreak_limit,outbreak_mean_field\n";
  for (const auto& row : rows)
    csv_row(os, row.kappa, row.n, row.r, s0, row.sim.mean, row.sim.lo(), row.sim.hi(), row.outbreak_limit,
            row.outbreak_mean_field);
}

// ---------------------------------------------------------- periodic sweep

struct PeriodicRow {
  double omega, delta, amplitude, outbreak;
};

/// beta_t = 1 + A sin((t + delta omega) 2 pi / omega)
inline RateFunction periodic_beta(double omega, double delta, double amplitude) {
  return RateFunction::sinusoid(1.0, amplitude, omega, delta);
}

/// Final outbreak of the limit equations over the (omega, delta, A) grid.
inline std::vector<PeriodicRow> run_periodic_sweep(const ExperimentConfig& c) {
  c.validate();
  std::vector<PeriodicRow> cells;
  for (double omega : c.omegas)
    for (double delta : c.deltas)
      for (double a : c.amplitudes) cells.push_back({omega, delta, a, 0.0});
  const DegreeDistribution theta = c.limit_law();
  const auto values = parallel_map(cells.size(), c.threads, [&](std::size_t k) {
    const auto& cell = cells[k];
    return solve_time_varying(theta, periodic_beta(cell.omega, cell.delta, cell.amplitude), c.epidemic.rho,
                              c.epidemic.s0)
        .outbreak;
  });
  for (std::size_t k = 0; k < cells.size(); ++k) cells[k].outbreak = values[k];
  return cells;
}

/// CSV "omega,delta,A,outbreak"
inline void write_periodic_csv(std::ostream& os, const std::vector<PeriodicRow>& rows) {
  os << "omega,delta,A,outbreak\n";
  for (const auto& row : rows) csv_row(os, row.omega, row.delta, row.amplitude, row.outbreak);
}

// --------------------------------------------------------- ratio scenarios

/// rho ramps between 0.5 and 1.5 on [0, 10] while rho/beta = 1.5 + sin(pi t).
struct RatioScenario {
  std::string name;
  RateFunction beta, rho;
};

inline std::vector<RatioScenario> ratio_scenarios() {
  const auto ratio_curve = RateFunction::sinusoid(1.5, 1.0, 2.0, 0.0);
  const auto up = RateFunction::ramp(0.5, 1.5, 0.0, 10.0);
  const auto down = RateFunction::ramp(1.5, 0.5, 0.0, 10.0);
  return {{"A", divide(up, ratio_curve), up}, {"B", divide(down, ratio_curve), down}};
}

struct RatioResult {
  std::string name;
  std::vector<double> t, s_inf;
  OutbreakResult final_size;
  double r_hat = 0.0;
};

inline std::vector<RatioResult> run_ratio_scenarios(const ExperimentConfig& c) {
  c.validate();
  const DegreeDistribution theta = c.limit_law();
  std::vector<RatioResult> out;
  for (const auto& sc : ratio_scenarios()) {
    LimitOptions lo;
    lo.output_step = c.grid_step;
    const LimitSolution curve = solve_sir_limit(theta, sc.beta, sc.rho, c.epidemic.s0, c.t_max, lo);
    const LimitSolution full = solve_to_extinction(theta, sc.beta, sc.rho, c.epidemic.s0);
    RatioResult r;
    r.name = sc.name;
    r.t = curve.t;
    r.s_inf = curve.root_s;
    r.final_size = detail::from_limit(full, {});
    r.r_hat = effective_rate(full);
    out.push_back(std::move(r));
  }
  return out;
}

/// CSV "scenario,t,s_inf"
inline void write_ratio_curves_csv(std::ostream& os, const std::vector<RatioResult>& rs) {
  os << "scenario,t,s_inf\n";
  for (const auto& r : rs)
    for (std::size_t j = 0; j < r.t.size(); ++j) csv_row(os, r.name, r.t[j], r.s_inf[j]);
}

/// CSV "scenario,F,s_final,r_hat"
inline void write_ratio_summary_csv(std::ostream& os, const std::vector<RatioResult>& rs) {
  os << "scenario,F,s_final,r_hat\n";
  for (const auto& r : rs) csv_row(os, r.name, r.final_size.F, r.final_size.s_final, r.r_hat);
}

}  // namespace netepi
