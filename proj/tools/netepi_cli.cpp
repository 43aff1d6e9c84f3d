// Command-line front end: one subcommand per experiment, CSV + meta.json out.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "netepi/config.hpp"
#include "netepi/harness.hpp"
#include "netepi/ode.hpp"
#include "netepi/outbreak.hpp"
#include "netepi/sim.hpp"

namespace fs = std::filesystem;
using namespace netepi;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  unsigned threads = 0;
};

json load_config(const GlobalOptions& g) {
  if (g.config.empty()) return json::object();
  return load_json_file(g.config);
}

std::ofstream open_output(const GlobalOptions& g, const std::string& name) {
  const fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw config_error("cannot create output directory " + dir.string());
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw config_error("cannot write " + (dir / name).string());
  return os;
}

void save_meta(const GlobalOptions& g, const std::string& name, const json& meta) {
  const fs::path dir(g.out);
  fs::create_directories(dir);
  write_metadata(dir / name, meta);
}

ExperimentConfig experiment(const GlobalOptions& g, ExperimentKind kind) {
  ExperimentConfig c = parse_experiment(load_config(g), kind);
  if (g.seed) c.seed = *g.seed;
  c.threads = g.threads > 0 ? g.threads : default_threads();
  return c;
}

template <class T>
std::vector<T> list_or(const json& j, const char* key, std::vector<T> fallback) {
  return detail::field_or<std::vector<T>>(j, key, std::move(fallback));
}

void cmd_simulate(const GlobalOptions& g) {
  const json j = load_config(g);
  ExperimentConfig c = parse_experiment(j, ExperimentKind::sim_vs_ode);
  if (g.seed) c.seed = *g.seed;
  const SparseGraph graph = c.graph.sample(split_seed(c.seed, 0));
  const Trajectory tr = simulate(graph, c.epidemic, c.t_max, c.grid_step, split_seed(c.seed, 1));
  if (const auto bad = check_trajectory(graph, c.epidemic, tr); !bad.empty())
    throw numerical_error("trajectory failed its invariants: " + bad);
  auto traj = open_output(g, "trajectory.csv");
  write_trajectory_csv(traj, tr);
  auto events = open_output(g, "events.csv");
  write_events_csv(events, tr);
  auto edges = open_output(g, "graph.edges");
  write_edge_list(edges, graph);
  json meta = experiment_metadata(c);
  meta["experiment"] = "simulate";
  meta["trials"] = 1;
  meta["events"] = tr.events.size();
  meta["edges"] = graph.edge_count();
  if (tr.extinction_time) meta["extinction_time"] = *tr.extinction_time;
  save_meta(g, "trajectory.meta.json", meta);
}

void cmd_ode(const GlobalOptions& g) {
  const ExperimentConfig c = experiment(g, ExperimentKind::sim_vs_ode);
  const LimitSolution sol = limit_on_grid(c);
  auto os = open_output(g, "limit.csv");
  write_limit_csv(os, sol);
  json meta = experiment_metadata(c);
  meta["experiment"] = "ode";
  meta.erase("trials");
  meta.erase("seed");
  save_meta(g, "limit.meta.json", meta);
}

void cmd_outbreak(const GlobalOptions& g) {
  const json j = load_config(g);
  const auto kappas = list_or<int>(j, "kappas", {2, 3, 4, 5, 6, 7, 8});
  const auto ratios = list_or<double>(j, "ratios", {0.25, 0.5, 1.0, 2.0, 4.0});
  const auto s0s = list_or<double>(j, "s0s", {0.5, 0.9, 0.99});
  auto os = open_output(g, "outbreak.csv");
  write_outbreak_header(os);
  for (int k : kappas) {
    if (k < 2) throw config_error("kappas must be >= 2");
    const auto theta = DegreeDistribution::point_mass(static_cast<std::size_t>(k));
    for (double r : ratios)
      for (double s0 : s0s) {
        write_outbreak_row(os, k, r, s0, solve_constant_ratio(theta, r, s0));
        const double sigma = regular_outbreak(k, r, s0);
        const double res = k == 2 ? 0.0 : phi_kappa(sigma, k, r, s0);
        write_outbreak_row(os, k, r, s0, regular_result(k, s0, sigma, OutbreakMethod::regular_closed_form, res));
      }
  }
  save_meta(g, "outbreak.meta.json", {{"experiment", "outbreak"}, {"kappas", kappas}, {"ratios", ratios}, {"s0s", s0s}});
}

void cmd_compare_mf(const GlobalOptions& g) {
  const json j = load_config(g);
  const auto kappas = list_or<int>(j, "kappas", {2, 3, 4, 5, 6, 7, 8});
  const auto ratios = list_or<double>(j, "ratios", {0.25, 0.5, 1.0, 2.0, 4.0});
  const auto s0s = list_or<double>(j, "s0s", {0.5, 0.9, 0.95, 0.99});
  auto os = open_output(g, "compare_mf.csv");
  os << "kappa,r,s0,sigma,sigma_hat,outbreak,outbreak_mf\n";
  for (int k : kappas) {
    if (k < 2) throw config_error("kappas must be >= 2");
    for (double r : ratios)
      for (double s0 : s0s) {
        const double sigma = regular_outbreak(k, r, s0);
        const double sigma_hat = mean_field_outbreak(k, r, s0);
        csv_row(os, k, r, s0, sigma, sigma_hat, 1.0 - sigma, 1.0 - sigma_hat);
      }
  }
  save_meta(g, "compare_mf.meta.json",
            {{"experiment", "compare-mf"}, {"kappas", kappas}, {"ratios", ratios}, {"s0s", s0s}});
}

void cmd_sweep_periodic(const GlobalOptions& g) {
  const ExperimentConfig c = experiment(g, ExperimentKind::periodic_sweep);
  const auto rows = run_periodic_sweep(c);
  auto os = open_output(g, "periodic_sweep.csv");
  write_periodic_csv(os, rows);
  json meta = experiment_metadata(c);
  meta.erase("trials");
  meta.erase("seed");
  meta["beta"] = "1 + A sin((t + delta omega) 2 pi / omega)";
  save_meta(g, "periodic_sweep.meta.json", meta);
}

void cmd_ratio_scenarios(const GlobalOptions& g) {
  const ExperimentConfig c = experiment(g, ExperimentKind::ratio_scenarios);
  const auto results = run_ratio_scenarios(c);
  auto curves = open_output(g, "ratio_scenarios.csv");
  write_ratio_curves_csv(curves, results);
  auto summary = open_output(g, "ratio_summary.csv");
  write_ratio_summary_csv(summary, results);
  json meta = experiment_metadata(c);
  meta.erase("trials");
  meta.erase("seed");
  meta["beta"] = "rho_t / (1.5 + sin(pi t))";
  meta["rho"] = {{"A", "ramp 0.5 -> 1.5 on [0,10]"}, {"B", "ramp 1.5 -> 0.5 on [0,10]"}};
  save_meta(g, "ratio_scenarios.meta.json", meta);
}

void cmd_effective_rate(const GlobalOptions& g) {
  const ExperimentConfig c = experiment(g, ExperimentKind::ratio_scenarios);
  const auto& p = c.epidemic;
  const LimitSolution sol = solve_to_extinction(c.limit_law(), p.beta, p.rho, p.s0);
  const OutbreakResult tv = detail::from_limit(sol, {});
  const double r_hat = effective_rate(sol);
  const OutbreakResult cr = solve_constant_ratio(c.limit_law(), r_hat, p.s0);
  auto os = open_output(g, "effective_rate.csv");
  os << "F,s_final,r_hat,s_final_constant_ratio,residual\n";
  csv_row(os, tv.F, tv.s_final, r_hat, cr.s_final, tv.residual);
  json meta = experiment_metadata(c);
  meta["experiment"] = "effective-rate";
  meta.erase("trials");
  meta.erase("seed");
  save_meta(g, "effective_rate.meta.json", meta);
}

void cmd_sim_vs_ode(const GlobalOptions& g) {
  const ExperimentConfig c = experiment(g, ExperimentKind::sim_vs_ode);
  json meta = experiment_metadata(c);
  if (c.kind == ExperimentKind::seir_lambda_panel) {
    const auto panels = run_seir_lambda_panel(c);
    for (std::size_t k = 0; k < panels.size(); ++k) {
      const std::string name = "sim_vs_ode_lambda_" + format_real(c.lambdas[k]) + ".csv";
      auto os = open_output(g, name);
      write_sim_vs_ode_csv(os, panels[k]);
    }
    meta["lambdas"] = c.lambdas;
  } else if (c.kind == ExperimentKind::outbreak_vs_kappa) {
    const auto rows = run_outbreak_vs_kappa(c);
    auto os = open_output(g, "outbreak_vs_kappa.csv");
    write_kappa_csv(os, rows, c.epidemic.s0);
    meta["kappas"] = c.kappas;
    meta["sizes"] = c.sizes;
  } else if (c.kind == ExperimentKind::sim_vs_ode) {
    const auto result = run_sim_vs_ode(c);
    auto os = open_output(g, "sim_vs_ode.csv");
    write_sim_vs_ode_csv(os, result);
    for (State s : result.states())
      meta["sup_deviation"][std::string(1, state_letter(s))] = result.sup(s);
  } else {
    throw config_error("sim-vs-ode runs sim_vs_ode, seir_lambda_panel or outbreak_vs_kappa experiments");
  }
  save_meta(g, experiment_name(c.kind) + ".meta.json", meta);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epidemics on random graphs: simulation, limit equations, final sizes"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides config)");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const GlobalOptions&);
  };
  const Command commands[] = {
      {"simulate", "one stochastic trajectory -> trajectory.csv, events.csv, graph.edges", cmd_simulate},
      {"ode", "limit curves -> limit.csv", cmd_ode},
      {"outbreak", "final-size table on regular laws -> outbreak.csv", cmd_outbreak},
      {"compare-mf", "regular-tree vs mean-field final sizes -> compare_mf.csv", cmd_compare_mf},
      {"sweep-periodic", "outbreak under periodic infection rate -> periodic_sweep.csv", cmd_sweep_periodic},
      {"ratio-scenarios", "two rate pairs sharing one ratio -> ratio_scenarios.csv", cmd_ratio_scenarios},
      {"effective-rate", "effective constant ratio of a time-varying pair -> effective_rate.csv", cmd_effective_rate},
      {"sim-vs-ode", "Monte Carlo vs limit curves -> sim_vs_ode.csv", cmd_sim_vs_ode},
  };
  void (*chosen)(const GlobalOptions&) = nullptr;
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->fallthrough();
    sub->callback([&chosen, run = cmd.run] { chosen = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    chosen(g);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
