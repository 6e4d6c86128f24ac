// Command-line front end: stochastic simulation, the two deterministic
// models, model comparison, benchmarking, ensemble-based initial conditions,
// and population-graph export.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hwsir/analysis.hpp"
#include "hwsir/ebcm_model.hpp"
#include "hwsir/integrator.hpp"
#include "hwsir/io.hpp"
#include "hwsir/population_graph.hpp"
#include "hwsir/reduced_model.hpp"
#include "hwsir/scenario.hpp"
#include "hwsir/stochastic_engine.hpp"
#include "hwsir/svg.hpp"

namespace fs = std::filesystem;
using namespace hwsir;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
  std::string scenario_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> replicates;
  std::string out_dir = ".";
  bool svg = false;
  double align_threshold = 0.01;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool scenario_required = true) {
  auto* sc = cmd->add_option("--scenario", opts.scenario_file,
                             "Scenario description file");
  if (scenario_required) sc->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "Override the scenario random seed");
  cmd->add_option("--replicates", opts.replicates,
                  "Override the scenario replicate count");
  cmd->add_option("--out-dir", opts.out_dir, "Output directory");
  cmd->add_flag("--svg", opts.svg, "Also write SVG plots");
  cmd->add_option("--align-threshold", opts.align_threshold,
                  "Infected-fraction level used for alignment and inference")
      ->check(CLI::PositiveNumber);
}

Scenario load_scenario(const CommonOpts& opts) {
  std::ifstream in(opts.scenario_file);
  if (!in) throw ConfigError("cannot open scenario file: " + opts.scenario_file);
  Scenario sc = parse_scenario(in);
  if (opts.seed) sc.seed = *opts.seed;
  if (opts.replicates) sc.replicates = *opts.replicates;
  if (sc.replicates < 1) throw ConfigError("replicates must be >= 1");
  return sc;
}

fs::path out_path(const CommonOpts& opts, const std::string& name) {
  fs::create_directories(opts.out_dir);
  return fs::path(opts.out_dir) / name;
}

std::ofstream open_out(const CommonOpts& opts, const std::string& name) {
  fs::path p = out_path(opts, name);
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

DenseSolution solve_reduced(const ReducedModel& model, double eps, double T) {
  VectorField f = [&](double, const std::vector<double>& y) {
    return model.rhs(y);
  };
  return integrate(f, model.initial_condition(eps), 0.0, T);
}

// Deterministic horizon choice: integrate the mean-field system far out, find
// where the infected fraction falls back below the seeding level after its
// peak, and round that time down to a multiple of 5.
double auto_horizon(const Scenario& sc) {
  ReducedModel model(sc.reduced_params());
  double eps = std::max(sc.epsilon, 1e-6);
  const double far = 400.0;
  auto sol = solve_reduced(model, eps, far);
  auto tstar = find_threshold_time(sol, 1, eps);
  if (!tstar) return 100.0;
  double T = std::floor(*tstar / 5.0) * 5.0;
  return T >= 5.0 ? T : 5.0;
}

double resolve_horizon(const Scenario& sc) {
  return sc.horizon ? *sc.horizon : auto_horizon(sc);
}

std::vector<double> uniform_grid(double T, double dt) {
  std::vector<double> g;
  for (double t = 0.0; t <= T + 1e-12; t += dt) g.push_back(std::min(t, T));
  return g;
}

TimeSeries reduced_infected_series(const ReducedModel& model,
                                   const DenseSolution& sol,
                                   const std::vector<double>& grid) {
  TimeSeries s;
  for (double t : grid) {
    s.t.push_back(t);
    s.v.push_back(model.i(sol.eval(t)));
  }
  return s;
}

Trajectory run_replicate(const PopulationGraph& graph, const Scenario& sc,
                         double T, std::size_t rep) {
  RandomStream rng = derive_stream(sc.seed, 1 + rep);
  SimulationState state =
      sc.single_seed ? init_single_seed(graph, sc.epidemic_params(), rng)
                     : init_uniform_seed(graph, sc.epidemic_params(), sc.epsilon,
                                         rng);
  return simulate(state, sc.epidemic_params(), T, rng);
}

int cmd_simulate(const CommonOpts& opts) {
  Scenario sc = load_scenario(opts);
  double T = resolve_horizon(sc);
  RandomStream grng = derive_stream(sc.seed, 0);
  auto graph = PopulationGraph::build(sc.K, sc.pi_h, sc.pi_w, grng);

  std::vector<Trajectory> trajs(static_cast<std::size_t>(sc.replicates));
  parallel_for(trajs.size(), [&](std::size_t rep) {
    trajs[rep] = run_replicate(graph, sc, T, rep);
  });

  std::vector<TimeSeries> infected;
  for (std::size_t rep = 0; rep < trajs.size(); ++rep) {
    auto os = open_out(opts, "trajectory_" + std::to_string(rep) + ".csv");
    write_trajectory_csv(os, trajs[rep]);
    infected.push_back(infected_series(trajs[rep]));
  }

  if (trajs.size() >= 2) {
    auto em = ensemble_mean(infected, uniform_grid(T, 0.5));
    auto os = open_out(opts, "infected_mean.csv");
    write_series_csv(os, "i_mean", em.mean);
  }

  if (opts.svg) {
    SvgPlot plot;
    for (const auto& s : infected) plot.add_series(s, "", "#4477aa", 0.35);
    auto os = open_out(opts, "simulate.svg");
    plot.write(os);
  }
  std::cout << "simulated " << sc.replicates << " replicate(s), K = " << sc.K
            << ", T = " << format_double(T) << "\n";
  return 0;
}

int cmd_reduce(const CommonOpts& opts) {
  Scenario sc = load_scenario(opts);
  if (!sc.nu.is_exponential())
    throw ConfigError(
        "reduce: the mean-field limit requires an exponential infectious "
        "period (constant recovery rate); got a non-exponential law. "
        "Use `simulate` for general period laws.");
  double T = resolve_horizon(sc);
  ReducedModel model(sc.reduced_params());
  auto sol = solve_reduced(model, sc.epsilon, T);
  auto grid = uniform_grid(T, 0.5);
  {
    auto os = open_out(opts, "reduced.csv");
    write_reduced_solution_csv(os, model, sol, grid, true);
  }
  if (opts.svg) {
    SvgPlot plot;
    TimeSeries si, ii, ri;
    for (double t : grid) {
      auto y = sol.eval(t);
      si.t.push_back(t); si.v.push_back(model.s(y));
      ii.t.push_back(t); ii.v.push_back(model.i(y));
      ri.t.push_back(t); ri.v.push_back(model.r(y));
    }
    plot.add_series(si, "s", "#4477aa");
    plot.add_series(ii, "i", "#cc3311");
    plot.add_series(ri, "r", "#228833");
    auto os = open_out(opts, "reduced.svg");
    plot.write(os);
  }
  std::cout << "reduced model: dim = " << model.dim()
            << ", T = " << format_double(T) << ", final r = "
            << format_double(model.r(sol.eval(T))) << "\n";
  return 0;
}

int cmd_ebcm(const CommonOpts& opts) {
  Scenario sc = load_scenario(opts);
  double T = resolve_horizon(sc);
  EbcmModel model(sc.reduced_params());
  bool warned = false;
  auto y0 = model.initial_condition(sc.epsilon, &warned);
  if (warned)
    std::cerr << "warning: the edge-based initial condition is a small-"
                 "seeding approximation; epsilon = "
              << format_double(sc.epsilon) << " is large\n";
  VectorField f = [&](double, const std::vector<double>& y) {
    return model.rhs(y);
  };
  auto sol = integrate(f, y0, 0.0, T);
  auto grid = uniform_grid(T, 0.5);
  {
    auto os = open_out(opts, "ebcm.csv");
    os << "t,s,i\n";
    for (double t : grid) {
      auto y = sol.eval(t);
      os << format_double(t) << ',' << format_double(model.recover_s(y)) << ','
         << format_double(model.i(y)) << '\n';
    }
  }
  if (opts.svg) {
    TimeSeries ii;
    for (double t : grid) {
      ii.t.push_back(t);
      ii.v.push_back(model.i(sol.eval(t)));
    }
    SvgPlot plot;
    plot.add_series(ii, "i (edge-based)", "#cc3311");
    auto os = open_out(opts, "ebcm.svg");
    plot.write(os);
  }
  std::cout << "edge-based model: dim = " << model.dim()
            << ", T = " << format_double(T) << "\n";
  return 0;
}

int cmd_compare(const CommonOpts& opts) {
  Scenario sc = load_scenario(opts);
  double T = resolve_horizon(sc);
  auto grid = uniform_grid(T, 0.5);

  // Stochastic ensemble, aligned at the threshold level.
  RandomStream grng = derive_stream(sc.seed, 0);
  auto graph = PopulationGraph::build(sc.K, sc.pi_h, sc.pi_w, grng);
  std::vector<Trajectory> trajs(static_cast<std::size_t>(sc.replicates));
  parallel_for(trajs.size(), [&](std::size_t rep) {
    trajs[rep] = run_replicate(graph, sc, T, rep);
  });
  std::vector<TimeSeries> infected;
  for (const auto& tr : trajs) infected.push_back(infected_series(tr));

  TimeSeries ssa_mean;
  if (sc.replicates >= 2) {
    auto aligned = align_by_threshold(infected, opts.align_threshold);
    // After alignment the crossing sits at t = 0; rebuild a mean on the
    // common non-negative range.
    ssa_mean = ensemble_mean(aligned, uniform_grid(T, 0.5)).mean;
  } else {
    ssa_mean = infected.front();
  }

  auto align_series = [&](TimeSeries s) {
    auto tc = first_upcrossing(s, opts.align_threshold);
    if (tc) s.shift(-*tc);
    return s;
  };
  ssa_mean = align_series(ssa_mean);

  ReducedModel ode(sc.reduced_params());
  auto ode_sol = solve_reduced(ode, sc.epsilon, T);
  TimeSeries ode_i = align_series(reduced_infected_series(ode, ode_sol, grid));

  EbcmModel ebcm(sc.reduced_params());
  VectorField f = [&](double, const std::vector<double>& y) {
    return ebcm.rhs(y);
  };
  auto ebcm_sol = integrate(f, ebcm.initial_condition(sc.epsilon), 0.0, T);
  TimeSeries ebcm_i;
  for (double t : grid) {
    ebcm_i.t.push_back(t);
    ebcm_i.v.push_back(ebcm.i(ebcm_sol.eval(t)));
  }
  ebcm_i = align_series(ebcm_i);

  const std::vector<std::pair<std::string, const TimeSeries*>> models = {
      {"ssa_mean", &ssa_mean}, {"reduced", &ode_i}, {"ebcm", &ebcm_i}};
  {
    auto os = open_out(opts, "compare.csv");
    os << "model_a,model_b,sup_distance\n";
    for (const auto& [na, sa] : models)
      for (const auto& [nb, sb] : models)
        os << na << ',' << nb << ',' << format_double(sup_distance(*sa, *sb))
           << '\n';
  }
  if (opts.svg) {
    SvgPlot plot;
    plot.add_series(ssa_mean, "simulation mean", "#4477aa");
    plot.add_series(ode_i, "mean-field", "#cc3311");
    plot.add_series(ebcm_i, "edge-based", "#228833");
    auto os = open_out(opts, "compare.svg");
    plot.write(os);
  }
  std::cout << "compare: sup|i_reduced - i_ssa| = "
            << format_double(sup_distance(ode_i, ssa_mean))
            << ", sup|i_ebcm - i_reduced| = "
            << format_double(sup_distance(ebcm_i, ode_i)) << "\n";
  return 0;
}

// A machine-independent time unit: one pass of a summation loop whose result
// has the closed form N(N+1)/2, kept honest by an optimization barrier.
double reference_loop_seconds() {
  const std::uint64_t N = 400'000'000ULL;
  auto t0 = std::chrono::steady_clock::now();
  std::uint64_t acc = 0;
  for (std::uint64_t k = 1; k <= N; ++k) {
    acc += k;
    asm volatile("" : "+r"(acc));
  }
  auto t1 = std::chrono::steady_clock::now();
  if (acc != N * (N + 1) / 2)
    throw std::runtime_error("reference loop checksum mismatch");
  return std::chrono::duration<double>(t1 - t0).count();
}

int cmd_bench(const CommonOpts& opts) {
  const int K = 10000;
  double ref = reference_loop_seconds();
  nlohmann::json out;
  out["reference_loop_seconds"] = ref;
  out["K"] = K;
  auto& rows = out["scenarios"] = nlohmann::json::array();
  for (const auto& entry : benchmark_scenarios()) {
    Scenario sc = benchmark_scenario(entry, K, opts.seed.value_or(1));
    double T = *sc.horizon;

    RandomStream grng = derive_stream(sc.seed, 0);
    auto graph = PopulationGraph::build(sc.K, sc.pi_h, sc.pi_w, grng);
    RandomStream rng = derive_stream(sc.seed, 1);
    auto state = init_uniform_seed(graph, sc.epidemic_params(), sc.epsilon, rng);
    auto t0 = std::chrono::steady_clock::now();
    auto traj = simulate(state, sc.epidemic_params(), T, rng);
    auto t1 = std::chrono::steady_clock::now();
    double ssa_s = std::chrono::duration<double>(t1 - t0).count();

    ReducedModel model(sc.reduced_params());
    auto t2 = std::chrono::steady_clock::now();
    auto sol = solve_reduced(model, sc.epsilon, T);
    auto t3 = std::chrono::steady_clock::now();
    double ode_s = std::chrono::duration<double>(t3 - t2).count();

    nlohmann::json row;
    row["name"] = sc.name;
    row["T"] = T;
    row["final_r_fraction"] =
        static_cast<double>(traj.points.back().R) / static_cast<double>(sc.K);
    row["simulation_seconds"] = ssa_s;
    row["reduced_seconds"] = ode_s;
    row["simulation_ratio"] = ssa_s / ref;
    row["reduced_ratio"] = ode_s / ref;
    rows.push_back(row);
    std::cout << sc.name << ": simulation " << format_double(ssa_s / ref)
              << "x, reduced " << format_double(ode_s / ref)
              << "x (reference units)\n";
  }
  auto os = open_out(opts, "bench.json");
  os << out.dump(2) << '\n';
  return 0;
}

int cmd_infer_ic(const CommonOpts& opts) {
  Scenario sc = load_scenario(opts);
  RandomStream grng = derive_stream(sc.seed, 0);
  auto graph = PopulationGraph::build(sc.K, sc.pi_h, sc.pi_w, grng);
  auto inferred =
      infer_initial_condition(graph, sc.epidemic_params(), opts.align_threshold,
                              static_cast<std::size_t>(sc.replicates), sc.seed);
  {
    auto os = open_out(opts, "inferred_ic.csv");
    write_histogram_csv(os, 0.0, inferred.average);
  }
  std::cout << "inferred initial condition from " << inferred.retained << "/"
            << inferred.replicates << " surviving replicate(s); mean infected "
            << format_double(inferred.average.I_total) << " of " << sc.K << "\n";
  return 0;
}

int cmd_graph(const CommonOpts& opts) {
  Scenario sc = load_scenario(opts);
  RandomStream grng = derive_stream(sc.seed, 0);
  auto graph = PopulationGraph::build(sc.K, sc.pi_h, sc.pi_w, grng);
  {
    auto os = open_out(opts, "graph.csv");
    graph.export_csv(os);
  }
  std::cout << "graph: K = " << graph.K() << ", households = "
            << graph.num_households() << " (max size "
            << graph.max_structure_size(Layer::Household)
            << "), workplaces = " << graph.num_workplaces() << " (max size "
            << graph.max_structure_size(Layer::Workplace) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Household-workplace epidemic toolkit"};
  app.require_subcommand(1);

  CommonOpts o_sim, o_red, o_ebcm, o_cmp, o_bench, o_infer, o_graph;
  auto* c_sim = app.add_subcommand("simulate", "Run stochastic replicates");
  add_common(c_sim, o_sim);
  auto* c_red = app.add_subcommand("reduce", "Integrate the mean-field system");
  add_common(c_red, o_red);
  auto* c_ebcm = app.add_subcommand("ebcm", "Integrate the edge-based system");
  add_common(c_ebcm, o_ebcm);
  auto* c_cmp =
      app.add_subcommand("compare", "Compare simulation and both models");
  add_common(c_cmp, o_cmp);
  auto* c_bench = app.add_subcommand("bench", "Run the benchmark ladder");
  add_common(c_bench, o_bench, /*scenario_required=*/false);
  auto* c_infer = app.add_subcommand(
      "infer-ic", "Average early-epidemic structure snapshots");
  add_common(c_infer, o_infer);
  auto* c_graph = app.add_subcommand("graph", "Build and export a population");
  add_common(c_graph, o_graph);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(o_sim);
    if (c_red->parsed()) return cmd_reduce(o_red);
    if (c_ebcm->parsed()) return cmd_ebcm(o_ebcm);
    if (c_cmp->parsed()) return cmd_compare(o_cmp);
    if (c_bench->parsed()) return cmd_bench(o_bench);
    if (c_infer->parsed()) return cmd_infer_ic(o_infer);
    if (c_graph->parsed()) return cmd_graph(o_graph);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const StepSizeUnderflow& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DegenerateState& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const EmptySelection& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
