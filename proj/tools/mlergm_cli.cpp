// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: simulate, estimate, bootstrap, gof and experiments.
// Exit codes: 0 success, 1 usage error, 2 estimation failure, 3 data error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mlergm/config.hpp"
#include "mlergm/csv.hpp"
#include "mlergm/errors.hpp"
#include "mlergm/estimator.hpp"
#include "mlergm/experiments.hpp"
#include "mlergm/gof.hpp"
#include "mlergm/graph.hpp"
#include "mlergm/oracle.hpp"
#include "mlergm/sampler.hpp"

namespace fs = std::filesystem;
using namespace mlergm;

namespace {

enum Exit { kOk = 0, kUsage = 1, kEstimation = 2, kData = 3 };

struct Common {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

struct DataPaths {
  std::string nodes;
  std::string edges;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--out-dir", c.out_dir, "directory for CSV output")->required();
  cmd->add_option("--seed", c.seed, "master seed (overrides the config)");
}

void add_data(CLI::App* cmd, DataPaths& d, bool edges) {
  cmd->add_option("--nodes", d.nodes, "nodes CSV: node_id,neighborhood_id[,attributes]")
      ->required()
      ->check(CLI::ExistingFile);
  if (edges)
    cmd->add_option("--edges", d.edges, "edges CSV: tail,head")->required()->check(CLI::ExistingFile);
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const auto path = (fs::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

Theta parse_theta(const std::string& text, const EtaMap& map) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--theta: '" + item + "' is not a number");
    }
  }
  if (values.size() != map.num_parameters())
    throw UsageError("--theta needs " + std::to_string(map.num_parameters()) + " comma-separated values");
  Theta theta = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  map.check_domain(theta);
  return theta;
}

void write_estimates(const std::string& dir, const EtaMap& map, const EstimateResult& fit) {
  auto out = open_output(dir, "estimates.csv");
  csv::write_row(out, {"coordinate", "estimate", "se", "status"});
  for (std::size_t i = 0; i < map.num_parameters(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    csv::write_row(out, {map.parameter_names()[i], csv::format_double(fit.theta[e]),
                         fit.se ? csv::format_double((*fit.se)[e]) : "NA", to_string(fit.status)});
  }
}

void write_trace(const std::string& dir, const EtaMap& map, const EstimateResult& fit) {
  auto out = open_output(dir, "trace.csv");
  std::vector<std::string> header{"iteration", "score_norm", "step_norm", "min_ess_fraction", "outside_hull"};
  for (const auto& n : map.parameter_names()) header.push_back(n);
  csv::write_row(out, header);
  for (const auto& r : fit.trace) {
    std::vector<std::string> row{std::to_string(r.iteration), csv::format_double(r.score_norm),
                                 csv::format_double(r.step_norm), csv::format_double(r.min_ess_fraction),
                                 r.outside_hull ? "1" : "0"};
    for (Eigen::Index i = 0; i < r.theta.size(); ++i) row.push_back(csv::format_double(r.theta[i]));
    csv::write_row(out, row);
  }
}

EstimateResult fit_or_fail(const MultilevelGraph& graph, const RunConfig& run) {
  auto fit = mcmle(graph, run.map, run.estimator);
  if (fit.status == FitStatus::MaxIterations) std::cerr << "warning: " << fit.message << "\n";
  return fit;
}

int run_simulate(RunConfig run, const Common& c, const DataPaths& d, std::optional<std::size_t> draws,
                 const std::string& theta_text) {
  if (c.seed) run.sampler.seed = *c.seed;
  if (draws) run.sampler.draws = *draws;
  const Theta theta = theta_text.empty() ? run.init : parse_theta(theta_text, run.map);
  auto graph = load_partition_file(d.nodes, run.directed);
  const auto batch = sample_batch(run.map, theta, graph, run.sampler);

  auto stats = open_output(c.out_dir, "stats.csv");
  csv::write_row(stats, {"neighborhood", "draw", "term", "value"});
  for (std::size_t k = 0; k < batch.hoods.size(); ++k) {
    const auto names = run.map.terms().names(graph.size(k));
    const auto& s = batch.hoods[k].stats;
    for (Eigen::Index m = 0; m < s.rows(); ++m)
      for (Eigen::Index j = 0; j < s.cols(); ++j)
        csv::write_row(stats, {graph.neighborhood(k).id, std::to_string(m), names[static_cast<std::size_t>(j)],
                               csv::format_double(s(m, j))});
    graph.set_adjacency(k, batch.hoods[k].final_state);
  }
  auto edges = open_output(c.out_dir, "edges.csv");
  write_edges(edges, graph);
  if (batch.degenerate()) std::cerr << "warning: some neighborhood chains look degenerate\n";
  return kOk;
}

int run_estimate(RunConfig run, const Common& c, const DataPaths& d, std::optional<std::size_t> draws,
                 std::size_t bootstrap) {
  if (c.seed) run.estimator.seed = *c.seed;
  if (draws) run.estimator.draws = *draws;
  const auto graph = load_graph_files(d.nodes, d.edges, run.directed);
  auto fit = fit_or_fail(graph, run);
  std::optional<BootstrapResult> boot;
  if (fit.status != FitStatus::BoundarySuspect && bootstrap > 0) {
    EstimatorConfig refit = run.estimator;
    refit.seed = derive_seed(run.estimator.seed, {2});
    SamplerConfig simulation = run.sampler;
    simulation.seed = derive_seed(run.estimator.seed, {1});
    boot = bootstrap_se(run.map, fit.theta, graph, bootstrap, refit, simulation);
    fit.se = boot->se;
  }
  write_estimates(c.out_dir, run.map, fit);
  write_trace(c.out_dir, run.map, fit);
  if (boot) {
    auto out = open_output(c.out_dir, "bootstrap.csv");
    csv::write_row(out, {"replicate", "coordinate", "estimate"});
    for (std::size_t b = 0; b < boot->replicates.size(); ++b)
      for (std::size_t i = 0; i < run.map.num_parameters(); ++i)
        csv::write_row(out, {std::to_string(b), run.map.parameter_names()[i],
                             csv::format_double(boot->replicates[b][static_cast<Eigen::Index>(i)])});
    if (boot->failures > 0) std::cerr << "warning: " << boot->failures << " bootstrap refits failed\n";
  }
  if (fit.status == FitStatus::BoundarySuspect) {
    std::cerr << "error: " << fit.message << "\n";
    return kEstimation;
  }
  return kOk;
}

int run_gof(RunConfig run, const Common& c, const DataPaths& d, std::optional<std::size_t> replicates,
            const std::string& theta_text) {
  if (c.seed) {
    run.gof.sampler.seed = *c.seed;
    run.estimator.seed = *c.seed;
  }
  if (replicates) run.gof.replicates = *replicates;
  run.gof.validate();
  const auto graph = load_graph_files(d.nodes, d.edges, run.directed);
  Theta theta;
  if (theta_text.empty()) {
    const auto fit = fit_or_fail(graph, run);
    write_estimates(c.out_dir, run.map, fit);
    if (fit.status == FitStatus::BoundarySuspect) {
      std::cerr << "error: " << fit.message << "\n";
      return kEstimation;
    }
    theta = fit.theta;
  } else {
    theta = parse_theta(theta_text, run.map);
  }
  const auto report = gof(run.map, theta, graph, run.gof);
  auto out = open_output(c.out_dir, "gof.csv");
  write_gof_csv(out, report);
  auto summary = open_output(c.out_dir, "gof_summary.csv");
  write_gof_summary_csv(summary, report);
  return kOk;
}

int run_experiment(RunConfig run, const Common& c, Design design, std::optional<std::size_t> replications) {
  if (!run.experiment) throw UsageError("config has no 'experiment' section");
  auto x = *run.experiment;
  x.design = design;
  if (c.seed) x.seed = *c.seed;
  if (replications) x.replications = *replications;
  auto rows = open_output(c.out_dir, "replications.csv");
  auto summary = open_output(c.out_dir, "summary.csv");
  if (design == Design::Consistency) {
    const auto result = run_consistency(run.map, x);
    write_consistency_rows(rows, result);
    write_consistency_summary(summary, result);
  } else {
    const auto result = run_concentration(run.map, x);
    write_concentration_rows(rows, result);
    write_concentration_summary(summary, result);
  }
  return kOk;
}

int run_oracle(const RunConfig& run, const DataPaths& d) {
  const auto graph = load_graph_files(d.nodes, d.edges, run.directed);
  const auto fit = exact_mle(graph, run.map);
  csv::write_row(std::cout, {"coordinate", "exact_mle"});
  for (std::size_t i = 0; i < run.map.num_parameters(); ++i)
    csv::write_row(std::cout, {run.map.parameter_names()[i], csv::format_double(fit.theta[static_cast<Eigen::Index>(i)])});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and estimation for multilevel exponential-family random graph models"};
  app.require_subcommand(1);
  app.footer("Worker threads: set MLERGM_WORKERS (default: all cores).");

  Common common;
  DataPaths data;
  std::optional<std::size_t> draws, count;
  std::size_t bootstrap = 0;
  std::string theta;

  auto* sim = app.add_subcommand("simulate", "draw graphs on a partition and record their statistics");
  add_common(sim, common);
  add_data(sim, data, false);
  sim->add_option("--draws", draws, "retained draws per neighborhood");
  sim->add_option("--theta", theta, "comma-separated parameter values (default: config init)");

  auto* est = app.add_subcommand("estimate", "Monte Carlo maximum likelihood fit");
  add_common(est, common);
  add_data(est, data, true);
  est->add_option("--draws", draws, "Monte Carlo draws per neighborhood and iteration");
  est->add_option("--bootstrap", bootstrap, "parametric bootstrap replicates for standard errors");

  auto* boot = app.add_subcommand("bootstrap", "fit, then parametric bootstrap standard errors");
  add_common(boot, common);
  add_data(boot, data, true);
  boot->add_option("--draws", draws, "Monte Carlo draws per neighborhood and iteration");
  boot->add_option("-B,--replicates", bootstrap, "bootstrap replicates")->required();

  auto* gof_cmd = app.add_subcommand("gof", "goodness of fit against simulated graphs");
  add_common(gof_cmd, common);
  add_data(gof_cmd, data, true);
  gof_cmd->add_option("-R,--replicates", count, "simulated graphs");
  gof_cmd->add_option("--theta", theta, "parameter values to check instead of fitting");

  auto* exp = app.add_subcommand("experiment", "simulation studies");
  exp->require_subcommand(1);
  auto* consistency = exp->add_subcommand("consistency", "repeated simulate-and-fit over a K grid");
  auto* concentration = exp->add_subcommand("concentration", "edge-count spread over a K grid");
  for (auto* cmd : {consistency, concentration}) {
    add_common(cmd, common);
    cmd->add_option("-N,--replications", count, "replications per K");
  }

  auto* oracle = app.add_subcommand("oracle", "exact enumeration MLE for tiny neighborhoods");
  oracle->group("");
  oracle->add_option("-c,--config", common.config)->required()->check(CLI::ExistingFile);
  add_data(oracle, data, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const auto run = load_config(common.config);
    if (sim->parsed()) return run_simulate(run, common, data, draws, theta);
    if (est->parsed()) return run_estimate(run, common, data, draws, bootstrap);
    if (boot->parsed()) {
      if (bootstrap < 2) throw UsageError("--replicates must be at least 2");
      return run_estimate(run, common, data, draws, bootstrap);
    }
    if (gof_cmd->parsed()) return run_gof(run, common, data, count, theta);
    if (consistency->parsed()) return run_experiment(run, common, Design::Consistency, count);
    if (concentration->parsed()) return run_experiment(run, common, Design::Concentration, count);
    if (oracle->parsed()) return run_oracle(run, data);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const EstimationError& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return kEstimation;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const BudgetExceeded& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}
