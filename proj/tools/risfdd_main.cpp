// Command-line front end: run one experiment, sweep a scenario parameter, or
// compare algorithms on shared channel realizations. Results land in CSV files
// plus a JSON sidecar describing the resolved experiment.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "risfdd/channel_io.hpp"
#include "risfdd/harness.hpp"

namespace {

using namespace risfdd;

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const std::size_t range = text.find("..");
  try {
    if (range != std::string::npos) {
      const std::uint64_t lo = std::stoull(text.substr(0, range));
      const std::uint64_t hi = std::stoull(text.substr(range + 2));
      if (hi < lo) throw CLI::ValidationError("--seeds", "range end below start");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      std::istringstream in(text);
      std::string tok;
      while (std::getline(in, tok, ',')) seeds.push_back(std::stoull(tok));
    }
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--seeds", "expected a..b or comma list, got '" + text + "'");
  }
  if (seeds.empty()) throw CLI::ValidationError("--seeds", "empty seed list");
  return seeds;
}

SweepAxis parse_sweep(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos || colon == 0)
    throw CLI::ValidationError("--sweep", "expected param:v1,v2,...");
  SweepAxis axis;
  axis.param = text.substr(0, colon);
  std::istringstream in(text.substr(colon + 1));
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      axis.values.push_back(std::stod(tok));
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("--sweep", "bad value '" + tok + "'");
    }
  }
  if (axis.values.empty()) throw CLI::ValidationError("--sweep", "no sweep values");
  return axis;
}

ScenarioConfig resolve_scenario(const std::string& path, double eta,
                                bool eta_set) {
  ScenarioConfig cfg = path.empty() ? default_scenario() : load_scenario(path);
  if (eta_set) cfg.eta = eta;
  cfg.validate();
  return cfg;
}

void print_aggregates(const std::vector<Aggregate>& aggregates) {
  std::printf("%-12s %-10s %4s %12s %12s %12s %10s\n", "sweep_value",
              "algorithm", "n", "mean_r_dl", "mean_r_ul", "mean_r_wsr",
              "wall_ms");
  for (const Aggregate& a : aggregates) {
    std::string v = a.sweep_value ? std::to_string(*a.sweep_value) : "-";
    std::printf("%-12s %-10s %4d %12.4f %12.4f %12.4f %10.2f\n", v.c_str(),
                algorithm_name(a.algorithm).c_str(), a.n, a.mean_r_dl,
                a.mean_r_ul, a.mean_r_wsr, a.mean_wall_ms);
  }
}

void save_channel_dumps(const ScenarioConfig& cfg,
                        const std::vector<std::uint64_t>& seeds,
                        const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (std::uint64_t seed : seeds) {
    const ChannelSet ch = realize_channels(cfg, seed);
    save_channels(std::filesystem::path(dir) /
                      ("channels_s" + std::to_string(seed) + ".bin"),
                  ch, seed);
  }
}

int run_main(const std::string& scenario_path, const std::string& algorithm,
             double eta, bool eta_set, const std::string& seeds_text,
             const std::string& sweep_text, const std::string& out_dir,
             bool traces, const std::string& channels_dir) {
  ExperimentSpec spec;
  spec.scenario = resolve_scenario(scenario_path, eta, eta_set);
  spec.algorithm = algorithm_from_name(algorithm);
  spec.seeds = parse_seeds(seeds_text);
  if (!sweep_text.empty()) spec.sweep = parse_sweep(sweep_text);
  spec.out_dir = out_dir;
  spec.write_traces = traces;
  if (!channels_dir.empty())
    save_channel_dumps(spec.scenario, spec.seeds, channels_dir);
  const ResultTable table = run(spec);
  print_aggregates(table.aggregates);
  if (!out_dir.empty()) std::printf("wrote %s/{results.csv,summary.csv,experiment.json}\n", out_dir.c_str());
  return 0;
}

int compare_main(const std::string& scenario_path,
                 const std::vector<std::string>& algorithms, double eta,
                 bool eta_set, const std::string& seeds_text,
                 const std::string& sweep_text, const std::string& out_dir) {
  ExperimentSpec base;
  base.scenario = resolve_scenario(scenario_path, eta, eta_set);
  base.seeds = parse_seeds(seeds_text);
  if (!sweep_text.empty()) base.sweep = parse_sweep(sweep_text);
  std::vector<ExperimentSpec> specs;
  for (const std::string& name : algorithms) {
    ExperimentSpec s = base;
    s.algorithm = algorithm_from_name(name);
    specs.push_back(s);
  }
  const CompareReport report = compare(specs);
  std::printf("%-10s vs %-10s %7s %7s %6s %12s\n", "a", "b", "wins_a", "wins_b",
              "ties", "mean_diff");
  for (const PairwiseComparison& p : report.pairs)
    std::printf("%-10s vs %-10s %7d %7d %6d %12.5f\n",
                algorithm_name(p.a).c_str(), algorithm_name(p.b).c_str(),
                p.wins_a, p.wins_b, p.ties, p.mean_diff);
  if (!out_dir.empty()) {
    write_compare_outputs(out_dir, specs, report);
    std::printf("wrote %s/{compare_results.csv,compare_report.csv,compare.json}\n",
                out_dir.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint downlink/uplink optimizer for an RIS-aided FDD MIMO link"};
  app.require_subcommand(1);

  std::string scenario_path, seeds_text = "0", sweep_text, out_dir, channels_dir;
  std::string algorithm = "manifold";
  std::vector<std::string> algorithms;
  double eta = 0.5;
  bool traces = false;

  const auto add_shared = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "Scenario JSON file (defaults built in)");
    cmd->add_option("--eta", eta, "Override the downlink weight in [0,1]");
    cmd->add_option("--seeds", seeds_text, "Seed range a..b or comma list")
        ->capture_default_str();
    cmd->add_option("--out", out_dir, "Output directory for CSV/JSON artifacts");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "Run one algorithm over seeds");
  add_shared(cmd_run);
  cmd_run->add_option("--algorithm", algorithm,
                      "manifold|lcao|oneway_dl|oneway_ul|separated|random")
      ->capture_default_str();
  cmd_run->add_flag("--traces", traces, "Write one per-iteration trace CSV per cell");
  cmd_run->add_option("--save-channels", channels_dir,
                      "Also dump each seed's channel realization into this directory");

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "Run one algorithm across a parameter sweep");
  add_shared(cmd_sweep);
  cmd_sweep->add_option("--algorithm", algorithm,
                        "manifold|lcao|oneway_dl|oneway_ul|separated|random")
      ->capture_default_str();
  cmd_sweep->add_flag("--traces", traces, "Write one per-iteration trace CSV per cell");
  cmd_sweep
      ->add_option("--sweep", sweep_text,
                   "param:v1,v2,... over l_ris|p_dl_max_dbm|p_ul_max_dbm|eta")
      ->required();

  CLI::App* cmd_compare = app.add_subcommand(
      "compare", "Run several algorithms on identical channels and pair results");
  add_shared(cmd_compare);
  cmd_compare
      ->add_option("--algorithm", algorithms,
                   "Algorithm name; repeat the flag (at least twice)")
      ->required();
  cmd_compare->add_option("--sweep", sweep_text, "Optional shared sweep param:v1,v2,...");

  try {
    app.parse(argc, argv);
    const bool eta_set = app.get_subcommand()->count("--eta") > 0;
    if (cmd_run->parsed())
      return run_main(scenario_path, algorithm, eta, eta_set, seeds_text,
                      sweep_text, out_dir, traces, channels_dir);
    if (cmd_sweep->parsed())
      return run_main(scenario_path, algorithm, eta, eta_set, seeds_text,
                      sweep_text, out_dir, traces, channels_dir);
    if (cmd_compare->parsed()) {
      if (algorithms.size() < 2) {
        std::cerr << "compare: give --algorithm at least twice\n";
        return 1;
      }
      return compare_main(scenario_path, algorithms, eta, eta_set, seeds_text,
                          sweep_text, out_dir);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
