#pragma once

#include <optional>
#include <string>
#include <vector>

#include "risfdd/baselines.hpp"
#include "risfdd/manifold_opt.hpp"

namespace risfdd {

inline constexpr const char* kVersion = "0.1.0";

enum class Algorithm { manifold, lcao, oneway_dl, oneway_ul, separated, random };

Algorithm algorithm_from_name(const std::string& name);  // throws on unknown names
std::string algorithm_name(Algorithm algorithm);

// One swept scenario parameter; supported: "l_ris" (square grids only),
// "p_dl_max_dbm", "p_ul_max_dbm", "eta".
struct SweepAxis {
  std::string param;
  std::vector<double> values;
};

struct ExperimentSpec {
  ScenarioConfig scenario;
  Algorithm algorithm = Algorithm::manifold;
  std::vector<std::uint64_t> seeds;
  std::optional<SweepAxis> sweep;
  std::string out_dir;  // empty: nothing written
  bool write_traces = false;
};

// One (sweep value, seed) cell. Channels depend only on (scenario, seed),
// never on the algorithm, so cells from different algorithms pair up.
struct RunCell {
  std::optional<double> sweep_value;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::manifold;
  RatePair rates{};
  int outer_iters = 0;
  double wall_ms = 0.0;
};

struct Aggregate {
  std::optional<double> sweep_value;
  Algorithm algorithm = Algorithm::manifold;
  int n = 0;
  double mean_r_dl = 0.0, se_r_dl = 0.0;
  double mean_r_ul = 0.0, se_r_ul = 0.0;
  double mean_r_wsr = 0.0, se_r_wsr = 0.0;
  double mean_wall_ms = 0.0;
};

struct ResultTable {
  std::vector<RunCell> cells;
  std::vector<Aggregate> aggregates;
};

// Applies one sweep value to a scenario copy and revalidates. "l_ris"
// requires a perfect square and resets l_h = l_v = sqrt(value).
ScenarioConfig apply_sweep_value(ScenarioConfig cfg, const std::string& param,
                                 double value);

// Channels from (scenario, seed), optimizer rng from the init substream of
// the same seed.
SolveResult run_single(Algorithm algorithm, const ChannelSet& ch,
                       const ScenarioConfig& cfg, Rng& rng);

// Full experiment: every sweep value x seed cell, plus per-(value, algorithm)
// mean/standard-error aggregates. Writes results.csv, summary.csv and an
// experiment.json sidecar (the fully resolved spec) into out_dir when set.
ResultTable run(const ExperimentSpec& spec);

struct PairwiseComparison {
  Algorithm a;
  Algorithm b;
  int wins_a = 0;  // cells where a's weighted sum rate is strictly higher
  int wins_b = 0;
  int ties = 0;
  double mean_diff = 0.0;  // mean of (a - b) weighted sum rate
};

struct CompareReport {
  std::vector<RunCell> cells;
  std::vector<PairwiseComparison> pairs;
};

// Runs several specs that must share scenario, seeds and sweep, then pairs
// the final weighted sum rates per cell. Mismatched scenarios are rejected.
CompareReport compare(const std::vector<ExperimentSpec>& specs);

// CSV persistence. Doubles are printed with 17 significant digits so a
// parse reproduces the table bit for bit.
std::string cells_to_csv(const std::vector<RunCell>& cells);
std::vector<RunCell> cells_from_csv(const std::string& text);
std::string aggregates_to_csv(const std::vector<Aggregate>& aggregates);
std::string trace_to_csv(const OptimizationTrace& trace);
std::string experiment_to_json_text(const ExperimentSpec& spec);
ExperimentSpec experiment_from_json_text(const std::string& text);
void write_run_outputs(const ExperimentSpec& spec, const ResultTable& table);
void write_compare_outputs(const std::string& out_dir,
                           const std::vector<ExperimentSpec>& specs,
                           const CompareReport& report);

}  // namespace risfdd
