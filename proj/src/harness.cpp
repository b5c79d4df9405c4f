#include "risfdd/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace risfdd {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument(std::string("csv: bad ") + what + " '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const char* what) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw std::invalid_argument(std::string("csv: bad ") + what + " '" + s + "'");
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// Index-sharded loop; results land in preassigned slots so the outcome is
// independent of scheduling and thread count.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, hw), count == 0 ? 1 : count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

constexpr const char* kCellsHeader =
    "sweep_value,seed,algorithm,r_dl,r_ul,r_wsr,outer_iters,wall_ms";
constexpr const char* kAggregatesHeader =
    "sweep_value,algorithm,n,mean_r_dl,se_r_dl,mean_r_ul,se_r_ul,mean_r_wsr,"
    "se_r_wsr,mean_wall_ms";
constexpr const char* kTraceHeader = "outer_iter,r_dl,r_ul,r_wsr,grad_norm,wall_ms";

}  // namespace

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "manifold") return Algorithm::manifold;
  if (name == "lcao") return Algorithm::lcao;
  if (name == "oneway_dl") return Algorithm::oneway_dl;
  if (name == "oneway_ul") return Algorithm::oneway_ul;
  if (name == "separated") return Algorithm::separated;
  if (name == "random") return Algorithm::random;
  throw std::invalid_argument("unknown algorithm '" + name +
                              "' (expected manifold|lcao|oneway_dl|oneway_ul|"
                              "separated|random)");
}

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::manifold: return "manifold";
    case Algorithm::lcao: return "lcao";
    case Algorithm::oneway_dl: return "oneway_dl";
    case Algorithm::oneway_ul: return "oneway_ul";
    case Algorithm::separated: return "separated";
    case Algorithm::random: return "random";
  }
  throw std::logic_error("algorithm_name: bad enum value");
}

ScenarioConfig apply_sweep_value(ScenarioConfig cfg, const std::string& param,
                                 double value) {
  if (param == "l_ris") {
    const int l = static_cast<int>(std::llround(value));
    const int side = static_cast<int>(std::llround(std::sqrt(static_cast<double>(l))));
    if (l < 1 || side * side != l)
      throw std::invalid_argument("sweep: l_ris values must be perfect squares");
    cfg.l_ris = l;
    cfg.l_h = side;
    cfg.l_v = side;
  } else if (param == "p_dl_max_dbm") {
    cfg.p_dl_max_dbm = value;
  } else if (param == "p_ul_max_dbm") {
    cfg.p_ul_max_dbm = value;
  } else if (param == "eta") {
    cfg.eta = value;
  } else {
    throw std::invalid_argument("sweep: unsupported parameter '" + param + "'");
  }
  cfg.validate();
  return cfg;
}

SolveResult run_single(Algorithm algorithm, const ChannelSet& ch,
                       const ScenarioConfig& cfg, Rng& rng) {
  switch (algorithm) {
    case Algorithm::manifold: return manifold_alternate(ch, cfg, rng);
    case Algorithm::lcao: return lcao_solve(ch, cfg, rng);
    case Algorithm::oneway_dl:
      return oneway_ao(ch, cfg, rng, OnewayDirection::downlink);
    case Algorithm::oneway_ul:
      return oneway_ao(ch, cfg, rng, OnewayDirection::uplink);
    case Algorithm::separated: return separated_elements(ch, cfg, rng);
    case Algorithm::random: return random_phases(ch, cfg, rng);
  }
  throw std::logic_error("run_single: bad enum value");
}

namespace {

struct CellPlan {
  std::optional<double> sweep_value;
  std::size_t cfg_index = 0;
  std::uint64_t seed = 0;
};

std::vector<Aggregate> aggregate_cells(const std::vector<RunCell>& cells) {
  std::vector<Aggregate> out;
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i;
    while (j < cells.size() && cells[j].sweep_value == cells[i].sweep_value &&
           cells[j].algorithm == cells[i].algorithm)
      ++j;
    Aggregate agg;
    agg.sweep_value = cells[i].sweep_value;
    agg.algorithm = cells[i].algorithm;
    agg.n = static_cast<int>(j - i);
    const auto finish = [n = agg.n](double sum, double sum_sq, double& mean,
                                    double& se) {
      mean = sum / n;
      se = n > 1 ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / n) / (n - 1)) /
                             n)
                 : 0.0;
    };
    double s_dl = 0, q_dl = 0, s_ul = 0, q_ul = 0, s_w = 0, q_w = 0, s_ms = 0;
    for (std::size_t k = i; k < j; ++k) {
      const RatePair& r = cells[k].rates;
      s_dl += r.r_dl; q_dl += r.r_dl * r.r_dl;
      s_ul += r.r_ul; q_ul += r.r_ul * r.r_ul;
      s_w += r.r_wsr; q_w += r.r_wsr * r.r_wsr;
      s_ms += cells[k].wall_ms;
    }
    finish(s_dl, q_dl, agg.mean_r_dl, agg.se_r_dl);
    finish(s_ul, q_ul, agg.mean_r_ul, agg.se_r_ul);
    finish(s_w, q_w, agg.mean_r_wsr, agg.se_r_wsr);
    agg.mean_wall_ms = s_ms / agg.n;
    out.push_back(agg);
    i = j;
  }
  return out;
}

}  // namespace

ResultTable run(const ExperimentSpec& spec) {
  spec.scenario.validate();
  if (spec.seeds.empty()) throw std::invalid_argument("run: seed list is empty");
  if (spec.sweep && spec.sweep->values.empty())
    throw std::invalid_argument("run: sweep value list is empty");

  // Resolve one scenario per sweep value up front so bad values fail early.
  std::vector<ScenarioConfig> configs;
  std::vector<CellPlan> plan;
  if (spec.sweep) {
    for (double v : spec.sweep->values) {
      configs.push_back(apply_sweep_value(spec.scenario, spec.sweep->param, v));
      for (std::uint64_t seed : spec.seeds)
        plan.push_back({v, configs.size() - 1, seed});
    }
  } else {
    configs.push_back(spec.scenario);
    for (std::uint64_t seed : spec.seeds) plan.push_back({std::nullopt, 0, seed});
  }

  ResultTable table;
  table.cells.resize(plan.size());
  std::vector<OptimizationTrace> traces(plan.size());

  parallel_for(plan.size(), [&](std::size_t i) {
    const CellPlan& cell = plan[i];
    const ScenarioConfig& cfg = configs[cell.cfg_index];
    const ChannelSet ch = realize_channels(cfg, cell.seed);
    Rng rng = make_substream(cell.seed, kStreamInit);
    const auto start = std::chrono::steady_clock::now();
    SolveResult result = run_single(spec.algorithm, ch, cfg, rng);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    table.cells[i] = RunCell{cell.sweep_value, cell.seed, spec.algorithm,
                             result.rates, result.outer_iters, ms};
    if (spec.write_traces) traces[i] = std::move(result.trace);
  });

  table.aggregates = aggregate_cells(table.cells);

  if (!spec.out_dir.empty()) {
    write_run_outputs(spec, table);
    if (spec.write_traces) {
      const fs::path dir = fs::path(spec.out_dir) / "traces";
      fs::create_directories(dir);
      for (std::size_t i = 0; i < plan.size(); ++i) {
        std::ostringstream name;
        name << "trace_" << algorithm_name(spec.algorithm);
        if (plan[i].sweep_value)
          name << "_v" << fmt_double(*plan[i].sweep_value);
        name << "_s" << plan[i].seed << ".csv";
        std::ofstream out(dir / name.str());
        out << trace_to_csv(traces[i]);
      }
    }
  }
  return table;
}

CompareReport compare(const std::vector<ExperimentSpec>& specs) {
  if (specs.size() < 2)
    throw std::invalid_argument("compare: need at least two experiment specs");
  const std::string scenario_text = scenario_to_json_text(specs[0].scenario);
  for (const ExperimentSpec& s : specs) {
    if (scenario_to_json_text(s.scenario) != scenario_text)
      throw std::invalid_argument("compare: scenarios differ between specs");
    if (s.seeds != specs[0].seeds)
      throw std::invalid_argument("compare: seed lists differ between specs");
    const bool same_sweep =
        (!s.sweep && !specs[0].sweep) ||
        (s.sweep && specs[0].sweep && s.sweep->param == specs[0].sweep->param &&
         s.sweep->values == specs[0].sweep->values);
    if (!same_sweep)
      throw std::invalid_argument("compare: sweep axes differ between specs");
  }
  for (std::size_t i = 0; i < specs.size(); ++i)
    for (std::size_t j = i + 1; j < specs.size(); ++j)
      if (specs[i].algorithm == specs[j].algorithm)
        throw std::invalid_argument("compare: duplicate algorithm in spec list");

  CompareReport report;
  std::vector<ResultTable> tables;
  tables.reserve(specs.size());
  for (const ExperimentSpec& s : specs) tables.push_back(run(s));
  for (const ResultTable& t : tables)
    report.cells.insert(report.cells.end(), t.cells.begin(), t.cells.end());

  const std::size_t cells_per = tables[0].cells.size();
  for (std::size_t i = 0; i < specs.size(); ++i)
    for (std::size_t j = i + 1; j < specs.size(); ++j) {
      PairwiseComparison pair;
      pair.a = specs[i].algorithm;
      pair.b = specs[j].algorithm;
      double diff_sum = 0.0;
      for (std::size_t k = 0; k < cells_per; ++k) {
        const RunCell& ca = tables[i].cells[k];
        const RunCell& cb = tables[j].cells[k];
        if (ca.seed != cb.seed || ca.sweep_value != cb.sweep_value)
          throw std::logic_error("compare: cell pairing misaligned");
        const double d = ca.rates.r_wsr - cb.rates.r_wsr;
        diff_sum += d;
        if (d > 0.0) ++pair.wins_a;
        else if (d < 0.0) ++pair.wins_b;
        else ++pair.ties;
      }
      pair.mean_diff = cells_per > 0 ? diff_sum / cells_per : 0.0;
      report.pairs.push_back(pair);
    }
  return report;
}

std::string cells_to_csv(const std::vector<RunCell>& cells) {
  std::ostringstream out;
  out << kCellsHeader << '\n';
  for (const RunCell& c : cells) {
    if (c.sweep_value) out << fmt_double(*c.sweep_value);
    out << ',' << c.seed << ',' << algorithm_name(c.algorithm) << ','
        << fmt_double(c.rates.r_dl) << ',' << fmt_double(c.rates.r_ul) << ','
        << fmt_double(c.rates.r_wsr) << ',' << c.outer_iters << ','
        << fmt_double(c.wall_ms) << '\n';
  }
  return out.str();
}

std::vector<RunCell> cells_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCellsHeader)
    throw std::invalid_argument("csv: unexpected results header");
  std::vector<RunCell> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_line(line);
    if (f.size() != 8) throw std::invalid_argument("csv: wrong column count");
    RunCell c;
    if (!f[0].empty()) c.sweep_value = parse_double(f[0], "sweep_value");
    c.seed = static_cast<std::uint64_t>(parse_int(f[1], "seed"));
    c.algorithm = algorithm_from_name(f[2]);
    c.rates.r_dl = parse_double(f[3], "r_dl");
    c.rates.r_ul = parse_double(f[4], "r_ul");
    c.rates.r_wsr = parse_double(f[5], "r_wsr");
    c.outer_iters = static_cast<int>(parse_int(f[6], "outer_iters"));
    c.wall_ms = parse_double(f[7], "wall_ms");
    cells.push_back(c);
  }
  return cells;
}

std::string aggregates_to_csv(const std::vector<Aggregate>& aggregates) {
  std::ostringstream out;
  out << kAggregatesHeader << '\n';
  for (const Aggregate& a : aggregates) {
    if (a.sweep_value) out << fmt_double(*a.sweep_value);
    out << ',' << algorithm_name(a.algorithm) << ',' << a.n << ','
        << fmt_double(a.mean_r_dl) << ',' << fmt_double(a.se_r_dl) << ','
        << fmt_double(a.mean_r_ul) << ',' << fmt_double(a.se_r_ul) << ','
        << fmt_double(a.mean_r_wsr) << ',' << fmt_double(a.se_r_wsr) << ','
        << fmt_double(a.mean_wall_ms) << '\n';
  }
  return out.str();
}

std::string trace_to_csv(const OptimizationTrace& trace) {
  std::ostringstream out;
  out << kTraceHeader << '\n';
  for (const TraceRow& row : trace.rows) {
    out << row.outer_iter << ',' << fmt_double(row.r_dl) << ','
        << fmt_double(row.r_ul) << ',' << fmt_double(row.r_wsr) << ',';
    if (row.grad_norm) out << fmt_double(*row.grad_norm);
    out << ',' << fmt_double(row.wall_ms) << '\n';
  }
  return out.str();
}

std::string experiment_to_json_text(const ExperimentSpec& spec) {
  json j;
  j["version"] = kVersion;
  j["algorithm"] = algorithm_name(spec.algorithm);
  j["seeds"] = spec.seeds;
  if (spec.sweep)
    j["sweep"] = {{"param", spec.sweep->param}, {"values", spec.sweep->values}};
  else
    j["sweep"] = nullptr;
  j["scenario"] = json::parse(scenario_to_json_text(spec.scenario));
  j["out_dir"] = spec.out_dir;
  j["write_traces"] = spec.write_traces;
  return j.dump(2);
}

ExperimentSpec experiment_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("experiment: bad JSON: ") + e.what());
  }
  ExperimentSpec spec;
  spec.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
  spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("sweep") && !j["sweep"].is_null()) {
    SweepAxis axis;
    axis.param = j["sweep"].at("param").get<std::string>();
    axis.values = j["sweep"].at("values").get<std::vector<double>>();
    spec.sweep = axis;
  }
  spec.scenario = scenario_from_json_text(j.at("scenario").dump());
  if (j.contains("out_dir")) spec.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("write_traces")) spec.write_traces = j["write_traces"].get<bool>();
  return spec;
}

void write_run_outputs(const ExperimentSpec& spec, const ResultTable& table) {
  const fs::path dir(spec.out_dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "results.csv");
    if (!out) throw std::runtime_error("cannot write results.csv");
    out << cells_to_csv(table.cells);
  }
  {
    std::ofstream out(dir / "summary.csv");
    out << aggregates_to_csv(table.aggregates);
  }
  {
    std::ofstream out(dir / "experiment.json");
    out << experiment_to_json_text(spec) << '\n';
  }
}

void write_compare_outputs(const std::string& out_dir,
                           const std::vector<ExperimentSpec>& specs,
                           const CompareReport& report) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "compare_results.csv");
    out << cells_to_csv(report.cells);
  }
  {
    std::ofstream out(dir / "compare_report.csv");
    out << "algorithm_a,algorithm_b,wins_a,wins_b,ties,mean_diff\n";
    for (const PairwiseComparison& p : report.pairs)
      out << algorithm_name(p.a) << ',' << algorithm_name(p.b) << ',' << p.wins_a
          << ',' << p.wins_b << ',' << p.ties << ',' << fmt_double(p.mean_diff)
          << '\n';
  }
  {
    json j = json::array();
    for (const ExperimentSpec& s : specs) j.push_back(json::parse(experiment_to_json_text(s)));
    std::ofstream out(dir / "compare.json");
    out << j.dump(2) << '\n';
  }
}

}  // namespace risfdd
