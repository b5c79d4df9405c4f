#include "risfdd/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "risfdd/types.hpp"

namespace risfdd {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("scenario: " + what);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(n_bs >= 1, "n_bs must be >= 1");
  require(k_ue >= 1, "k_ue must be >= 1");
  require(l_ris >= 1, "l_ris must be >= 1");
  require(l_h >= 1 && l_v >= 1, "l_h and l_v must be >= 1");
  require(l_ris == l_h * l_v, "l_ris must equal l_h * l_v");
  require(f_dl_hz > 0.0 && f_ul_hz > 0.0, "carrier frequencies must be positive");
  require(std::isfinite(p_dl_max_dbm) && std::isfinite(p_ul_max_dbm),
          "power budgets must be finite");
  require(std::isfinite(noise_dl_dbm) && std::isfinite(noise_ul_dbm),
          "noise powers must be finite");
  require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
  require(n_streams_dl >= 1 && n_streams_dl <= std::min(n_bs, k_ue),
          "n_streams_dl must lie in [1, min(n_bs, k_ue)]");
  require(n_streams_ul >= 1 && n_streams_ul <= std::min(n_bs, k_ue),
          "n_streams_ul must lie in [1, min(n_bs, k_ue)]");
  require(n_paths_g_dl >= 1 && n_paths_g_ul >= 1 && n_paths_h_dl >= 1 &&
              n_paths_h_ul >= 1,
          "path counts must be >= 1");
  require(antenna_spacing_m > 0.0, "antenna spacing must be positive");
  require(std::isfinite(theta_d_rad), "theta_d_rad must be finite");
  require(eps_outer > 0.0 && eps_inner > 0.0, "tolerances must be positive");
  require(max_outer >= 1 && max_inner >= 1, "iteration caps must be >= 1");
  const LinkDistances d = link_distances(*this);
  require(d.bs_ris_m >= 1.0 && d.ris_ue_m >= 1.0,
          "link distances must be at least the 1 m path-loss reference");
}

double ScenarioConfig::p_dl_max_w() const { return dbm_to_watts(p_dl_max_dbm); }
double ScenarioConfig::p_ul_max_w() const { return dbm_to_watts(p_ul_max_dbm); }
double ScenarioConfig::noise_dl_w() const { return dbm_to_watts(noise_dl_dbm); }
double ScenarioConfig::noise_ul_w() const { return dbm_to_watts(noise_ul_dbm); }

double dbm_to_watts(double dbm) {
  if (!std::isfinite(dbm)) throw std::invalid_argument("dbm_to_watts: non-finite input");
  return 1e-3 * std::pow(10.0, dbm / 10.0);
}

LinkDistances link_distances(const ScenarioConfig& cfg) {
  const double dx1 = cfg.pos_bs[0] - cfg.pos_ris[0];
  const double dy1 = cfg.pos_bs[1] - cfg.pos_ris[1];
  const double dx2 = cfg.pos_ris[0] - cfg.pos_ue[0];
  const double dy2 = cfg.pos_ris[1] - cfg.pos_ue[1];
  return {std::hypot(dx1, dy1), std::hypot(dx2, dy2)};
}

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;  // defaults are the measurement baseline
  cfg.antenna_spacing_m = kSpeedOfLight / (2.0 * cfg.f_ul_hz);
  return cfg;
}

namespace {

using nlohmann::json;

// One row per field keeps the loader, saver and unknown-key check in sync.
template <typename Fn>
void for_each_field(ScenarioConfig& cfg, Fn&& fn) {
  fn("n_bs", cfg.n_bs);
  fn("k_ue", cfg.k_ue);
  fn("l_ris", cfg.l_ris);
  fn("l_h", cfg.l_h);
  fn("l_v", cfg.l_v);
  fn("f_dl_hz", cfg.f_dl_hz);
  fn("f_ul_hz", cfg.f_ul_hz);
  fn("p_dl_max_dbm", cfg.p_dl_max_dbm);
  fn("p_ul_max_dbm", cfg.p_ul_max_dbm);
  fn("noise_dl_dbm", cfg.noise_dl_dbm);
  fn("noise_ul_dbm", cfg.noise_ul_dbm);
  fn("eta", cfg.eta);
  fn("n_streams_dl", cfg.n_streams_dl);
  fn("n_streams_ul", cfg.n_streams_ul);
  fn("n_paths_g_dl", cfg.n_paths_g_dl);
  fn("n_paths_g_ul", cfg.n_paths_g_ul);
  fn("n_paths_h_dl", cfg.n_paths_h_dl);
  fn("n_paths_h_ul", cfg.n_paths_h_ul);
  fn("pos_bs", cfg.pos_bs);
  fn("pos_ris", cfg.pos_ris);
  fn("pos_ue", cfg.pos_ue);
  fn("antenna_spacing_m", cfg.antenna_spacing_m);
  fn("theta_d_rad", cfg.theta_d_rad);
  fn("seed", cfg.seed);
  fn("eps_outer", cfg.eps_outer);
  fn("eps_inner", cfg.eps_inner);
  fn("max_outer", cfg.max_outer);
  fn("max_inner", cfg.max_inner);
}

}  // namespace

ScenarioConfig scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: bad JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("scenario: top level must be an object");

  ScenarioConfig cfg = default_scenario();
  std::size_t known = 0;
  for_each_field(cfg, [&](const char* key, auto& field) {
    if (auto it = j.find(key); it != j.end()) {
      try {
        it->get_to(field);
      } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scenario: field '") + key +
                                    "' has the wrong type: " + e.what());
      }
      ++known;
    }
  });
  if (known != j.size()) {
    ScenarioConfig probe;
    for (const auto& [key, value] : j.items()) {
      bool found = false;
      for_each_field(probe, [&](const char* k, auto&) { found |= (key == k); });
      if (!found) throw std::invalid_argument("scenario: unknown field '" + key + "'");
    }
  }
  // Spacing follows the uplink carrier unless pinned explicitly.
  if (!j.contains("antenna_spacing_m")) {
    cfg.antenna_spacing_m = kSpeedOfLight / (2.0 * cfg.f_ul_hz);
  }
  cfg.validate();
  return cfg;
}

std::string scenario_to_json_text(const ScenarioConfig& cfg) {
  json j = json::object();
  for_each_field(const_cast<ScenarioConfig&>(cfg),
                 [&](const char* key, auto& field) { j[key] = field; });
  return j.dump(2);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str());
}

void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("scenario: cannot write " + path.string());
  out << scenario_to_json_text(cfg) << '\n';
}

}  // namespace risfdd
