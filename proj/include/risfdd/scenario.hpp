#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

namespace risfdd {

// Static description of one simulated link: array sizes, duplex frequencies,
// power/noise budgets, geometry, and the stopping rules shared by all
// optimizers. Powers are dBm and only converted to watts at this boundary;
// everything downstream works in linear units (W, Hz, m, rad).
struct ScenarioConfig {
  int n_bs = 16;  // BS antennas (uniform linear array)
  int k_ue = 8;   // UE antennas (uniform linear array)
  int l_ris = 100;  // reflecting elements, l_h * l_v planar array
  int l_h = 10;
  int l_v = 10;

  double f_dl_hz = 2.135e9;  // downlink carrier
  double f_ul_hz = 1.945e9;  // uplink carrier

  double p_dl_max_dbm = 27.0;
  double p_ul_max_dbm = 23.0;
  double noise_dl_dbm = -104.0;
  double noise_ul_dbm = -104.0;

  double eta = 0.5;  // downlink weight in the weighted sum rate

  int n_streams_dl = 5;
  int n_streams_ul = 5;

  // Multipath counts per segment and band (g: BS-RIS, h: RIS-UE).
  int n_paths_g_dl = 5;
  int n_paths_g_ul = 5;
  int n_paths_h_dl = 5;
  int n_paths_h_ul = 5;

  std::array<double, 2> pos_bs = {0.0, 0.0};  // meters
  std::array<double, 2> pos_ris = {750.0, 5.0};
  std::array<double, 2> pos_ue = {800.0, 0.0};

  // Element spacing for every array; default is half the uplink wavelength.
  double antenna_spacing_m = 299792458.0 / (2.0 * 1.945e9);

  double theta_d_rad = 0.0;  // bulk reflection-phase offset between the bands

  std::uint64_t seed = 0;

  double eps_outer = 1e-4;  // stop when the per-round sum-rate gain (bits) drops below
  double eps_inner = 1e-4;  // gradient-norm stop for the manifold inner loop
  int max_outer = 50;
  int max_inner = 200;

  // Throws std::invalid_argument on inconsistent combinations
  // (l_ris != l_h*l_v, stream counts above min(n_bs, k_ue), eta outside
  // [0,1], nonpositive frequencies/spacings/counts, ...).
  void validate() const;

  double p_dl_max_w() const;
  double p_ul_max_w() const;
  double noise_dl_w() const;
  double noise_ul_w() const;
};

double dbm_to_watts(double dbm);

struct LinkDistances {
  double bs_ris_m;
  double ris_ue_m;
};
LinkDistances link_distances(const ScenarioConfig& cfg);

// The 16x8 MIMO / 10x10-element measurement baseline used by default.
ScenarioConfig default_scenario();

// JSON round trip. Keys match the struct field names exactly; unknown keys
// are rejected so typos fail loudly, absent keys keep their defaults (with
// the antenna spacing re-derived from f_ul_hz when not given explicitly).
ScenarioConfig scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const ScenarioConfig& cfg);
ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path);

}  // namespace risfdd
