#pragma once

#include <functional>

#include "risfdd/rng.hpp"
#include "risfdd/scenario.hpp"
#include "risfdd/types.hpp"

namespace risfdd {

// One realization of the four propagation segments. Rows index reflecting
// elements: g_* are element-by-BS views of the BS-RIS segment and h_* are
// element-by-UE views of the RIS-UE segment, drawn per duplex band.
struct ChannelSet {
  MatC g_dl;  // l_ris x n_bs
  MatC h_dl;  // l_ris x k_ue
  MatC g_ul;  // l_ris x n_bs
  MatC h_ul;  // l_ris x k_ue
};

// Distance/frequency power law in dB, referenced to 1 m and 1 GHz.
// Throws std::invalid_argument below the 1 m reference distance.
double path_loss_db(double distance_m, double freq_hz);

// Unit-norm linear-array steering vector for a given arrival/departure angle.
VecC ula_response(int n, double spacing_m, double freq_hz, double angle_rad);

// Unit-norm planar-array steering vector, vertical (x) horizontal Kronecker
// product: entry (iv * l_h + ih) = a_v(iv) * a_h(ih).
VecC upa_response(int l_h, int l_v, double spacing_h_m, double spacing_v_m,
                  double freq_hz, double azimuth_rad, double elevation_rad);

using SteeringSampler = std::function<VecC(Rng&)>;

// Sum of n_paths rank-one rays with i.i.d. circular complex-normal gains of
// the given variance, scaled by sqrt(n_rx * n_tx / n_paths). Per path the
// draw order is fixed: gain (re, im), then receive angles, then transmit
// angles, so realizations are reproducible byte for byte.
MatC draw_channel(Rng& rng, int n_rx, int n_tx, int n_paths,
                  double gain_variance, const SteeringSampler& rx_steering,
                  const SteeringSampler& tx_steering);

// All four segments for one (scenario, seed) pair. Each segment consumes its
// own substream of the seed; the downlink pair uses f_dl_hz and the uplink
// pair f_ul_hz in both the path loss and the steering responses.
ChannelSet realize_channels(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace risfdd
