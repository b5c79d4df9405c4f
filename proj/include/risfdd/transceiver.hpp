#pragma once

#include "risfdd/channel.hpp"
#include "risfdd/scenario.hpp"
#include "risfdd/types.hpp"

namespace risfdd {

// Reflection phases plus the bulk phase offset the surface applies on the
// uplink band. theta holds one unit-modulus coefficient per element.
struct ReflectionState {
  VecC theta;
  double theta_d_rad = 0.0;
};

// Transmit precoders; columns are streams, squared Frobenius norm equals the
// power budget in watts.
struct PrecoderPair {
  MatC f_dl;  // n_bs x n_streams_dl
  MatC f_ul;  // k_ue x n_streams_ul
};

struct RatePair {
  double r_dl;
  double r_ul;
  double r_wsr;  // eta * r_dl + (1 - eta) * r_ul
};

// Compound element-wise reflected channels. The uplink one carries the bulk
// phase offset; it scales the whole matrix by a unit factor and therefore
// cancels in every rate below.
MatC effective_channel_dl(const ChannelSet& ch, const ReflectionState& refl);  // k_ue x n_bs
MatC effective_channel_ul(const ChannelSet& ch, const ReflectionState& refl);  // n_bs x k_ue

// log2 det(I + (1/noise) H F F^H H^H) in bits. Throws std::invalid_argument
// on non-finite inputs or nonpositive noise.
double achievable_rate(const MatC& h_eff, const MatC& precoder, double noise_w);

// Power allocation maximizing sum log2(1 + g_i p_i / noise) subject to
// sum p_i = budget, p_i >= 0. Exact common-water-level solution via the
// sorted-threshold scan. Throws if every gain is zero.
VecD water_filling(const VecD& gains, double noise_w, double budget_w);

// Eigenmode precoder: right singular basis of h_eff truncated to n_streams,
// powered by water filling over the squared singular values. Each retained
// singular vector is rotated so its largest-magnitude entry (first such on
// ties) is real positive, which pins the SVD phase ambiguity.
MatC optimal_precoder(const MatC& h_eff, double noise_w, double budget_w,
                      int n_streams);

PrecoderPair optimal_precoders(const ChannelSet& ch, const ReflectionState& refl,
                               const ScenarioConfig& cfg);

RatePair evaluate(const ChannelSet& ch, const ReflectionState& refl,
                  const PrecoderPair& precoders, const ScenarioConfig& cfg);

// i.i.d. phases uniform in [0, 2*pi), unit modulus.
VecC random_unit_phases(int l, Rng& rng);

}  // namespace risfdd
