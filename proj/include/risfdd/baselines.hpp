#pragma once

#include "risfdd/closed_form_ao.hpp"

namespace risfdd {

enum class OnewayDirection { downlink, uplink };

// Closed-form sweeps driven by a single direction's coupling only; precoders
// and both rates are still computed every round and the stopping rule uses
// the configured eta. Identical to lcao_solve when cfg.eta already is 1 (DL)
// or 0 (UL).
SolveResult oneway_ao(const ChannelSet& ch, const ScenarioConfig& cfg, Rng& rng,
                      OnewayDirection direction);

// First half of the elements driven by the downlink coupling, second half by
// the uplink coupling. Throws std::invalid_argument for odd element counts.
SolveResult separated_elements(const ChannelSet& ch, const ScenarioConfig& cfg,
                               Rng& rng);

// Uniform random phases, eigenmode precoders, single evaluation.
SolveResult random_phases(const ChannelSet& ch, const ScenarioConfig& cfg, Rng& rng);

}  // namespace risfdd
