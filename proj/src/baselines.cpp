#include "risfdd/baselines.hpp"

#include <chrono>
#include <stdexcept>

namespace risfdd {

SolveResult oneway_ao(const ChannelSet& ch, const ScenarioConfig& cfg, Rng& rng,
                      OnewayDirection direction) {
  const double forced = direction == OnewayDirection::downlink ? 1.0 : 0.0;
  return lcao_solve_weighted(ch, cfg, rng, VecD::Constant(cfg.l_ris, forced));
}

SolveResult separated_elements(const ChannelSet& ch, const ScenarioConfig& cfg,
                               Rng& rng) {
  if (cfg.l_ris % 2 != 0)
    throw std::invalid_argument(
        "separated_elements: element count must be even to split the surface");
  VecD weights(cfg.l_ris);
  weights.head(cfg.l_ris / 2).setConstant(1.0);  // downlink-driven half
  weights.tail(cfg.l_ris / 2).setConstant(0.0);  // uplink-driven half
  return lcao_solve_weighted(ch, cfg, rng, weights);
}

SolveResult random_phases(const ChannelSet& ch, const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  SolveResult out;
  out.refl = ReflectionState{random_unit_phases(cfg.l_ris, rng), cfg.theta_d_rad};
  out.precoders = optimal_precoders(ch, out.refl, cfg);
  out.rates = evaluate(ch, out.refl, out.precoders, cfg);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  out.trace.rows.push_back(
      {0, out.rates.r_dl, out.rates.r_ul, out.rates.r_wsr, std::nullopt, ms});
  out.outer_iters = 0;
  return out;
}

}  // namespace risfdd
