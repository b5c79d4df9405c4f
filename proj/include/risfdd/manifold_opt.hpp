#pragma once

#include <functional>

#include "risfdd/channel.hpp"
#include "risfdd/trace.hpp"
#include "risfdd/transceiver.hpp"

namespace risfdd {

// Line-search and stopping knobs for the projected conjugate-gradient ascent
// on the product of unit circles. eps_grad/max_iters mirror the scenario's
// eps_inner/max_inner.
struct RcgSettings {
  double initial_step = 1.0;  // first trial length; adapts to 2x the last accepted step
  double contraction = 0.5;
  double slope = 1e-4;  // sufficient-increase coefficient
  int max_backtracks = 50;
  double eps_grad = 1e-4;
  int max_iters = 200;
};

// Euclidean gradients of the rates with respect to the reflection vector.
// The conjugate derivative convention is used: for a real objective f these
// equal (df/dx + j*df/dy)/2 per element.
VecC euclidean_gradient_dl(const ChannelSet& ch, const ReflectionState& refl,
                           const MatC& f_dl, double noise_w);
VecC euclidean_gradient_ul(const ChannelSet& ch, const ReflectionState& refl,
                           const MatC& f_ul, double noise_w);
// eta-weighted combination; at eta = 1 or 0 the ignored direction is never
// evaluated, so the result is bit-identical to the single-direction gradient.
VecC euclidean_gradient_wsr(const ChannelSet& ch, const ReflectionState& refl,
                            const PrecoderPair& precoders, const ScenarioConfig& cfg);

// Tangent-space machinery of the unit-modulus manifold. Tangent vectors at
// theta satisfy Re(t_l * conj(theta_l)) = 0 per element.
VecC riemannian_project(const VecC& theta, const VecC& euclidean_grad);
VecC transport(const VecC& theta_new, const VecC& tangent);

// Polak-Ribiere ascent direction with a nonnegative clamp; restarts to the
// gradient whenever the combined direction stops being an ascent direction.
VecC conjugate_direction(const VecC& theta_new, const VecC& grad_new,
                         const VecC& grad_old, const VecC& dir_old);

// Element-wise renormalization back to the unit circle. Throws
// std::domain_error when an entry's magnitude falls below 1e-15 (the line
// search treats that trial as failed and keeps backtracking).
VecC retract(const VecC& theta_plus_step);

struct ArmijoResult {
  double step = 0.0;  // 0 means no acceptable step was found
  VecC theta;
  double value = 0.0;
  int evals = 0;
};

// Backtracking search for f(retract(theta + step*direction)) >=
// f(theta) + slope*step*Re<grad, direction>. A nonpositive directional
// derivative or a zero direction returns step 0 with theta unchanged.
ArmijoResult armijo_step(const std::function<double(const VecC&)>& objective,
                         const VecC& theta, double value0, const VecC& direction,
                         const VecC& grad, const RcgSettings& settings);

enum class RcgExit { grad_converged, step_exhausted, max_iters };

struct RcgResult {
  VecC theta;
  double objective = 0.0;
  double grad_norm = 0.0;
  int iters = 0;  // accepted steps
  RcgExit exit = RcgExit::grad_converged;
};

// Inner solver: maximize the weighted sum rate over the reflection phases at
// fixed precoders. The weighted objective is nondecreasing across accepted
// iterates by construction of the line search.
RcgResult rcg_solve(const ChannelSet& ch, const PrecoderPair& precoders,
                    const ReflectionState& start, const ScenarioConfig& cfg,
                    const RcgSettings& settings);

// Outer alternation: random start phases from rng, then rounds of
// (phase ascent at fixed precoders, eigenmode precoder refresh) until the
// weighted sum-rate gain per round drops below eps_outer.
SolveResult manifold_alternate(const ChannelSet& ch, const ScenarioConfig& cfg,
                               Rng& rng);

}  // namespace risfdd
