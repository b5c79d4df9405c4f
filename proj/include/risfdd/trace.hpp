#pragma once

#include <optional>
#include <vector>

#include "risfdd/transceiver.hpp"

namespace risfdd {

// One row per outer round. Row 0 is the evaluation of the start point before
// any optimization; grad_norm is filled by the manifold solver only (the
// inner loop's exit gradient norm).
struct TraceRow {
  int outer_iter = 0;
  double r_dl = 0.0;
  double r_ul = 0.0;
  double r_wsr = 0.0;
  std::optional<double> grad_norm;
  double wall_ms = 0.0;
};

struct OptimizationTrace {
  std::vector<TraceRow> rows;
};

struct SolveResult {
  ReflectionState refl;
  PrecoderPair precoders;
  RatePair rates{};
  OptimizationTrace trace;
  int outer_iters = 0;  // rows behind row 0
};

}  // namespace risfdd
