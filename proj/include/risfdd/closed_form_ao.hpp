#pragma once

#include "risfdd/channel.hpp"
#include "risfdd/trace.hpp"
#include "risfdd/transceiver.hpp"

namespace risfdd {

// Precoded per-element factors plus running composites for a sweep.
// Row l of g_dl_eff / h_ul_eff is the BS-side (resp. UE-side) factor of
// element l after precoding; the composites are the full precoded effective
// channels, i.e. the sum over elements of theta_l * (receive-side column) *
// (transmit-side row). They are updated rank-one per element within a sweep
// and rebuilt from scratch when the precoders change.
struct LinkTerms {
  MatC g_dl_eff;      // l_ris x n_streams_dl
  MatC h_ul_eff;      // l_ris x n_streams_ul
  MatC composite_dl;  // k_ue x n_streams_dl
  MatC composite_ul;  // n_bs x n_streams_ul  (band offset omitted; it cancels)
};

LinkTerms make_link_terms(const ChannelSet& ch, const ReflectionState& refl,
                          const PrecoderPair& precoders);

// Single-element subproblem: with every other phase frozen, each direction's
// rate is log2 det(a + theta*b + conj(theta)*b^H) up to a constant. a is
// Hermitian with eigenvalues >= 1, b has rank <= 1, and lambda = tr(a^{-1} b)
// is the one data-bearing eigenvalue of a^{-1} b.
struct ElementSubproblem {
  MatC a_dl, b_dl;  // k_ue x k_ue
  MatC a_ul, b_ul;  // n_bs x n_bs
  Cplx lambda_dl{0.0, 0.0};
  Cplx lambda_ul{0.0, 0.0};
};

// Computes the lambdas from the given blocks (one Hermitian solve each).
ElementSubproblem assemble_subproblem(MatC a_dl, MatC b_dl, MatC a_ul, MatC b_ul);

// Leave-one-out blocks for one element from the current composites.
ElementSubproblem build_subproblem(const LinkTerms& terms, const ChannelSet& ch,
                                   const ReflectionState& refl, int element,
                                   const ScenarioConfig& cfg);

// theta-dependent part of one direction's objective, evaluated two
// independent ways: a dense log-det and the scalar reduction
// log2(1 + |lambda|^2 (1 - c1*c1') + 2 Re(theta*lambda)) built from the
// rank-one eigenbasis. scalar_valid is false when lambda is numerically zero
// (the matrix is then defective and the reduction does not apply).
struct ObjectiveForms {
  double direct = 0.0;
  double scalar = 0.0;
  bool scalar_valid = false;
};
ObjectiveForms element_objective_forms(const MatC& a, const MatC& b, Cplx theta);

// eta-weighted exact single-element objective. Cross-checks the two forms of
// each direction at 1e-8 and throws std::logic_error if they disagree.
// Test scaffolding; the solver itself never evaluates this.
double exact_element_objective(const ElementSubproblem& sub, Cplx theta, double eta);

// Maximizer of Re(theta * (eta*lambda_dl + (1-eta)*lambda_ul)) on the unit
// circle: exp(-j * arg(eta*lambda_dl + (1-eta)*lambda_ul)).
Cplx closed_form_phase(Cplx lambda_dl, Cplx lambda_ul, double eta);

// One reflection coefficient from the linearized surrogate. Falls back to
// the single-direction phase when the other lambda is numerically zero
// (|lambda| <= tol * ||b||_F, or absolute tol when b = 0), and to 1 when
// both vanish.
Cplx element_update(const ElementSubproblem& sub, double eta, double tol = 1e-12);

// Structural checks: |lambda| <= ||b||_F for both directions, and the
// smallest eigenvalue of a equals 1 (within tol) whenever the stream count
// is below the dimension minus one.
bool check_subproblem_bounds(const ElementSubproblem& sub, int n_streams_dl,
                             int n_streams_ul, double tol = 1e-8);

// Outer alternation with closed-form element sweeps: random start phases,
// then rounds of (sweep elements 1..L, refresh eigenmode precoders) with the
// same stopping rule as the manifold path. The linearization means the trace
// is not guaranteed monotone, unlike the manifold solver.
SolveResult lcao_solve(const ChannelSet& ch, const ScenarioConfig& cfg, Rng& rng);

// Same engine with a per-element direction weight (1 = downlink only,
// 0 = uplink only) in place of the configured eta inside element updates;
// the stopping rule still uses the configured eta. Backs the one-way and
// split-surface baselines.
SolveResult lcao_solve_weighted(const ChannelSet& ch, const ScenarioConfig& cfg,
                                Rng& rng, const VecD& element_eta);

}  // namespace risfdd
