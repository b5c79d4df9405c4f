#include "risfdd/closed_form_ao.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace risfdd {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

LinkTerms make_link_terms(const ChannelSet& ch, const ReflectionState& refl,
                          const PrecoderPair& precoders) {
  if (refl.theta.size() != ch.g_dl.rows())
    throw std::invalid_argument("link terms: reflection size mismatch");
  LinkTerms t;
  t.g_dl_eff = ch.g_dl * precoders.f_dl;
  t.h_ul_eff = ch.h_ul * precoders.f_ul;
  t.composite_dl = ch.h_dl.adjoint() * (refl.theta.asDiagonal() * t.g_dl_eff);
  t.composite_ul = ch.g_ul.adjoint() * (refl.theta.asDiagonal() * t.h_ul_eff);
  return t;
}

ElementSubproblem assemble_subproblem(MatC a_dl, MatC b_dl, MatC a_ul, MatC b_ul) {
  const auto check = [](const MatC& a, const MatC& b, const char* side) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
      std::ostringstream msg;
      msg << "subproblem blocks must be square and matching (" << side << ")";
      throw std::invalid_argument(msg.str());
    }
  };
  check(a_dl, b_dl, "downlink");
  check(a_ul, b_ul, "uplink");

  const auto lambda_of = [](const MatC& a, const MatC& b) {
    Eigen::LLT<MatC> llt(a);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("subproblem: 'a' block must be positive definite");
    return llt.solve(b).trace();
  };

  ElementSubproblem sub;
  sub.lambda_dl = lambda_of(a_dl, b_dl);
  sub.lambda_ul = lambda_of(a_ul, b_ul);
  sub.a_dl = std::move(a_dl);
  sub.b_dl = std::move(b_dl);
  sub.a_ul = std::move(a_ul);
  sub.b_ul = std::move(b_ul);
  return sub;
}

ElementSubproblem build_subproblem(const LinkTerms& terms, const ChannelSet& ch,
                                   const ReflectionState& refl, int element,
                                   const ScenarioConfig& cfg) {
  if (element < 0 || element >= refl.theta.size())
    throw std::invalid_argument("build_subproblem: element index out of range");
  const Cplx theta_l = refl.theta(element);

  // Downlink: receive side is the UE, transmit rows are the precoded BS
  // factors. x collects every element but this one.
  const double noise_dl = cfg.noise_dl_w();
  const VecC h = ch.h_dl.row(element).adjoint();
  const auto g_row = terms.g_dl_eff.row(element);
  const MatC x_dl = terms.composite_dl - theta_l * (h * g_row);
  MatC a_dl = x_dl * x_dl.adjoint() / noise_dl;
  a_dl.noalias() += (g_row.squaredNorm() / noise_dl) * (h * h.adjoint());
  a_dl.diagonal().array() += 1.0;
  const VecC xg = x_dl * g_row.adjoint();
  const MatC b_dl = h * xg.adjoint() / noise_dl;

  // Uplink mirror; the band offset cancels between x and its conjugate.
  const double noise_ul = cfg.noise_ul_w();
  const VecC g = ch.g_ul.row(element).adjoint();
  const auto h_row = terms.h_ul_eff.row(element);
  const MatC x_ul = terms.composite_ul - theta_l * (g * h_row);
  MatC a_ul = x_ul * x_ul.adjoint() / noise_ul;
  a_ul.noalias() += (h_row.squaredNorm() / noise_ul) * (g * g.adjoint());
  a_ul.diagonal().array() += 1.0;
  const VecC xh = x_ul * h_row.adjoint();
  const MatC b_ul = g * xh.adjoint() / noise_ul;

  return assemble_subproblem(std::move(a_dl), std::move(b_dl), std::move(a_ul),
                             std::move(b_ul));
}

ObjectiveForms element_objective_forms(const MatC& a, const MatC& b, Cplx theta) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("element objective: blocks must be square and matching");
  const Eigen::Index n = a.rows();

  Eigen::LLT<MatC> llt(a);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("element objective: 'a' must be positive definite");
  const MatC m = llt.solve(b);

  ObjectiveForms out;
  {
    MatC dense = theta * m + std::conj(theta) * llt.solve(b.adjoint());
    dense.diagonal().array() += 1.0;
    const Cplx det = Eigen::PartialPivLU<MatC>(dense).determinant();
    if (std::abs(det.imag()) > 1e-9 * std::max(1.0, std::abs(det.real())) ||
        !(det.real() > 0.0))
      throw std::runtime_error("element objective: determinant left the real axis");
    out.direct = std::log2(det.real());
  }

  const Cplx lambda = m.trace();
  const double b_scale = b.norm();
  const double thr = b_scale > 0.0 ? 1e-12 * b_scale : 1e-12;
  if (std::abs(lambda) <= thr) return out;  // defective case: no scalar form

  // Rank-one factors b = u v^H.
  Eigen::JacobiSVD<MatC> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (n > 1 && svd.singularValues()(1) > 1e-10 * svd.singularValues()(0))
    throw std::invalid_argument("element objective: rank-one coupling expected");
  const VecC u = svd.matrixU().col(0) * svd.singularValues()(0);
  const VecC v = svd.matrixV().col(0);

  // Eigenbasis of a^{-1} b: the solve direction carries lambda, the
  // orthogonal complement of v carries zeros.
  VecC w = llt.solve(u);
  w /= w.norm();
  Eigen::HouseholderQR<MatC> qr(v);
  const MatC q = qr.householderQ();
  MatC basis(n, n);
  basis.col(0) = w;
  if (n > 1) basis.rightCols(n - 1) = q.rightCols(n - 1);

  const MatC c = basis.adjoint() * a * basis;
  const double c_first = c(0, 0).real();
  const double c_inv_first = c.inverse()(0, 0).real();
  const double mag = std::abs(lambda);
  out.scalar = std::log2(1.0 + mag * mag * (1.0 - c_first * c_inv_first) +
                         2.0 * (theta * lambda).real());
  out.scalar_valid = true;
  return out;
}

double exact_element_objective(const ElementSubproblem& sub, Cplx theta, double eta) {
  if (eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("exact_element_objective: eta outside [0, 1]");
  const ObjectiveForms dl = element_objective_forms(sub.a_dl, sub.b_dl, theta);
  const ObjectiveForms ul = element_objective_forms(sub.a_ul, sub.b_ul, theta);
  for (const ObjectiveForms* f : {&dl, &ul}) {
    if (f->scalar_valid && std::abs(f->direct - f->scalar) > 1e-8) {
      std::ostringstream msg;
      msg << "exact_element_objective: dense and scalar forms disagree ("
          << f->direct << " vs " << f->scalar << ")";
      throw std::logic_error(msg.str());
    }
  }
  return eta * dl.direct + (1.0 - eta) * ul.direct;
}

Cplx closed_form_phase(Cplx lambda_dl, Cplx lambda_ul, double eta) {
  if (eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("closed_form_phase: eta outside [0, 1]");
  const Cplx w = eta * lambda_dl + (1.0 - eta) * lambda_ul;
  // atan2(0, 0) = 0, so a fully cancelled coupling degrades to phase 1,
  // which is as good as any other point of the then-flat surrogate.
  return std::polar(1.0, -std::atan2(w.imag(), w.real()));
}

Cplx element_update(const ElementSubproblem& sub, double eta, double tol) {
  if (eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("element_update: eta outside [0, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("element_update: tol must be positive");

  const auto active = [tol](Cplx lambda, const MatC& b) {
    const double scale = b.norm();
    return std::abs(lambda) > (scale > 0.0 ? tol * scale : tol);
  };
  const bool dl_on = active(sub.lambda_dl, sub.b_dl);
  const bool ul_on = active(sub.lambda_ul, sub.b_ul);

  if (dl_on && ul_on) return closed_form_phase(sub.lambda_dl, sub.lambda_ul, eta);
  if (dl_on) return std::conj(sub.lambda_dl) / std::abs(sub.lambda_dl);
  if (ul_on) return std::conj(sub.lambda_ul) / std::abs(sub.lambda_ul);
  return Cplx(1.0, 0.0);  // objective flat in this element
}

bool check_subproblem_bounds(const ElementSubproblem& sub, int n_streams_dl,
                             int n_streams_ul, double tol) {
  bool ok = std::abs(sub.lambda_dl) <= sub.b_dl.norm() + tol &&
            std::abs(sub.lambda_ul) <= sub.b_ul.norm() + tol;
  // With fewer streams than (dimension - 1) the leave-one-out terms cannot
  // fill the space, so 'a' keeps a unit eigenvalue.
  if (n_streams_dl < sub.a_dl.rows() - 1) {
    Eigen::SelfAdjointEigenSolver<MatC> es(sub.a_dl, Eigen::EigenvaluesOnly);
    ok = ok && std::abs(es.eigenvalues()(0) - 1.0) <= tol;
  }
  if (n_streams_ul < sub.a_ul.rows() - 1) {
    Eigen::SelfAdjointEigenSolver<MatC> es(sub.a_ul, Eigen::EigenvaluesOnly);
    ok = ok && std::abs(es.eigenvalues()(0) - 1.0) <= tol;
  }
  return ok;
}

namespace {

SolveResult lcao_engine(const ChannelSet& ch, const ScenarioConfig& cfg, Rng& rng,
                        const VecD* element_eta) {
  cfg.validate();
  if (element_eta && element_eta->size() != cfg.l_ris)
    throw std::invalid_argument("lcao: per-element weight size mismatch");

  SolveResult out;
  auto round_start = std::chrono::steady_clock::now();
  out.refl = ReflectionState{random_unit_phases(cfg.l_ris, rng), cfg.theta_d_rad};
  out.precoders = optimal_precoders(ch, out.refl, cfg);
  out.rates = evaluate(ch, out.refl, out.precoders, cfg);
  out.trace.rows.push_back({0, out.rates.r_dl, out.rates.r_ul, out.rates.r_wsr,
                            std::nullopt, elapsed_ms(round_start)});

  LinkTerms terms = make_link_terms(ch, out.refl, out.precoders);
  for (int s = 1; s <= cfg.max_outer; ++s) {
    round_start = std::chrono::steady_clock::now();
    for (int l = 0; l < cfg.l_ris; ++l) {
      const ElementSubproblem sub = build_subproblem(terms, ch, out.refl, l, cfg);
      const double weight = element_eta ? (*element_eta)(l) : cfg.eta;
      const Cplx updated = element_update(sub, weight);
      const Cplx delta = updated - out.refl.theta(l);
      if (delta != Cplx(0.0, 0.0)) {
        terms.composite_dl.noalias() +=
            delta * (ch.h_dl.row(l).adjoint() * terms.g_dl_eff.row(l));
        terms.composite_ul.noalias() +=
            delta * (ch.g_ul.row(l).adjoint() * terms.h_ul_eff.row(l));
        out.refl.theta(l) = updated;
      }
    }
    out.precoders = optimal_precoders(ch, out.refl, cfg);
    terms = make_link_terms(ch, out.refl, out.precoders);  // fresh composites
    const double prev = out.rates.r_wsr;
    out.rates = evaluate(ch, out.refl, out.precoders, cfg);
    out.trace.rows.push_back({s, out.rates.r_dl, out.rates.r_ul, out.rates.r_wsr,
                              std::nullopt, elapsed_ms(round_start)});
    out.outer_iters = s;
    if (std::abs(out.rates.r_wsr - prev) <= cfg.eps_outer) break;
  }
  return out;
}

}  // namespace

SolveResult lcao_solve(const ChannelSet& ch, const ScenarioConfig& cfg, Rng& rng) {
  return lcao_engine(ch, cfg, rng, nullptr);
}

SolveResult lcao_solve_weighted(const ChannelSet& ch, const ScenarioConfig& cfg,
                                Rng& rng, const VecD& element_eta) {
  return lcao_engine(ch, cfg, rng, &element_eta);
}

}  // namespace risfdd
