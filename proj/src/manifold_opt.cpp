#include "risfdd/manifold_opt.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace risfdd {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;

double log_det_bits(const MatC& gram) {
  Eigen::LLT<MatC> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("reflection objective: Gram factorization failed");
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    log_det += std::log(llt.matrixL()(i, i).real());
  return 2.0 * log_det / kLn2;
}

// One direction's rate and gradient share the same precoded factors:
// rows_rx holds the receive-side element rows (L x m), p the precoded
// transmit-side rows (L x ns); the effective precoded channel is
// rows_rx^H * diag(theta) * p.
double directional_rate(const MatC& rows_rx, const MatC& p, const VecC& theta,
                        double noise_w) {
  const MatC s = rows_rx.adjoint() * (theta.asDiagonal() * p);
  MatC gram = s.adjoint() * s / noise_w;
  gram.diagonal().array() += 1.0;
  return log_det_bits(gram);
}

VecC directional_gradient(const MatC& rows_rx, const MatC& p, const VecC& theta,
                          double noise_w) {
  const MatC s = rows_rx.adjoint() * (theta.asDiagonal() * p);
  MatC gram = s.adjoint() * s / noise_w;
  gram.diagonal().array() += 1.0;
  Eigen::LLT<MatC> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("reflection gradient: Gram factorization failed");
  const MatC se = llt.solve(s.adjoint()).adjoint();  // s * gram^{-1}
  const MatC u = rows_rx * se;                       // L x ns
  return (u.array() * p.array().conjugate()).rowwise().sum().matrix() /
         (kLn2 * noise_w);
}

// Fixed-precoder weighted objective used by the inner solver. The uplink
// band offset scales its effective channel by a unit factor and cancels in
// both the rate and the gradient, so it never appears here.
class WsrObjective {
 public:
  WsrObjective(const ChannelSet& ch, const PrecoderPair& f, const ScenarioConfig& cfg)
      : h_dl_(ch.h_dl),
        g_ul_(ch.g_ul),
        pd_(ch.g_dl * f.f_dl),
        pu_(ch.h_ul * f.f_ul),
        noise_dl_(cfg.noise_dl_w()),
        noise_ul_(cfg.noise_ul_w()),
        eta_(cfg.eta) {}

  double value(const VecC& theta) const {
    double v = 0.0;
    if (eta_ > 0.0) v += eta_ * directional_rate(h_dl_, pd_, theta, noise_dl_);
    if (eta_ < 1.0) v += (1.0 - eta_) * directional_rate(g_ul_, pu_, theta, noise_ul_);
    return v;
  }

  VecC gradient(const VecC& theta) const {
    VecC g = VecC::Zero(theta.size());
    if (eta_ > 0.0) g += eta_ * directional_gradient(h_dl_, pd_, theta, noise_dl_);
    if (eta_ < 1.0)
      g += (1.0 - eta_) * directional_gradient(g_ul_, pu_, theta, noise_ul_);
    return g;
  }

 private:
  const MatC& h_dl_;
  const MatC& g_ul_;
  MatC pd_, pu_;
  double noise_dl_, noise_ul_, eta_;
};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

VecC euclidean_gradient_dl(const ChannelSet& ch, const ReflectionState& refl,
                           const MatC& f_dl, double noise_w) {
  return directional_gradient(ch.h_dl, ch.g_dl * f_dl, refl.theta, noise_w);
}

VecC euclidean_gradient_ul(const ChannelSet& ch, const ReflectionState& refl,
                           const MatC& f_ul, double noise_w) {
  return directional_gradient(ch.g_ul, ch.h_ul * f_ul, refl.theta, noise_w);
}

VecC euclidean_gradient_wsr(const ChannelSet& ch, const ReflectionState& refl,
                            const PrecoderPair& precoders, const ScenarioConfig& cfg) {
  if (cfg.eta >= 1.0)
    return euclidean_gradient_dl(ch, refl, precoders.f_dl, cfg.noise_dl_w());
  if (cfg.eta <= 0.0)
    return euclidean_gradient_ul(ch, refl, precoders.f_ul, cfg.noise_ul_w());
  return cfg.eta * euclidean_gradient_dl(ch, refl, precoders.f_dl, cfg.noise_dl_w()) +
         (1.0 - cfg.eta) *
             euclidean_gradient_ul(ch, refl, precoders.f_ul, cfg.noise_ul_w());
}

VecC riemannian_project(const VecC& theta, const VecC& euclidean_grad) {
  if (theta.size() != euclidean_grad.size())
    throw std::invalid_argument("riemannian_project: size mismatch");
  const Eigen::ArrayXd radial =
      (euclidean_grad.array() * theta.array().conjugate()).real();
  return euclidean_grad.array() - theta.array() * radial.cast<Cplx>();
}

VecC transport(const VecC& theta_new, const VecC& tangent) {
  // Moving a tangent vector between fibers is the same radial removal,
  // anchored at the destination point.
  return riemannian_project(theta_new, tangent);
}

VecC conjugate_direction(const VecC& theta_new, const VecC& grad_new,
                         const VecC& grad_old, const VecC& dir_old) {
  const double denom = grad_old.squaredNorm();
  double gamma = 0.0;
  if (denom > 0.0) {
    const VecC grad_old_here = transport(theta_new, grad_old);
    gamma = std::max(0.0, grad_new.dot(grad_new - grad_old_here).real() / denom);
  }
  VecC d = grad_new + gamma * transport(theta_new, dir_old);
  if (!(d.dot(grad_new).real() > 0.0)) d = grad_new;  // restart on lost ascent
  return d;
}

VecC retract(const VecC& theta_plus_step) {
  VecC out(theta_plus_step.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double mag = std::abs(theta_plus_step(i));
    if (mag < 1e-15)
      throw std::domain_error("retract: entry magnitude below 1e-15");
    out(i) = theta_plus_step(i) / mag;
  }
  return out;
}

ArmijoResult armijo_step(const std::function<double(const VecC&)>& objective,
                         const VecC& theta, double value0, const VecC& direction,
                         const VecC& grad, const RcgSettings& settings) {
  ArmijoResult res;
  res.theta = theta;
  res.value = value0;
  const double dd = grad.dot(direction).real();
  if (direction.isZero(0.0) || !(dd > 0.0)) return res;

  double tau = settings.initial_step;
  for (int k = 0; k <= settings.max_backtracks; ++k, tau *= settings.contraction) {
    const VecC candidate = theta + tau * direction;
    if (candidate.cwiseAbs().minCoeff() < 1e-15) continue;  // degenerate trial
    VecC next = retract(candidate);
    ++res.evals;
    const double v = objective(next);
    if (v >= value0 + settings.slope * tau * dd) {
      res.step = tau;
      res.theta = std::move(next);
      res.value = v;
      return res;
    }
  }
  return res;  // no acceptable step; caller treats the point as stationary
}

RcgResult rcg_solve(const ChannelSet& ch, const PrecoderPair& precoders,
                    const ReflectionState& start, const ScenarioConfig& cfg,
                    const RcgSettings& settings) {
  const WsrObjective obj(ch, precoders, cfg);
  const auto value = [&obj](const VecC& t) { return obj.value(t); };

  VecC theta = start.theta;
  double f = obj.value(theta);
  VecC g = riemannian_project(theta, obj.gradient(theta));
  VecC d = g;

  RcgResult res;
  res.exit = RcgExit::max_iters;
  double trial = settings.initial_step;
  int it = 0;
  while (true) {
    if (g.norm() <= settings.eps_grad) {
      res.exit = RcgExit::grad_converged;
      break;
    }
    if (it >= settings.max_iters) {
      res.exit = RcgExit::max_iters;
      break;
    }
    RcgSettings local = settings;
    local.initial_step = trial;
    const ArmijoResult ls = armijo_step(value, theta, f, d, g, local);
    if (ls.step == 0.0) {
      res.exit = RcgExit::step_exhausted;
      break;
    }
    trial = 2.0 * ls.step;  // warm-start the next search
    f = ls.value;
    VecC g_new = riemannian_project(ls.theta, obj.gradient(ls.theta));
    d = conjugate_direction(ls.theta, g_new, g, d);
    theta = ls.theta;
    g = std::move(g_new);
    ++it;
  }

  res.theta = std::move(theta);
  res.objective = f;
  res.grad_norm = g.norm();
  res.iters = it;
  return res;
}

SolveResult manifold_alternate(const ChannelSet& ch, const ScenarioConfig& cfg,
                               Rng& rng) {
  cfg.validate();
  RcgSettings settings;
  settings.eps_grad = cfg.eps_inner;
  settings.max_iters = cfg.max_inner;

  SolveResult out;
  auto round_start = std::chrono::steady_clock::now();
  out.refl = ReflectionState{random_unit_phases(cfg.l_ris, rng), cfg.theta_d_rad};
  out.precoders = optimal_precoders(ch, out.refl, cfg);
  out.rates = evaluate(ch, out.refl, out.precoders, cfg);
  out.trace.rows.push_back({0, out.rates.r_dl, out.rates.r_ul, out.rates.r_wsr,
                            std::nullopt, elapsed_ms(round_start)});

  for (int s = 1; s <= cfg.max_outer; ++s) {
    round_start = std::chrono::steady_clock::now();
    const RcgResult inner = rcg_solve(ch, out.precoders, out.refl, cfg, settings);
    out.refl.theta = inner.theta;
    out.precoders = optimal_precoders(ch, out.refl, cfg);
    const double prev = out.rates.r_wsr;
    out.rates = evaluate(ch, out.refl, out.precoders, cfg);
    out.trace.rows.push_back({s, out.rates.r_dl, out.rates.r_ul, out.rates.r_wsr,
                              inner.grad_norm, elapsed_ms(round_start)});
    out.outer_iters = s;
    if (std::abs(out.rates.r_wsr - prev) <= cfg.eps_outer) break;
  }
  return out;
}

}  // namespace risfdd
