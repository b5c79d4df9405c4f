#include "risfdd/transceiver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace risfdd {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;

void check_reflection(const ChannelSet& ch, const ReflectionState& refl) {
  if (refl.theta.size() != ch.g_dl.rows())
    throw std::invalid_argument("reflection vector size does not match the channels");
}

}  // namespace

MatC effective_channel_dl(const ChannelSet& ch, const ReflectionState& refl) {
  check_reflection(ch, refl);
  return ch.h_dl.adjoint() * refl.theta.asDiagonal() * ch.g_dl;
}

MatC effective_channel_ul(const ChannelSet& ch, const ReflectionState& refl) {
  check_reflection(ch, refl);
  return std::polar(1.0, refl.theta_d_rad) *
         (ch.g_ul.adjoint() * refl.theta.asDiagonal() * ch.h_ul);
}

double achievable_rate(const MatC& h_eff, const MatC& precoder, double noise_w) {
  if (!(noise_w > 0.0)) throw std::invalid_argument("achievable_rate: noise must be positive");
  if (h_eff.cols() != precoder.rows())
    throw std::invalid_argument("achievable_rate: dimension mismatch");
  if (!h_eff.allFinite() || !precoder.allFinite())
    throw std::invalid_argument("achievable_rate: non-finite input");

  const MatC s = h_eff * precoder;  // rx x streams
  // det(I + S S^H / n) = det(I + S^H S / n); factor the smaller Gram matrix.
  MatC gram;
  if (s.cols() <= s.rows())
    gram = MatC::Identity(s.cols(), s.cols()) + s.adjoint() * s / noise_w;
  else
    gram = MatC::Identity(s.rows(), s.rows()) + s * s.adjoint() / noise_w;
  Eigen::LLT<MatC> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("achievable_rate: Gram factorization failed");
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    log_det += std::log(llt.matrixL()(i, i).real());
  const double rate = 2.0 * log_det / kLn2;
  if (!std::isfinite(rate)) throw std::runtime_error("achievable_rate: non-finite rate");
  return rate;
}

VecD water_filling(const VecD& gains, double noise_w, double budget_w) {
  const Eigen::Index n = gains.size();
  if (n == 0) throw std::invalid_argument("water_filling: empty gain vector");
  if (!(noise_w > 0.0)) throw std::invalid_argument("water_filling: noise must be positive");
  if (!(budget_w > 0.0)) throw std::invalid_argument("water_filling: budget must be positive");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(gains(i) >= 0.0))
      throw std::invalid_argument("water_filling: gains must be nonnegative");
  if (gains.maxCoeff() <= 0.0)
    throw std::invalid_argument("water_filling: all gains are zero (degenerate channel)");

  // Stream i turns on once the water level exceeds noise/gain_i. Sort the
  // thresholds and take the largest prefix whose implied level covers it.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto threshold = [&](Eigen::Index i) {
    return gains(i) > 0.0 ? noise_w / gains(i)
                          : std::numeric_limits<double>::infinity();
  };
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return threshold(a) < threshold(b); });

  double prefix = 0.0;
  double level = 0.0;
  Eigen::Index active = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = threshold(order[k]);
    if (!std::isfinite(t)) break;
    const double candidate = (budget_w + prefix + t) / static_cast<double>(k + 1);
    if (candidate > t) {
      prefix += t;
      level = candidate;
      active = k + 1;
    } else {
      break;  // level would sink below this threshold; later ones only grow
    }
  }

  VecD p = VecD::Zero(n);
  for (Eigen::Index k = 0; k < active; ++k)
    p(order[k]) = level - threshold(order[k]);
  return p;
}

MatC optimal_precoder(const MatC& h_eff, double noise_w, double budget_w,
                      int n_streams) {
  if (n_streams < 1) throw std::invalid_argument("optimal_precoder: n_streams must be >= 1");
  if (n_streams > std::min(h_eff.rows(), h_eff.cols()))
    throw std::invalid_argument("optimal_precoder: n_streams exceeds min(channel dims)");
  if (!h_eff.allFinite())
    throw std::invalid_argument("optimal_precoder: non-finite channel");

  Eigen::JacobiSVD<MatC> svd(h_eff, Eigen::ComputeThinV);
  MatC v = svd.matrixV().leftCols(n_streams);
  VecD gains(n_streams);
  for (int i = 0; i < n_streams; ++i) {
    const double s = svd.singularValues()(i);
    gains(i) = s * s;
  }

  // Pin the per-column phase ambiguity of the singular basis.
  for (int j = 0; j < n_streams; ++j) {
    Eigen::Index idx = 0;
    v.col(j).cwiseAbs().maxCoeff(&idx);
    const Cplx pivot = v(idx, j);
    if (std::abs(pivot) > 0.0) v.col(j) *= std::conj(pivot) / std::abs(pivot);
  }

  const VecD p = water_filling(gains, noise_w, budget_w);
  return v * p.cwiseSqrt().asDiagonal();
}

PrecoderPair optimal_precoders(const ChannelSet& ch, const ReflectionState& refl,
                               const ScenarioConfig& cfg) {
  PrecoderPair out;
  out.f_dl = optimal_precoder(effective_channel_dl(ch, refl), cfg.noise_dl_w(),
                              cfg.p_dl_max_w(), cfg.n_streams_dl);
  out.f_ul = optimal_precoder(effective_channel_ul(ch, refl), cfg.noise_ul_w(),
                              cfg.p_ul_max_w(), cfg.n_streams_ul);
  return out;
}

RatePair evaluate(const ChannelSet& ch, const ReflectionState& refl,
                  const PrecoderPair& precoders, const ScenarioConfig& cfg) {
  RatePair r;
  r.r_dl = achievable_rate(effective_channel_dl(ch, refl), precoders.f_dl,
                           cfg.noise_dl_w());
  r.r_ul = achievable_rate(effective_channel_ul(ch, refl), precoders.f_ul,
                           cfg.noise_ul_w());
  r.r_wsr = cfg.eta * r.r_dl + (1.0 - cfg.eta) * r.r_ul;
  return r;
}

VecC random_unit_phases(int l, Rng& rng) {
  if (l < 1) throw std::invalid_argument("random_unit_phases: l must be >= 1");
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  VecC theta(l);
  for (int i = 0; i < l; ++i) theta(i) = std::polar(1.0, phase(rng));
  return theta;
}

}  // namespace risfdd
