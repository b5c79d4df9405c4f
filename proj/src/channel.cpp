#include "risfdd/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace risfdd {

double path_loss_db(double distance_m, double freq_hz) {
  if (!(distance_m >= 1.0))
    throw std::invalid_argument("path_loss_db: distance below the 1 m reference");
  if (!(freq_hz > 0.0))
    throw std::invalid_argument("path_loss_db: frequency must be positive");
  return 28.0 + 22.0 * std::log10(distance_m) + 20.0 * std::log10(freq_hz / 1e9);
}

VecC ula_response(int n, double spacing_m, double freq_hz, double angle_rad) {
  if (n < 1) throw std::invalid_argument("ula_response: n must be >= 1");
  const double omega =
      2.0 * kPi * freq_hz * spacing_m * std::sin(angle_rad) / kSpeedOfLight;
  VecC v(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) v(i) = std::polar(scale, omega * i);
  return v;
}

VecC upa_response(int l_h, int l_v, double spacing_h_m, double spacing_v_m,
                  double freq_hz, double azimuth_rad, double elevation_rad) {
  if (l_h < 1 || l_v < 1)
    throw std::invalid_argument("upa_response: grid sizes must be >= 1");
  // Vertical spatial frequency depends on elevation only; the horizontal one
  // sees the azimuth through the elevation cosine.
  const double gamma = 2.0 * kPi * freq_hz * spacing_v_m *
                       std::sin(elevation_rad) / kSpeedOfLight;
  const double delta = 2.0 * kPi * freq_hz * spacing_h_m *
                       std::cos(elevation_rad) * std::sin(azimuth_rad) /
                       kSpeedOfLight;
  const double scale = 1.0 / std::sqrt(static_cast<double>(l_h * l_v));
  VecC v(l_h * l_v);
  for (int iv = 0; iv < l_v; ++iv)
    for (int ih = 0; ih < l_h; ++ih)
      v(iv * l_h + ih) = std::polar(scale, gamma * iv + delta * ih);
  return v;
}

MatC draw_channel(Rng& rng, int n_rx, int n_tx, int n_paths, double gain_variance,
                  const SteeringSampler& rx_steering,
                  const SteeringSampler& tx_steering) {
  if (n_rx < 1 || n_tx < 1) throw std::invalid_argument("draw_channel: bad dimensions");
  if (n_paths < 1) throw std::invalid_argument("draw_channel: n_paths must be >= 1");
  if (!(gain_variance >= 0.0))
    throw std::invalid_argument("draw_channel: negative gain variance");

  std::normal_distribution<double> gauss(0.0, std::sqrt(gain_variance / 2.0));
  MatC h = MatC::Zero(n_rx, n_tx);
  for (int m = 0; m < n_paths; ++m) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    const VecC a_rx = rx_steering(rng);
    const VecC a_tx = tx_steering(rng);
    if (a_rx.size() != n_rx || a_tx.size() != n_tx)
      throw std::invalid_argument("draw_channel: steering size mismatch");
    h.noalias() += Cplx(re, im) * (a_rx * a_tx.adjoint());
  }
  h *= std::sqrt(static_cast<double>(n_rx) * n_tx / n_paths);
  return h;
}

namespace {

SteeringSampler ula_sampler(int n, double spacing, double freq) {
  return [n, spacing, freq](Rng& rng) {
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    return ula_response(n, spacing, freq, angle(rng));
  };
}

SteeringSampler upa_sampler(int l_h, int l_v, double spacing, double freq) {
  return [l_h, l_v, spacing, freq](Rng& rng) {
    std::uniform_real_distribution<double> angle(-kPi / 2.0, kPi / 2.0);
    const double azimuth = angle(rng);
    const double elevation = angle(rng);
    return upa_response(l_h, l_v, spacing, spacing, freq, azimuth, elevation);
  };
}

}  // namespace

ChannelSet realize_channels(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const LinkDistances d = link_distances(cfg);
  const double s = cfg.antenna_spacing_m;

  const auto variance = [](double pl_db) { return std::pow(10.0, -pl_db / 10.0); };
  const double var_g_dl = variance(path_loss_db(d.bs_ris_m, cfg.f_dl_hz));
  const double var_g_ul = variance(path_loss_db(d.bs_ris_m, cfg.f_ul_hz));
  const double var_h_dl = variance(path_loss_db(d.ris_ue_m, cfg.f_dl_hz));
  const double var_h_ul = variance(path_loss_db(d.ris_ue_m, cfg.f_ul_hz));

  ChannelSet ch;
  {
    Rng rng = make_substream(seed, kStreamGDl);
    ch.g_dl = draw_channel(rng, cfg.l_ris, cfg.n_bs, cfg.n_paths_g_dl, var_g_dl,
                           upa_sampler(cfg.l_h, cfg.l_v, s, cfg.f_dl_hz),
                           ula_sampler(cfg.n_bs, s, cfg.f_dl_hz));
  }
  {
    Rng rng = make_substream(seed, kStreamHDl);
    ch.h_dl = draw_channel(rng, cfg.l_ris, cfg.k_ue, cfg.n_paths_h_dl, var_h_dl,
                           upa_sampler(cfg.l_h, cfg.l_v, s, cfg.f_dl_hz),
                           ula_sampler(cfg.k_ue, s, cfg.f_dl_hz));
  }
  {
    Rng rng = make_substream(seed, kStreamGUl);
    ch.g_ul = draw_channel(rng, cfg.l_ris, cfg.n_bs, cfg.n_paths_g_ul, var_g_ul,
                           upa_sampler(cfg.l_h, cfg.l_v, s, cfg.f_ul_hz),
                           ula_sampler(cfg.n_bs, s, cfg.f_ul_hz));
  }
  {
    Rng rng = make_substream(seed, kStreamHUl);
    ch.h_ul = draw_channel(rng, cfg.l_ris, cfg.k_ue, cfg.n_paths_h_ul, var_h_ul,
                           upa_sampler(cfg.l_h, cfg.l_v, s, cfg.f_ul_hz),
                           ula_sampler(cfg.k_ue, s, cfg.f_ul_hz));
  }
  return ch;
}

}  // namespace risfdd
