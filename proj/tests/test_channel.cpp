#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "risfdd/channel.hpp"
#include "risfdd/channel_io.hpp"

using namespace risfdd;

TEST_CASE("path loss pinned values") {
  CHECK(path_loss_db(1.0, 1e9) == doctest::Approx(28.0).epsilon(1e-15));
  // Frozen against independent evaluations of 28 + 22 log10(d) + 20 log10(f/1GHz).
  CHECK(path_loss_db(750.0167, 2.135e9) ==
        doctest::Approx(97.83951812585991).epsilon(1e-14));
  CHECK(path_loss_db(50.2494, 1.945e9) ==
        doctest::Approx(71.20327148326243).epsilon(1e-14));
  CHECK_THROWS_AS(path_loss_db(0.5, 1e9), std::invalid_argument);
  CHECK_THROWS_AS(path_loss_db(10.0, 0.0), std::invalid_argument);
}

TEST_CASE("ula response") {
  const double c = kSpeedOfLight;
  SUBCASE("broadside gives constant entries") {
    const VecC v = ula_response(5, 0.07, 2e9, 0.0);
    for (Eigen::Index i = 0; i < 5; ++i)
      CHECK(std::abs(v[i] - Cplx(1.0 / std::sqrt(5.0), 0.0)) < 1e-15);
  }
  SUBCASE("endfire at half-wavelength spacing alternates sign") {
    const double f = 2e9;
    const VecC v = ula_response(2, c / (2.0 * f), f, kPi / 2.0);
    CHECK(std::abs(v[0] - Cplx(1.0, 0.0) / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(v[1] + Cplx(1.0, 0.0) / std::sqrt(2.0)) < 1e-12);
  }
  SUBCASE("matches the elementwise exponential formula") {
    const double f = 2e9, spacing = c / (2.0 * f), angle = kPi / 6.0;
    const VecC v = ula_response(4, spacing, f, angle);
    const double omega = 2.0 * kPi * f * spacing * std::sin(angle) / c;
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(v[i] - std::polar(0.5, omega * i)) < 1e-14);
  }
  SUBCASE("unit norm for arbitrary parameters") {
    std::mt19937_64 rng = oracle::test_rng(11);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    for (int t = 0; t < 50; ++t) {
      const VecC v = ula_response(1 + (t % 9), 0.03 + 0.01 * (t % 5), 1e9 + 1e8 * t,
                                  ang(rng));
      CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    }
  }
  SUBCASE("spatial frequency scales with the carrier") {
    const double s = 0.077, a = 0.4;
    const VecC vd = ula_response(3, s, 2.135e9, a);
    const VecC vu = ula_response(3, s, 1.945e9, a);
    const double wd = std::arg(vd[1] / vd[0]);
    const double wu = std::arg(vu[1] / vu[0]);
    CHECK(wd / wu == doctest::Approx(2.135e9 / 1.945e9).epsilon(1e-12));
  }
}

TEST_CASE("upa response") {
  SUBCASE("boresight gives constant entries") {
    const VecC v = upa_response(3, 2, 0.07, 0.07, 2e9, 0.0, 0.0);
    for (Eigen::Index i = 0; i < 6; ++i)
      CHECK(std::abs(v[i] - Cplx(1.0 / std::sqrt(6.0), 0.0)) < 1e-15);
  }
  SUBCASE("single row reduces to the horizontal line array") {
    const double f = 1.9e9, s = 0.08, az = 0.7, el = -0.3;
    const VecC planar = upa_response(4, 1, s, 0.05, f, az, el);
    // Horizontal spatial frequency carries the cos(elevation) projection.
    const double delta = 2.0 * kPi * f * s * std::cos(el) * std::sin(az) / kSpeedOfLight;
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(planar[i] - std::polar(0.5, delta * i)) < 1e-14);
  }
  SUBCASE("matches the explicit Kronecker product") {
    const double f = 2e9, s = kSpeedOfLight / (2.0 * f);
    const double az = kPi / 4.0, el = kPi / 6.0;
    const VecC v = upa_response(2, 2, s, s, f, az, el);
    const double gamma = 2.0 * kPi * f * s * std::sin(el) / kSpeedOfLight;
    const double delta =
        2.0 * kPi * f * s * std::cos(el) * std::sin(az) / kSpeedOfLight;
    for (int iv = 0; iv < 2; ++iv)
      for (int ih = 0; ih < 2; ++ih)
        CHECK(std::abs(v[iv * 2 + ih] - std::polar(0.5, gamma * iv + delta * ih)) <
              1e-14);
  }
  SUBCASE("vertical-major ordering against an indexed double loop") {
    const double f = 2.4e9, sh = 0.05, sv = 0.06, az = 0.9, el = 0.2;
    const int lh = 4, lv = 3;
    const VecC v = upa_response(lh, lv, sh, sv, f, az, el);
    const double gamma = 2.0 * kPi * f * sv * std::sin(el) / kSpeedOfLight;
    const double delta =
        2.0 * kPi * f * sh * std::cos(el) * std::sin(az) / kSpeedOfLight;
    const double scale = 1.0 / std::sqrt(double(lh * lv));
    for (int iv = 0; iv < lv; ++iv)
      for (int ih = 0; ih < lh; ++ih)
        CHECK(std::abs(v[iv * lh + ih] -
                       std::polar(scale, gamma * iv + delta * ih)) < 1e-13);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("draw_channel structure") {
  SUBCASE("constant steering makes every entry the path gain") {
    Rng rng = make_substream(3, 9);
    const int n_rx = 3, n_tx = 4;
    const auto const_rx = [&](Rng&) {
      return VecC::Constant(n_rx, Cplx(1.0 / std::sqrt(double(n_rx)), 0.0)).eval();
    };
    const auto const_tx = [&](Rng&) {
      return VecC::Constant(n_tx, Cplx(1.0 / std::sqrt(double(n_tx)), 0.0)).eval();
    };
    const MatC h = draw_channel(rng, n_rx, n_tx, 1, 1.0, const_rx, const_tx);
    // sqrt(n_rx n_tx / 1) * alpha * (1/sqrt(n_rx n_tx)) * ones = alpha * ones.
    for (Eigen::Index r = 0; r < n_rx; ++r)
      for (Eigen::Index c = 0; c < n_tx; ++c)
        CHECK(std::abs(h(r, c) - h(0, 0)) < 1e-15);
    CHECK(h.norm() ==
          doctest::Approx(std::abs(h(0, 0)) * std::sqrt(double(n_rx * n_tx)))
              .epsilon(1e-12));
  }
  SUBCASE("rank bounded by the path count") {
    Rng rng = make_substream(4, 2);
    std::mt19937_64 trng = oracle::test_rng(21);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    const auto rx = [&](Rng& r) {
      std::uniform_real_distribution<double> u(-kPi, kPi);
      return ula_response(6, 0.07, 2e9, u(r));
    };
    const auto tx = [&](Rng& r) {
      std::uniform_real_distribution<double> u(-kPi, kPi);
      return ula_response(5, 0.07, 2e9, u(r));
    };
    const MatC h = draw_channel(rng, 6, 5, 2, 1.0, rx, tx);
    Eigen::JacobiSVD<MatC> svd(h);
    CHECK(svd.singularValues()[2] < 1e-12 * svd.singularValues()[0]);
    (void)trng;
    (void)ang;
  }
  SUBCASE("empirical Frobenius power matches the variance scaling") {
    Rng rng = make_substream(7, 5);
    const double variance = 0.7;
    const int n_rx = 2, n_tx = 3, n_paths = 3, draws = 10000;
    const auto rx = [&](Rng& r) {
      std::uniform_real_distribution<double> u(-kPi, kPi);
      return ula_response(n_rx, 0.077, 2.135e9, u(r));
    };
    const auto tx = [&](Rng& r) {
      std::uniform_real_distribution<double> u(-kPi, kPi);
      return ula_response(n_tx, 0.077, 2.135e9, u(r));
    };
    double acc = 0.0;
    for (int d = 0; d < draws; ++d)
      acc += draw_channel(rng, n_rx, n_tx, n_paths, variance, rx, tx).squaredNorm();
    const double expected = n_rx * n_tx * variance;
    CHECK(std::abs(acc / draws - expected) < 0.05 * expected);
  }
  SUBCASE("input validation") {
    Rng rng = make_substream(0, 0);
    const auto s = [](Rng&) { return VecC::Ones(2).eval(); };
    CHECK_THROWS_AS(draw_channel(rng, 2, 2, 0, 1.0, s, s), std::invalid_argument);
    CHECK_THROWS_AS(draw_channel(rng, 2, 2, 1, -1.0, s, s), std::invalid_argument);
    CHECK_THROWS_AS(draw_channel(rng, 3, 2, 1, 1.0, s, s), std::invalid_argument);
  }
}

namespace {

ScenarioConfig tiny_scenario() {
  ScenarioConfig cfg = default_scenario();
  cfg.n_bs = 2;
  cfg.k_ue = 2;
  cfg.l_ris = 4;
  cfg.l_h = 2;
  cfg.l_v = 2;
  cfg.n_streams_dl = 2;
  cfg.n_streams_ul = 2;
  cfg.n_paths_g_dl = 1;
  cfg.n_paths_g_ul = 1;
  cfg.n_paths_h_dl = 1;
  cfg.n_paths_h_ul = 1;
  cfg.validate();
  return cfg;
}

}  // namespace

TEST_CASE("realize_channels shapes and determinism") {
  const ScenarioConfig cfg = tiny_scenario();
  const ChannelSet a = realize_channels(cfg, 123);
  const ChannelSet b = realize_channels(cfg, 123);
  CHECK(a.g_dl.rows() == 4);
  CHECK(a.g_dl.cols() == 2);
  CHECK(a.h_dl.rows() == 4);
  CHECK(a.h_dl.cols() == 2);
  CHECK(a.g_ul.rows() == 4);
  CHECK(a.h_ul.cols() == 2);
  CHECK(a.g_dl == b.g_dl);
  CHECK(a.h_dl == b.h_dl);
  CHECK(a.g_ul == b.g_ul);
  CHECK(a.h_ul == b.h_ul);
  const ChannelSet c = realize_channels(cfg, 124);
  CHECK(a.g_dl != c.g_dl);
}

TEST_CASE("realize_channels substream isolation") {
  ScenarioConfig cfg = tiny_scenario();
  cfg.n_paths_g_dl = 3;
  const ChannelSet base = realize_channels(cfg, 5);
  cfg.n_paths_g_dl = 1;  // consume fewer draws on the g_dl stream only
  const ChannelSet fewer = realize_channels(cfg, 5);
  CHECK(base.g_dl != fewer.g_dl);
  CHECK(base.h_dl == fewer.h_dl);
  CHECK(base.g_ul == fewer.g_ul);
  CHECK(base.h_ul == fewer.h_ul);
}

TEST_CASE("realize_channels entry correlation across links is negligible") {
  const ScenarioConfig cfg = tiny_scenario();
  const int draws = 10000;
  Eigen::VectorXd x(draws), y(draws), z(draws), w(draws);
  for (int d = 0; d < draws; ++d) {
    const ChannelSet ch = realize_channels(cfg, 1000 + d);
    x[d] = ch.g_dl(0, 0).real();
    y[d] = ch.g_ul(0, 0).real();
    z[d] = ch.h_dl(0, 0).real();
    w[d] = ch.h_ul(0, 0).real();
  }
  const auto corr = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ac = a.array() - a.mean();
    const Eigen::VectorXd bc = b.array() - b.mean();
    return std::abs(ac.dot(bc) / (ac.norm() * bc.norm()));
  };
  CHECK(corr(x, y) < 0.05);
  CHECK(corr(x, z) < 0.05);
  CHECK(corr(x, w) < 0.05);
  CHECK(corr(z, w) < 0.05);
}

TEST_CASE("realize_channels applies the segment path loss as variance") {
  // With one path and constant-angle steering impossible to force, check the
  // average power against the expected 10^(-PL/10) variance statistically.
  ScenarioConfig cfg = tiny_scenario();
  cfg.pos_bs = {0.0, 0.0};
  cfg.pos_ris = {10.0, 0.0};
  cfg.pos_ue = {20.0, 0.0};
  const LinkDistances dist = link_distances(cfg);
  const double var_g_dl =
      std::pow(10.0, -path_loss_db(dist.bs_ris_m, cfg.f_dl_hz) / 10.0);
  const int draws = 4000;
  double acc = 0.0;
  for (int d = 0; d < draws; ++d)
    acc += realize_channels(cfg, 77000 + d).g_dl.squaredNorm();
  const double expected = cfg.l_ris * cfg.n_bs * var_g_dl;
  CHECK(std::abs(acc / draws - expected) < 0.08 * expected);
}

TEST_CASE("channel dump round trip") {
  const ScenarioConfig cfg = tiny_scenario();
  const ChannelSet ch = realize_channels(cfg, 99);
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() / "risfdd_test_dump.bin";
  save_channels(path, ch, 99);
  const ChannelDump dump = load_channels(path);
  CHECK(dump.seed == 99);
  CHECK(dump.channels.g_dl == ch.g_dl);
  CHECK(dump.channels.h_dl == ch.h_dl);
  CHECK(dump.channels.g_ul == ch.g_ul);
  CHECK(dump.channels.h_ul == ch.h_ul);
  std::filesystem::remove(path);
}

TEST_CASE("channel dump rejects malformed files") {
  const ScenarioConfig cfg = tiny_scenario();
  const ChannelSet ch = realize_channels(cfg, 1);
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const fs::path good = dir / "risfdd_dump_good.bin";
  save_channels(good, ch, 1);

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_channels(dir / "risfdd_dump_missing.bin"),
                    std::runtime_error);
  }
  SUBCASE("bad magic") {
    const fs::path p = dir / "risfdd_dump_magic.bin";
    std::ofstream(p, std::ios::binary) << "XXXXYYYYZZZZ";
    CHECK_THROWS_AS(load_channels(p), std::runtime_error);
    fs::remove(p);
  }
  SUBCASE("unsupported version") {
    const fs::path p = dir / "risfdd_dump_version.bin";
    fs::copy_file(good, p, fs::copy_options::overwrite_existing);
    std::fstream f(p, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const std::uint32_t bad = 999;
    f.write(reinterpret_cast<const char*>(&bad), sizeof(bad));
    f.close();
    CHECK_THROWS_AS(load_channels(p), std::runtime_error);
    fs::remove(p);
  }
  SUBCASE("truncated payload") {
    const fs::path p = dir / "risfdd_dump_trunc.bin";
    fs::copy_file(good, p, fs::copy_options::overwrite_existing);
    fs::resize_file(p, fs::file_size(p) - 9);
    CHECK_THROWS_AS(load_channels(p), std::runtime_error);
    fs::remove(p);
  }
  SUBCASE("trailing bytes") {
    const fs::path p = dir / "risfdd_dump_trail.bin";
    fs::copy_file(good, p, fs::copy_options::overwrite_existing);
    std::ofstream(p, std::ios::binary | std::ios::app) << "extra";
    CHECK_THROWS_AS(load_channels(p), std::runtime_error);
    fs::remove(p);
  }
  SUBCASE("inconsistent matrices rejected on save") {
    ChannelSet bad = ch;
    bad.h_ul = MatC::Zero(bad.h_ul.rows() + 1, bad.h_ul.cols());
    CHECK_THROWS_AS(save_channels(dir / "risfdd_dump_bad.bin", bad, 0),
                    std::invalid_argument);
  }
  fs::remove(good);
}
