#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "isac/oracles.hpp"
#include "isac/sensing.hpp"
#include "support.hpp"

using namespace isac;

namespace {

struct Echo {
  ComplexGrid s_r;
  TimeSeries y;
};

Echo ones_echo(const FrameConfig& cfg, const Target& t) {
  ComplexGrid s_r(cfg.m_sym, cfg.n_c, GridRole::sensing);
  for (auto& v : s_r.data()) v = 1.0;
  const auto x = synthesize(s_r, cfg, true, Normalization::raw);
  return {s_r, simulate_echo(x, cfg, t, 0.0, 0, false)};
}

std::pair<std::size_t, std::size_t> argmax(const Periodogram& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.e.size(); ++i) {
    if (std::norm(p.e[i]) > std::norm(p.e[best])) best = i;
  }
  return {best / p.e.cols(), best % p.e.cols()};
}

}  // namespace

TEST_SUITE("sensing") {
  TEST_CASE("echo at zero range and speed is the input") {
    const FrameConfig cfg = default_frame();
    const auto x = synthesize(test::random_qpsk(cfg.m_sym, cfg.n_c, 1), cfg, true, Normalization::raw);
    const auto y = simulate_echo(x, cfg, {0.0, 0.0}, 1.0, 0, false);
    CHECK(y.samples == x.samples);
  }

  TEST_CASE("one sample of range delays by one sample") {
    const FrameConfig cfg = default_frame();
    const auto x = synthesize(test::random_qpsk(cfg.m_sym, cfg.n_c, 2), cfg, true, Normalization::raw);
    const double d = kSpeedOfLight * cfg.sample_period() / 2.0;
    CHECK(echo_delay_samples(d, cfg) == 1);
    CHECK(echo_delay_samples(20 * cfg.distance_per_bin(), cfg) == 20);
    const auto y = simulate_echo(x, cfg, {d, 0.0}, 1.0, 0, false);
    CHECK(y.samples[0] == cplx{});
    for (std::size_t n = 1; n < 300; ++n) CHECK(y.samples[n] == x.samples[n - 1]);
  }

  TEST_CASE("Doppler ramp matches the per-sample phase") {
    const FrameConfig cfg = default_frame();
    const auto x = synthesize(test::random_qpsk(cfg.m_sym, cfg.n_c, 3), cfg, true, Normalization::raw);
    const double u = cfg.speed_per_bin();
    const auto y = simulate_echo(x, cfg, {0.0, u}, 1.0, 0, false);
    for (std::size_t n : {0UL, 7UL, 160UL, 2000UL, 5119UL}) {
      const cplx ref = x.samples[n] * std::polar(1.0, 2 * std::numbers::pi * n * 2 * u * cfg.f_c *
                                                           cfg.sample_period() / kSpeedOfLight);
      CHECK(std::abs(y.samples[n] - ref) < 1e-9);
    }
  }

  TEST_CASE("echo rejects targets outside the frame") {
    const FrameConfig cfg = default_frame();
    const auto x = synthesize(test::random_qpsk(cfg.m_sym, cfg.n_c, 3), cfg, true, Normalization::raw);
    CHECK_THROWS_AS(simulate_echo(x, cfg, {160.0, 0.0}, 1.0, 0), ScopeError);
    CHECK_THROWS_AS(simulate_echo(x, cfg, {10.0, 61.0}, 1.0, 0), ScopeError);
    const auto no_cp = synthesize(test::random_qpsk(cfg.m_sym, cfg.n_c, 3), cfg, false, Normalization::raw);
    CHECK_THROWS(simulate_echo(no_cp, cfg, {10.0, 1.0}, 1.0, 0));
  }

  TEST_CASE("echo noise is seeded") {
    const FrameConfig cfg = default_frame();
    const auto x = synthesize(test::random_qpsk(cfg.m_sym, cfg.n_c, 3), cfg, true, Normalization::raw);
    const auto a = simulate_echo(x, cfg, {10.0, 1.0}, 2.0, 9);
    CHECK(a.samples == simulate_echo(x, cfg, {10.0, 1.0}, 2.0, 9).samples);
    const auto clean = simulate_echo(x, cfg, {10.0, 1.0}, 2.0, 9, false);
    double var = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) var += std::norm(a.samples[i] - clean.samples[i]);
    CHECK(var / a.samples.size() == doctest::Approx(2.0).epsilon(0.05));
  }

  TEST_CASE("periodogram peaks at the target bin") {
    const FrameConfig cfg = default_frame();
    const auto [s0, y0] = ones_echo(cfg, {0.0, 0.0});
    CHECK(argmax(periodogram(s0, y0, cfg)) == std::pair<std::size_t, std::size_t>{0, 0});

    const Target t{20 * cfg.distance_per_bin(), test::integer_bin_speed(cfg, 4)};
    const auto [s1, y1] = ones_echo(cfg, t);
    CHECK(argmax(periodogram(s1, y1, cfg)) == std::pair<std::size_t, std::size_t>{4, 20});

    // QPSK sensing symbols: the same bin wins.
    const auto q = test::random_qpsk(cfg.m_sym, cfg.n_c, 7);
    const auto yq = simulate_echo(synthesize(q, cfg, true, Normalization::raw), cfg, t, 0.0, 0, false);
    CHECK(argmax(periodogram(q, yq, cfg)) == std::pair<std::size_t, std::size_t>{4, 20});
  }

  TEST_CASE("one extra sample of delay moves the peak one delay bin") {
    const FrameConfig cfg = default_frame();
    for (std::size_t mu : {3UL, 11UL}) {
      const auto [s, y] = ones_echo(cfg, {mu * cfg.distance_per_bin(), 0.0});
      const auto [s2, y2] = ones_echo(cfg, {(mu + 1) * cfg.distance_per_bin(), 0.0});
      CHECK(argmax(periodogram(s2, y2, cfg)).second == argmax(periodogram(s, y, cfg)).second + 1);
    }
  }

  TEST_CASE("zero echo and linearity") {
    const FrameConfig cfg = make_config(240e9, 240e3, 32, 8, 1.0368e-6 * 32 / 128);
    const auto s = test::random_qpsk(8, 32, 1);
    auto x = synthesize(s, cfg, true, Normalization::raw);
    TimeSeries zero = x;
    std::fill(zero.samples.begin(), zero.samples.end(), cplx{});
    const auto pz = periodogram(s, zero, cfg);
    for (const auto& v : pz.e.data()) CHECK(v == cplx{});

    const auto y1 = simulate_echo(x, cfg, {5.0, 3.0}, 1.0, 1);
    const auto y2 = simulate_echo(x, cfg, {0.0, -7.0}, 1.0, 2);
    TimeSeries sum = y1;
    for (std::size_t i = 0; i < sum.samples.size(); ++i) sum.samples[i] = 2.0 * y1.samples[i] + y2.samples[i];
    const auto e1 = periodogram(s, y1, cfg).e;
    const auto e2 = periodogram(s, y2, cfg).e;
    const auto es = periodogram(s, sum, cfg).e;
    for (std::size_t i = 0; i < es.size(); ++i) CHECK(std::abs(es[i] - (2.0 * e1[i] + e2[i])) < 1e-9);
  }

  TEST_CASE("cfar floor") {
    Periodogram flat{ComplexGrid(32, 64), PowerGrid(32, 64)};
    for (auto& v : flat.e.data()) v = cplx(0.0, 2.0);
    const auto tf = cfar_threshold(flat);
    for (double t : tf.data()) CHECK(t == doctest::Approx(4.0));

    Periodogram spike{ComplexGrid(32, 64), PowerGrid(32, 64)};
    spike.e(10, 20) = 5.0;
    const auto th = cfar_threshold(spike);
    CHECK(th(10, 20) == 0.0);
    CHECK(th(10, 20 + 3) > 0.0);
    CHECK(th(10 - 5, 20) > 0.0);

    Periodogram rnd{test::random_complex(32, 64, 4), PowerGrid(32, 64)};
    std::vector<double> pw(32 * 64);
    for (std::size_t i = 0; i < pw.size(); ++i) pw[i] = std::norm(rnd.e[i]);
    const auto ref = oracle::annulus_mean(pw, 32, 64, {});
    const auto got = cfar_threshold(rnd);
    for (std::size_t i : {0UL, 100UL, 777UL, 1500UL, 2047UL}) CHECK(std::abs(got[i] - ref[i]) < 1e-12);

    Periodogram small{ComplexGrid(8, 64), PowerGrid(8, 64)};
    CHECK_THROWS_AS(cfar_threshold(small), InvalidConfig);
  }

  TEST_CASE("bin mapping") {
    const FrameConfig cfg = default_frame();
    CHECK(bin_distance(20, cfg) == doctest::Approx(97.65625).epsilon(1e-12));
    CHECK(bin_speed(0, cfg) == 0.0);
    CHECK(bin_speed(16, cfg) == doctest::Approx(16 * cfg.speed_per_bin()));
    CHECK(bin_speed(17, cfg) == doctest::Approx(-15 * cfg.speed_per_bin()));
    CHECK(bin_speed(31, cfg) == doctest::Approx(-kSpeedOfLight / (2 * 32 * cfg.f_c * cfg.t_o())));
  }

  TEST_CASE("noiseless single target detected once") {
    const FrameConfig cfg = default_frame();
    const Target t{20 * cfg.distance_per_bin(), test::integer_bin_speed(cfg, 4)};
    const auto [s, y] = ones_echo(cfg, t);
    auto pg = periodogram(s, y, cfg);
    pg.theta = cfar_threshold(pg);
    const auto dets = detect_and_localize(pg, pg.theta, 10.0, cfg);
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].nu == 4);
    CHECK(dets[0].mu == 20);
    CHECK(dets[0].distance == doctest::Approx(97.66).epsilon(1e-4));
    CHECK(dets[0].speed == doctest::Approx(4 * cfg.speed_per_bin()));

    CHECK(detect_and_localize(pg, pg.theta, 1e300, cfg).empty());
    std::ostringstream os;
    write_detections_csv(os, dets);
    CHECK(os.str().rfind("nu,mu,d_m,u_mps,statistic\n4,20,97.656250,", 0) == 0);
  }
}
