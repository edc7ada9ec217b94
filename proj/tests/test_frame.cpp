#include <cmath>

#include "doctest.h"
#include "isac/frame.hpp"
#include "support.hpp"

using namespace isac;

TEST_SUITE("frame") {
  TEST_CASE("table configuration derived quantities") {
    const FrameConfig cfg = default_frame();
    CHECK(cfg.t() == doctest::Approx(4.1667e-6).epsilon(1e-4));
    CHECK(cfg.t_o() == doctest::Approx(cfg.t() + 1.0368e-6).epsilon(1e-15));
    CHECK(cfg.max_distance() == doctest::Approx(155.52).epsilon(1e-6));
    CHECK(cfg.max_speed() == doctest::Approx(60.05).epsilon(1e-3));
    CHECK(cfg.cp_samples() == 32);
    CHECK(cfg.distance_per_bin() == doctest::Approx(4.8828125).epsilon(1e-12));
  }

  TEST_CASE("make_config rejects bad numerology") {
    CHECK_THROWS_AS(make_config(0.0, 240e3, 128, 32, 0.0), InvalidConfig);
    CHECK_THROWS_AS(make_config(240e9, -1.0, 128, 32, 0.0), InvalidConfig);
    CHECK_THROWS_AS(make_config(240e9, 240e3, 1, 32, 0.0), InvalidConfig);
    CHECK_THROWS_AS(make_config(240e9, 240e3, 128, 0, 0.0), InvalidConfig);
    CHECK_THROWS_AS(make_config(240e9, 240e3, 128, 32, -1e-6), InvalidConfig);
  }

  TEST_CASE("split_grid selects and conserves") {
    ComplexGrid s(2, 2);
    s(0, 0) = 1.0;
    s(0, 1) = cplx(0.0, 1.0);
    s(1, 0) = -1.0;
    s(1, 1) = 2.0;
    IndicatorGrid u(2, 2);
    u(0, 0) = 1;
    u(1, 1) = 1;
    const auto [s_r, s_c] = split_grid(s, u);
    CHECK(s_r(0, 0) == cplx(1.0));
    CHECK(s_r(0, 1) == cplx(0.0));
    CHECK(s_r(1, 0) == cplx(0.0));
    CHECK(s_r(1, 1) == cplx(2.0));
    for (std::size_t i = 0; i < 4; ++i) CHECK(s_r[i] + s_c[i] == s[i]);

    const auto [all_r, none_c] = split_grid(s, IndicatorGrid(2, 2, 1));
    CHECK(all_r.data()[1] == s.data()[1]);
    CHECK(none_c[3] == cplx(0.0));
    CHECK_THROWS_AS(split_grid(s, IndicatorGrid(2, 3)), DimensionMismatch);
  }

  TEST_CASE("synthesize DC tone and normalization") {
    const FrameConfig cfg = make_config(240e9, 240e3, 16, 1, 0.0);
    ComplexGrid s(1, 16);
    s(0, 0) = 1.0;
    const auto raw = synthesize(s, cfg, false, Normalization::raw);
    REQUIRE(raw.samples.size() == 16);
    for (const auto& v : raw.samples) CHECK(std::abs(v - cplx(1.0)) < 1e-15);
    const auto unit = synthesize(s, cfg, false, Normalization::unit);
    for (const auto& v : unit.samples) CHECK(std::abs(v - cplx(0.25)) < 1e-15);
  }

  TEST_CASE("synthesize matches the direct IDFT sum and prefixes the tail") {
    const FrameConfig cfg = default_frame();
    const auto s = test::random_qpsk(cfg.m_sym, cfg.n_c, 3);
    const auto x = synthesize(s, cfg, true, Normalization::raw);
    const std::size_t len = cfg.n_c + cfg.cp_samples();
    REQUIRE(x.samples.size() == cfg.m_sym * len);
    for (std::size_t m : {0UL, 17UL, 31UL}) {
      const cplx* sym = x.samples.data() + m * len;
      for (std::size_t i = 0; i < cfg.cp_samples(); ++i) {
        CHECK(sym[i] == sym[cfg.n_c + i]);
      }
      double energy = 0.0, grid_energy = 0.0;
      for (std::size_t n = 0; n < cfg.n_c; ++n) energy += std::norm(sym[cfg.cp_samples() + n]);
      for (std::size_t k = 0; k < cfg.n_c; ++k) grid_energy += std::norm(s(m, k));
      CHECK(test::rel_err(energy, cfg.n_c * grid_energy) < 1e-9);
      for (std::size_t n : {0UL, 5UL, 77UL}) {
        cplx ref{};
        for (std::size_t k = 0; k < cfg.n_c; ++k) {
          ref += s(m, k) * std::polar(1.0, 2 * std::numbers::pi * double(k * n) / cfg.n_c);
        }
        CHECK(std::abs(sym[cfg.cp_samples() + n] - ref) < 1e-10);
      }
    }
  }

  TEST_CASE("synthesize is linear") {
    const FrameConfig cfg = make_config(240e9, 240e3, 32, 4, 0.0);
    const auto a = test::random_complex(4, 32, 1);
    const auto b = test::random_complex(4, 32, 2);
    ComplexGrid c(4, 32);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 2.0 * a[i] - cplx(0, 3) * b[i];
    const auto xa = synthesize(a, cfg, false, Normalization::raw);
    const auto xb = synthesize(b, cfg, false, Normalization::raw);
    const auto xc = synthesize(c, cfg, false, Normalization::raw);
    for (std::size_t i = 0; i < xc.samples.size(); ++i) {
      const cplx ref = 2.0 * xa.samples[i] - cplx(0, 3) * xb.samples[i];
      CHECK(std::abs(xc.samples[i] - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }

  TEST_CASE("papr examples") {
    std::vector<double> p(8, 0.0), ph(8, 0.0);
    std::vector<std::uint8_t> u(8, 0);
    p[3] = 2.0;
    u[3] = 1;
    ph[3] = 1.234;
    CHECK(papr_db(ph, p, u) == doctest::Approx(0.0).epsilon(1e-12));

    std::fill(p.begin(), p.end(), 0.0);
    std::fill(u.begin(), u.end(), 0);
    std::fill(ph.begin(), ph.end(), 0.0);
    p[2] = p[3] = 1.0;
    u[2] = u[3] = 1;
    CHECK(papr_db(ph, p, u) == doctest::Approx(10 * std::log10(2.0)).epsilon(1e-12));

    std::fill(p.begin(), p.end(), 1.0);
    std::fill(u.begin(), u.end(), 1);
    CHECK(papr_db(ph, p, u) == doctest::Approx(10 * std::log10(8.0)).epsilon(1e-12));

    CHECK_THROWS_AS(papr_db(ph, p, std::vector<std::uint8_t>(8, 0)), DomainError);
  }

  TEST_CASE("papr is invariant under a common rotation") {
    const auto p = test::random_power(1, 64, 9);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ang(0.0, 6.28);
    std::vector<double> ph(64), rot(64);
    std::vector<std::uint8_t> u(64, 1);
    for (std::size_t k = 0; k < 64; ++k) {
      ph[k] = ang(rng);
      rot[k] = ph[k] + 0.7;
    }
    CHECK(std::abs(papr_db(ph, p.row(0), u) - papr_db(rot, p.row(0), u)) < 1e-9);
  }
}
