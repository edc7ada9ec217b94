#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <numeric>

#include "doctest.h"
#include "isac/channel.hpp"
#include "isac/comm_centric.hpp"
#include "isac/oracles.hpp"
#include "support.hpp"

using namespace isac;
using namespace isac::comm_centric;

namespace {

FrameConfig small_frame() { return make_config(240e9, 240e3, 32, 8, 1.0368e-6); }

ComplexGrid channel(const FrameConfig& cfg, std::uint64_t seed) {
  return sample_grid(gen_paths(fast_fading_spec(), cfg, seed), cfg);
}

}  // namespace

TEST_SUITE("comm_centric") {
  TEST_CASE("allocate_comm on flat and peaked channels") {
    ComplexGrid flat(4, 4);
    for (auto& v : flat.data()) v = 1.0;
    const auto a = allocate_comm(flat, 8.0, 1.0);
    for (double p : a.p_c.data()) CHECK(p == doctest::Approx(0.5));
    CHECK(a.rate == doctest::Approx(16 * std::log2(1.5)));

    ComplexGrid peaked(4, 4);
    for (auto& v : peaked.data()) v = 0.1;
    peaked(2, 3) = 10.0;
    const auto b = allocate_comm(peaked, 1e-3, 1.0);
    CHECK(b.p_c(2, 3) == doctest::Approx(1e-3));
    CHECK(total(b.p_c) == doctest::Approx(1e-3));
  }

  TEST_CASE("allocate_comm against a grid search on 2x2") {
    const auto h = test::random_complex(2, 2, 17);
    const auto a = allocate_comm(h, 2.0, 0.5);
    std::vector<double> g(4);
    for (std::size_t i = 0; i < 4; ++i) g[i] = std::norm(h[i]) / 0.5;
    const auto grid = oracle::simplex_rate_search(g, 2.0, 100, 3);
    CHECK(a.rate >= grid.rate - 1e-12);
    CHECK(a.rate - grid.rate <= 1e-4);
  }

  TEST_CASE("split follows the zero-power set") {
    ComplexGrid h(2, 2);
    for (auto& v : h.data()) v = 2.0;
    CHECK(count_ones(split_res(h, 1.0)) == 0);
    CHECK(count_ones(split_res(h, 5.0)) == 4);
    CHECK(count_ones(split_res(h, 4.0)) == 4);  // equality goes to sensing

    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto hr = channel(default_frame(), seed);
      const auto a = allocate_comm(hr, 4096.0, 1.0);
      const auto u = split_res(hr, a.threshold);
      for (std::size_t i = 0; i < u.size(); ++i) CHECK((u[i] == 1) == (a.p_c[i] == 0.0));
    }
  }

  TEST_CASE("threshold-driven allocation") {
    const auto h = channel(small_frame(), 4);
    const auto a = allocate_comm(h, 256.0, 1.0);
    const auto b = allocate_comm_at_threshold(h, a.threshold, 1.0);
    CHECK(total(b.p_c) == doctest::Approx(256.0).epsilon(1e-9));
    CHECK(b.rate == doctest::Approx(a.rate).epsilon(1e-9));
  }

  TEST_CASE("sensing power allocation") {
    const Roi roi = Roi::from_divisors(2, 4, 1, 1);
    const auto all = allocate_sensing_power(IndicatorGrid(2, 4, 1), 4.0, roi);
    CHECK(all.report.objective < 1e-6 * 4.0);
    for (double p : all.p_r.data()) CHECK(p == doctest::Approx(0.5).epsilon(1e-6));

    IndicatorGrid single(2, 4);
    single(1, 2) = 1;
    const auto one = allocate_sensing_power(single, 3.0, roi);
    CHECK(one.p_r(1, 2) == doctest::Approx(3.0));
    CHECK(total(one.p_r) == doctest::Approx(3.0));

    CHECK_THROWS_AS(allocate_sensing_power(IndicatorGrid(2, 4), 1.0, roi), EmptySupport);
  }

  TEST_CASE("sensing allocation against random search") {
    const Roi roi = Roi::from_divisors(2, 4, 1, 1);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      IndicatorGrid u(2, 4);
      std::vector<std::size_t> idx(8);
      std::iota(idx.begin(), idx.end(), 0);
      std::mt19937_64 rng(seed);
      std::shuffle(idx.begin(), idx.end(), rng);
      for (std::size_t i = 0; i < 5; ++i) u[idx[i]] = 1;
      const auto lib = allocate_sensing_power(u, 1.0, roi);
      const auto cells = roi.sidelobe_cells();
      const double lib_obj = oracle::naive_sidelobe_peak(lib.p_r, cells);
      CHECK(std::abs(lib_obj - lib.report.objective) < 1e-9);
      const auto rnd = oracle::random_minimax(u, 1.0, cells, 100000, seed + 10);
      CHECK(lib_obj <= rnd.objective * 1.02);
      for (std::size_t i = 0; i < 8; ++i) {
        if (!u[i]) CHECK(lib.p_r[i] == 0.0);
        CHECK(lib.p_r[i] >= 0.0);
      }
    }
  }

  TEST_CASE("branch and bound phases") {
    std::vector<double> p(16, 0.0);
    std::vector<std::uint8_t> u(16, 0);
    p[5] = 1.0;
    u[5] = 1;
    const auto single = reduce_papr_bb(p, u, {});
    CHECK(single.report.papr_db == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(reduce_papr_bb(p, std::vector<std::uint8_t>(16, 0), {}), EmptySupport);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> amp(0.1, 1.0);
    for (int t = 0; t < 5; ++t) {
      std::vector<double> pw(8);
      for (auto& v : pw) v = amp(rng);
      const std::vector<std::uint8_t> all(8, 1);
      const auto bb = reduce_papr_bb(pw, all, {});
      const auto ex = oracle::exhaustive_papr(pw, all, 2);
      CHECK(bb.report.papr_db <= ex.papr_db + 0.5);
      CHECK(bb.report.papr_db == doctest::Approx(papr_db(bb.phases, pw, all)).epsilon(1e-9));
      for (std::size_t i = 1; i < bb.report.upper_trace.size(); ++i) {
        CHECK(bb.report.upper_trace[i] <= bb.report.upper_trace[i - 1]);
      }
      for (double ph : bb.phases) {
        const double q = ph / std::numbers::pi;
        CHECK(std::abs(q - std::round(q)) < 1e-12);
      }
    }
  }

  TEST_CASE("design keeps the water-filling allocation") {
    const FrameConfig cfg = small_frame();
    const auto h = channel(cfg, 2);
    const Roi roi = make_roi(cfg, 30.0, 20.0);
    const double pc = 256.0, pr = 256.0;
    const auto ref = allocate_comm(h, pc, 1.0);
    const auto d = design(h, pc, pr, 1.0, roi);
    CHECK(d.rate == ref.rate);
    CHECK(d.p_c == ref.p_c);
    CHECK(total(d.p_r) == doctest::Approx(pr).epsilon(1e-9));
    for (std::size_t i = 0; i < d.p_r.size(); ++i) CHECK(d.p_r[i] * d.p_c[i] == 0.0);

    CcConfig no_papr;
    no_papr.reduce_papr = false;
    const auto plain = design(h, pc, pr, 1.0, roi, no_papr);
    CHECK(plain.pslr_db == d.pslr_db);

    const auto base = equal_power_baseline(h, pc, pr, 1.0, roi);
    CHECK(base.u == d.u);
    CHECK(d.pslr_db >= base.pslr_db);
    CHECK(to_json(d).contains("pslr_roi_db"));
  }

  TEST_CASE("flat channel leaves no sensing REs") {
    const FrameConfig cfg = small_frame();
    ComplexGrid h(cfg.m_sym, cfg.n_c);
    for (auto& v : h.data()) v = 1.0;
    const auto d = design(h, 256.0, 10.0, 1.0, make_roi(cfg, 30.0, 20.0));
    CHECK(d.comm_only);
    CHECK(count_ones(d.u) == 0);
  }
}
