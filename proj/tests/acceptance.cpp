// Acceptance checks 1-12. Prints one PASS/FAIL line per criterion with its runtime.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "isac/ambiguity.hpp"
#include "isac/channel.hpp"
#include "isac/comm_centric.hpp"
#include "isac/frame.hpp"
#include "isac/optim.hpp"
#include "isac/oracles.hpp"
#include "isac/sensing.hpp"
#include "isac/sensing_centric.hpp"
#include "support.hpp"

using namespace isac;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double snr_to_sigma2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

ComplexGrid fast_channel(const FrameConfig& cfg, std::uint64_t seed) {
  return sample_grid(gen_paths(fast_fading_spec(), cfg, seed), cfg);
}

// ---- 1 ----------------------------------------------------------------------------------------

Outcome mainlobe_identity() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> dm(1, 32), dn(1, 128);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto p = test::random_power(dm(rng), dn(rng), 1000 + t);
    const auto chi = approx_aaf(p);
    const double expect = static_cast<double>(p.cols()) * total(p);
    worst = std::max(worst, test::rel_err(std::abs(chi.at(0, 0)), expect));
  }
  return {worst <= 1e-9, fmt("max rel err %.2e", worst)};
}

// ---- 2 ----------------------------------------------------------------------------------------

Outcome duality_round_trip() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> dm(1, 32), dn(1, 128);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = t == 0 ? 32 : dm(rng);
    const std::size_t n = t == 0 ? 128 : dn(rng);
    const auto p = test::random_power(m, n, 2000 + t, 0.0, 10.0);
    const auto back = power_from_gamma(gamma_from_power(p)).power;
    double scale = 0.0, err = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      scale = std::max(scale, std::abs(p[i]));
      err = std::max(err, std::abs(back[i] - p[i]));
    }
    worst = std::max(worst, err / scale);
  }
  return {worst <= 1e-10, fmt("max rel err %.2e", worst)};
}

// ---- 3 ----------------------------------------------------------------------------------------

Outcome cross_term_decomposition() {
  const FrameConfig cfg = make_config(240e9, 240e3, 8, 4, 0.0);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = test::random_qpsk(4, 8, 3000 + seed);
    PowerGrid p(4, 8);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(s[i]);
    const auto exact = exact_aaf(synthesize(s, cfg, false, Normalization::raw), cfg);
    const auto approx = approx_aaf(p);
    const auto cross = oracle::cross_term_sum(s);
    for (std::size_t i = 0; i < cross.size(); ++i) {
      worst = std::max(worst, std::abs(exact.values[i] - approx.values[i] - cross[i]));
    }
  }
  return {worst <= 1e-9, fmt("max abs err %.2e", worst)};
}

// ---- 4 ----------------------------------------------------------------------------------------

Outcome water_filling_optimality() {
  std::mt19937_64 rng(404);
  std::exponential_distribution<double> gain(1.0);
  std::uniform_real_distribution<double> budget(0.2, 5.0);
  double worst_gap = 0.0, worst_kkt = 0.0;
  std::size_t points = 0;
  bool lib_never_worse = true;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> g(4);
    for (auto& v : g) v = gain(rng);
    const double tot = budget(rng);
    const auto wf = optim::water_fill(g, tot);
    double rate = 0.0, sum = 0.0, kkt = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double p = wf.allocation[i];
      rate += std::log2(1.0 + g[i] * p);
      sum += p;
      if (p > 0.0) {
        kkt = std::max(kkt, std::abs(p + 1.0 / g[i] - wf.level));
      } else {
        kkt = std::max(kkt, std::max(0.0, wf.level - 1.0 / g[i]));
      }
      kkt = std::max(kkt, std::max(0.0, -p));
    }
    kkt = std::max(kkt, std::abs(sum - tot));
    worst_kkt = std::max(worst_kkt, kkt / wf.level);
    const auto grid = oracle::simplex_rate_search(g, tot, 180, 3);
    points = std::max(points, grid.evaluated);
    worst_gap = std::max(worst_gap, std::abs(grid.rate - rate));
    lib_never_worse = lib_never_worse && rate >= grid.rate - 1e-12;
  }
  return {worst_gap <= 1e-4 && worst_kkt <= 1e-9 && lib_never_worse,
          fmt("max gap %.2e bits, max KKT %.2e, %zu grid points per instance", worst_gap,
              worst_kkt, points)};
}

// ---- 5 ----------------------------------------------------------------------------------------

Outcome bb_near_optimality() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> amp(0.1, 1.0);
  double worst_excess = -1e300;
  bool feasible = true;
  for (int t = 0; t < 30; ++t) {
    std::vector<double> p(16, 0.0);
    std::vector<std::uint8_t> u(16, 0);
    std::vector<std::size_t> idx(16);
    for (std::size_t i = 0; i < 16; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < 8; ++i) {
      u[idx[i]] = 1;
      p[idx[i]] = amp(rng);
    }
    comm_centric::BbConfig bb;
    bb.r = 2;
    const auto res = comm_centric::reduce_papr_bb(p, u, bb);
    const auto ex = oracle::exhaustive_papr(p, u, 2);
    worst_excess = std::max(worst_excess, res.report.papr_db - ex.papr_db);
    for (std::size_t k = 0; k < 16; ++k) {
      const double q = res.phases[k] / std::numbers::pi;
      if (std::abs(q - std::round(q)) > 1e-12) feasible = false;
    }
    if (std::abs(papr_db(res.phases, p, u) - res.report.papr_db) > 1e-9) feasible = false;
  }
  return {worst_excess <= 0.5 && feasible,
          fmt("worst excess over exhaustive %.3f dB, incumbents %s", worst_excess,
              feasible ? "feasible" : "INFEASIBLE")};
}

// ---- 6 ----------------------------------------------------------------------------------------

Outcome full_frame_papr() {
  const FrameConfig cfg = default_frame();
  const Roi roi = make_roi(cfg, 60.0, 20.0);
  const double budget = static_cast<double>(cfg.m_sym * cfg.n_c);
  const double s2 = snr_to_sigma2(0.0);
  const PowerGrid zero(cfg.m_sym, cfg.n_c);
  double max2 = 0.0, max4 = 0.0;
  std::vector<double> reduction;
  for (std::size_t r : {2UL, 4UL}) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto h = fast_channel(cfg, seed);
      comm_centric::CcConfig cc;
      cc.bb.r = r;
      const auto d = comm_centric::design(h, budget, budget, s2, roi, cc);
      const double peak = max_papr_db(d);
      (r == 2 ? max2 : max4) = std::max(r == 2 ? max2 : max4, peak);
      const auto plain = symbol_papr_db(d.p_r, d.u, zero);
      for (std::size_t m = 0; m < plain.size(); ++m) {
        if (std::isfinite(plain[m])) reduction.push_back(plain[m] - d.papr_db[m]);
      }
    }
  }
  const double med = median(reduction);
  return {max2 <= 6.5 && max4 <= 5.5 && med >= 6.0,
          fmt("max PAPR R=2 %.2f dB, R=4 %.2f dB, median reduction %.2f dB", max2, max4, med)};
}

// ---- 7 and 8 ----------------------------------------------------------------------------------

struct CommRun {
  ComplexGrid h;
  DesignResult design;
  DesignResult baseline;
};

std::vector<CommRun>& comm_runs() {
  static std::vector<CommRun> runs;
  return runs;
}

Outcome comm_centric_pslr() {
  const FrameConfig cfg = default_frame();
  const Roi roi = make_roi(cfg, 60.0, 20.0);
  const double budget = static_cast<double>(cfg.m_sym * cfg.n_c);
  const double s2 = snr_to_sigma2(0.0);
  comm_centric::CcConfig cc;
  cc.reduce_papr = false;
  std::vector<double> ours, base;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CommRun run;
    run.h = fast_channel(cfg, seed);
    run.design = comm_centric::design(run.h, budget, budget, s2, roi, cc);
    run.baseline = comm_centric::equal_power_baseline(run.h, budget, budget, s2, roi);
    ours.push_back(run.design.pslr_db);
    base.push_back(run.baseline.pslr_db);
    comm_runs().push_back(std::move(run));
  }
  const double mo = median(ours), mb = median(base);
  return {mo >= 10.0 && mo >= mb + 1.0,
          fmt("median PSLR %.2f dB, equal-power baseline %.2f dB", mo, mb)};
}

Outcome rate_preservation() {
  const FrameConfig cfg = default_frame();
  const double budget = static_cast<double>(cfg.m_sym * cfg.n_c);
  const double s2 = snr_to_sigma2(0.0);
  if (comm_runs().empty()) return {false, "no comm-centric runs available"};
  std::size_t mismatches = 0;
  for (const auto& run : comm_runs()) {
    const auto wf = comm_centric::allocate_comm(run.h, budget, s2);
    if (run.design.rate != wf.rate || run.design.p_c != wf.p_c) ++mismatches;
  }
  return {mismatches == 0,
          fmt("%zu of %zu designs differ from standalone water-filling", mismatches,
              comm_runs().size())};
}

// ---- 9 and 10 ---------------------------------------------------------------------------------

struct SensingRun {
  sensing_centric::ScResult result;
  double upper_bound = 0.0;
};

std::vector<SensingRun>& sensing_runs() {
  static std::vector<SensingRun> runs;
  return runs;
}

void run_sensing_seeds() {
  const FrameConfig cfg = default_frame();
  const Roi roi = make_roi(cfg, 40.0, 50.0);
  const double budget = static_cast<double>(cfg.m_sym * cfg.n_c);
  const double s2 = snr_to_sigma2(10.0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto h = fast_channel(cfg, seed);
    SensingRun run;
    run.result = sensing_centric::design(h, budget, budget, s2, roi);
    run.upper_bound = comm_centric::allocate_comm(h, budget, s2).rate;
    sensing_runs().push_back(std::move(run));
  }
}

Outcome local_perfection() {
  const FrameConfig cfg = default_frame();
  const Roi roi = make_roi(cfg, 40.0, 50.0);
  const double budget = static_cast<double>(cfg.m_sym * cfg.n_c);
  run_sensing_seeds();
  double side = 0.0, min_p = 0.0, sum_err = 0.0, imag = 0.0;
  for (const auto& run : sensing_runs()) {
    const auto& p = run.result.design.p_r;
    const GammaGrid g = gamma_from_power(p);
    for (auto [nu, mu] : roi.sidelobe_cells()) {
      side = std::max(side, std::abs(g.at(nu, mu)) / budget);
    }
    for (double v : p.data()) min_p = std::min(min_p, v / run.result.a_norm);
    sum_err = std::max(sum_err, std::abs(total(p) - budget) / budget);
    imag = std::max(imag, power_from_gamma(run.result.gamma).imag_residue / budget);
  }
  return {side <= 1e-6 && min_p >= -1e-8 && sum_err <= 1e-6 && imag <= 1e-10,
          fmt("sidelobe %.2e, min P/A %.2e, total err %.2e, imag residue %.2e (all / P_r)",
              side, min_p, sum_err, imag)};
}

Outcome sensing_centric_rate() {
  if (sensing_runs().empty()) run_sensing_seeds();
  std::vector<double> ratios;
  for (const auto& run : sensing_runs()) {
    ratios.push_back(run.result.design.rate / run.upper_bound);
  }
  const double med = median(ratios);
  return {med >= 0.9, fmt("median rate / water-filling bound %.4f", med)};
}

// ---- 11 ---------------------------------------------------------------------------------------

Outcome convergence_budget() {
  const FrameConfig cfg = default_frame();
  const double budget = static_cast<double>(cfg.m_sym * cfg.n_c);
  const double s2 = snr_to_sigma2(10.0);
  const std::vector<std::pair<double, double>> scopes{
      {20, 10}, {40, 10}, {80, 10}, {150, 10}, {20, 25}, {40, 25},
      {80, 25}, {150, 25}, {20, 50}, {40, 50}, {80, 50}, {150, 50}};
  sensing_centric::ScConfig sc;
  sc.eps1 = 1e-3;
  sc.eps2 = 1e-1;
  std::size_t within = 0, worst = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto [d0, u0] = scopes[(seed - 1) % scopes.size()];
    const Roi roi = make_roi(cfg, d0, u0);
    const auto res = sensing_centric::design(fast_channel(cfg, 100 + seed), budget, budget, s2,
                                             roi, sc);
    const std::size_t it = res.trace.total_iterations();
    worst = std::max(worst, it);
    if (it <= 20) ++within;
  }
  return {within * 100 >= 80 * 50,
          fmt("%zu of 50 runs within 20 iterations, worst %zu", within, worst)};
}

// ---- 12 ---------------------------------------------------------------------------------------

std::vector<Detection> detect_target(const FrameConfig& cfg, std::size_t mu0, int nu0) {
  ComplexGrid s_r(cfg.m_sym, cfg.n_c, GridRole::sensing);
  for (auto& v : s_r.data()) v = 1.0;
  const auto x = synthesize(s_r, cfg, true, Normalization::raw);
  const Target t{static_cast<double>(mu0) * cfg.distance_per_bin(),
                 test::integer_bin_speed(cfg, nu0)};
  const auto y = simulate_echo(x, cfg, t, 0.0, 0, false);
  auto pg = periodogram(s_r, y, cfg);
  pg.theta = cfar_threshold(pg);
  return detect_and_localize(pg, pg.theta, 10.0, cfg);
}

Outcome detection_correctness() {
  const FrameConfig cfg = default_frame();
  const auto dets = detect_target(cfg, 20, 4);
  bool ok = dets.size() == 1 && dets[0].nu == 4 && dets[0].mu == 20 &&
            std::abs(dets[0].distance - 97.65625) < 1e-9;
  std::string detail = fmt("%zu detection(s)", dets.size());
  if (!dets.empty()) {
    detail += fmt(" first at (%zu,%zu) d=%.2f m", dets[0].nu, dets[0].mu, dets[0].distance);
  }

  const double per_bin = kSpeedOfLight / (2.0 * cfg.m_sym * cfg.f_c * cfg.t_o());
  const std::size_t m = cfg.m_sym;
  for (std::size_t nu0 : {std::size_t{0}, m / 2, m / 2 + 1, m - 1}) {
    const int signed_nu = nu0 <= m / 2 ? static_cast<int>(nu0) : static_cast<int>(nu0) -
                                                                    static_cast<int>(m);
    const double expect = signed_nu * per_bin;
    const auto d = detect_target(cfg, 20, signed_nu);
    const bool hit = d.size() == 1 && d[0].nu == nu0 && d[0].mu == 20 &&
                     std::abs(bin_speed(nu0, cfg) - expect) <= 1e-12 * (1.0 + std::abs(expect)) &&
                     std::abs(d[0].speed - expect) <= 1e-12 * (1.0 + std::abs(expect));
    ok = ok && hit;
    detail += fmt("; nu=%zu -> %+.3f m/s %s", nu0, bin_speed(nu0, cfg), hit ? "ok" : "WRONG");
  }
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "mainlobe identity", 1.0, mainlobe_identity},
      {2, "duality round trip", 5.0, duality_round_trip},
      {3, "approximation decomposition", 30.0, cross_term_decomposition},
      {4, "water-filling optimality", 60.0, water_filling_optimality},
      {5, "branch-and-bound near-optimality", 120.0, bb_near_optimality},
      {6, "full-frame PAPR", 600.0, full_frame_papr},
      {7, "comm-centric PSLR", 900.0, comm_centric_pslr},
      {8, "rate optimality preservation", 60.0, rate_preservation},
      {9, "sensing-centric local perfection", 1200.0, local_perfection},
      {10, "sensing-centric rate", 1200.0, sensing_centric_rate},
      {11, "convergence budget", 1800.0, convergence_budget},
      {12, "detection correctness", 10.0, detection_correctness},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = out.pass && in_time;
    failed += !pass;
    std::printf("%s %2d %s: %s; %.2f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs, c.budget_s, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
