// Command-line front end: scenario runs, built-in presets and oracle spot checks.

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numeric>
#include <random>

#include "CLI11.hpp"
#include "isac/ambiguity.hpp"
#include "isac/comm_centric.hpp"
#include "isac/error.hpp"
#include "isac/frame.hpp"
#include "isac/kernels.hpp"
#include "isac/optim.hpp"
#include "isac/oracles.hpp"
#include "isac/scenario.hpp"
#include "isac/sensing_centric.hpp"
#include "json.hpp"

using nlohmann::json;
using namespace isac;

namespace {

PowerGrid random_power(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PowerGrid p(m, n);
  for (auto& v : p.data()) v = u(rng);
  return p;
}

double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

json oracle_gamma(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const PowerGrid p = random_power(8, 16, rng);
  const auto lib = gamma_from_power(p).values();
  const auto ref = oracle::naive_gamma(p);
  return {{"grid", "8x16"}, {"max_abs_error", max_abs_diff(lib, ref)}};
}

json oracle_cross_term(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const FrameConfig cfg = make_config(240e9, 240e3, 8, 4, 0.0);
  ComplexGrid s(4, 8);
  std::uniform_int_distribution<int> q(0, 3);
  for (auto& v : s.data()) v = std::polar(1.0, std::numbers::pi / 2 * q(rng) + std::numbers::pi / 4);
  PowerGrid p(4, 8);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(s[i]);
  const auto exact = exact_aaf(synthesize(s, cfg, false, Normalization::raw), cfg);
  const auto approx = approx_aaf(p);
  const auto cross = oracle::cross_term_sum(s);
  double err = 0.0;
  for (std::size_t i = 0; i < cross.size(); ++i) {
    err = std::max(err, std::abs(exact.values[i] - approx.values[i] - cross[i]));
  }
  return {{"grid", "4x8 QPSK"}, {"max_abs_error", err}};
}

json oracle_water_fill(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> g(4);
  for (auto& v : g) v = e(rng);
  const auto wf = optim::water_fill(g, 1.0);
  double rate = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) rate += std::log2(1.0 + g[i] * wf.allocation[i]);
  const auto grid = oracle::simplex_rate_search(g, 1.0, 180, 2);
  return {{"gains", g},
          {"water_fill_rate", rate},
          {"grid_rate", grid.rate},
          {"grid_points", grid.evaluated},
          {"gap_bits", rate - grid.rate}};
}

json oracle_papr(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  const std::size_t n = 16;
  std::vector<double> p(n, 0.0);
  std::vector<std::uint8_t> mask(n, 0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < 8; ++i) {
    mask[order[i]] = 1;
    p[order[i]] = u(rng);
  }
  const auto bb = comm_centric::reduce_papr_bb(p, mask, {});
  const auto ex = oracle::exhaustive_papr(p, mask, 2);
  return {{"bb_papr_db", bb.report.papr_db},
          {"exhaustive_papr_db", ex.papr_db},
          {"excess_db", bb.report.papr_db - ex.papr_db}};
}

json oracle_minimax(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Roi roi = Roi::from_divisors(4, 8, 2, 2);
  IndicatorGrid u(4, 8);
  std::bernoulli_distribution b(0.5);
  for (auto& v : u.data()) v = b(rng);
  u[0] = 1;
  const auto lib = comm_centric::allocate_sensing_power(u, 1.0, roi);
  const auto cells = roi.sidelobe_cells();
  const double lib_obj = oracle::naive_sidelobe_peak(lib.p_r, cells);
  const auto rnd = oracle::random_minimax(u, 1.0, cells, 20000, seed);
  return {{"solver_peak", lib_obj}, {"random_search_peak", rnd.objective}};
}

json oracle_cfar(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  const std::size_t rows = 32, cols = 64;
  std::vector<double> pw(rows * cols);
  for (auto& v : pw) v = e(rng);
  std::vector<double> lib(rows * cols);
  kernels::cfar_mean(pw, rows, cols, {}, lib);
  const auto ref = oracle::annulus_mean(pw, rows, cols, {});
  double err = 0.0;
  for (std::size_t i = 0; i < lib.size(); ++i) err = std::max(err, std::abs(lib[i] - ref[i]));
  return {{"max_abs_error", err}};
}

// 2 x 2 grid with the Doppler pair fixed: each row keeps half the power and the MM step
// reduces to a one-dimensional concave search per row.
json oracle_mm(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  const Roi roi = Roi::from_divisors(2, 2, 1, 2);
  ComplexGrid h(2, 2);
  PowerGrid pc(2, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    h[i] = cplx(u(rng), 0.0);
    pc[i] = u(rng);
  }
  const double p_bar = 1.0, a_norm = 0.8, s2 = 0.1;
  PowerGrid prev(2, 2, 0.25);
  sensing_centric::ScConfig sc;
  sc.lambda = 0.04;
  sc.inner.max_iter = 200;
  const auto step = sensing_centric::mm_inner_step(prev, pc, h, s2, roi, sc, a_norm);
  double ref = 0.0;
  for (std::size_t r = 0; r < 2; ++r) {
    const std::size_t i0 = 2 * r, i1 = 2 * r + 1;
    auto f = [&](double t) {
      const double p0 = t, p1 = p_bar / 2 - t;
      auto term = [&](double p, std::size_t i) {
        return std::log2(1.0 + (1.0 - p / a_norm) * pc[i] * std::norm(h[i]) / s2) -
               sc.lambda * (1.0 - 2.0 * prev[i] / a_norm) * p;
      };
      return term(p0, i0) + term(p1, i1);
    };
    ref += oracle::grid_maximize(f, 0.0, p_bar / 2, 200001).value;
  }
  double surrogate = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    surrogate += std::log2(1.0 + (1.0 - step.p_r[i] / a_norm) * pc[i] * std::norm(h[i]) / s2) -
                 sc.lambda * (1.0 - 2.0 * prev[i] / a_norm) * step.p_r[i];
  }
  return {{"step_surrogate", surrogate}, {"grid_surrogate", ref}, {"gap", ref - surrogate}};
}

const std::map<std::string, json (*)(std::uint64_t)>& oracles() {
  static const std::map<std::string, json (*)(std::uint64_t)> table{
      {"gamma", oracle_gamma},         {"cross_term", oracle_cross_term},
      {"water_fill", oracle_water_fill}, {"papr", oracle_papr},
      {"minimax", oracle_minimax},     {"cfar", oracle_cfar},
      {"mm", oracle_mm}};
  return table;
}

void print_summary(const std::vector<RunRecord>& recs, const std::string& out) {
  std::fprintf(stderr, "%zu runs written to %s\n", recs.size(), out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OFDM sensing/communication waveform designer"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 keeps the OpenMP default)");

  auto* run = app.add_subcommand("run", "run a scenario file");
  std::string scenario_file, run_out = "out";
  run->add_option("scenario", scenario_file, "scenario JSON file")->required();
  run->add_option("--out", run_out, "output directory");

  auto* pre = app.add_subcommand("preset", "run a built-in experiment preset");
  std::string preset_name, preset_out;
  std::size_t seeds = 0;
  std::string names;
  for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
  pre->add_option("name", preset_name, "one of: " + names)->required();
  pre->add_option("--out", preset_out, "output directory")->required();
  pre->add_option("--seeds", seeds, "replace the seed list with 1..N");
  bool dump_only = false;
  pre->add_flag("--print", dump_only, "print the preset scenario JSON instead of running it");

  auto* orc = app.add_subcommand("oracle", "compare a fast path against its brute-force oracle");
  std::string oracle_name;
  std::uint64_t oracle_seed = 1;
  std::string oracle_names;
  for (const auto& [k, v] : oracles()) oracle_names += (oracle_names.empty() ? "" : ", ") + k;
  orc->add_option("name", oracle_name, "one of: " + oracle_names + ", all")->required();
  orc->add_option("--seed", oracle_seed, "instance seed");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*run) {
      const Scenario s = load_scenario(scenario_file);
      print_summary(run_scenario(s, run_out), run_out);
    } else if (*pre) {
      Scenario s = preset(preset_name);
      if (seeds > 0) {
        s.seeds.clear();
        for (std::size_t i = 1; i <= seeds; ++i) s.seeds.push_back(i);
      }
      if (dump_only) {
        std::cout << to_json(s).dump(2) << "\n";
        return 0;
      }
      print_summary(run_scenario(s, preset_out), preset_out);
    } else if (*orc) {
      json out;
      if (oracle_name == "all") {
        for (const auto& [k, fn] : oracles()) out[k] = fn(oracle_seed);
      } else {
        auto it = oracles().find(oracle_name);
        if (it == oracles().end()) throw InvalidConfig("unknown oracle '" + oracle_name + "'");
        out = it->second(oracle_seed);
      }
      std::cout << out.dump(2) << "\n";
    }
  } catch (const InvalidConfig& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ScopeError& e) {
    std::fprintf(stderr, "scope error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
