#include "isac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "isac/error.hpp"

namespace isac {

using nlohmann::json;

const char* designer_name(Designer d) {
  switch (d) {
    case Designer::comm_centric: return "comm_centric";
    case Designer::sensing_centric: return "sensing_centric";
    case Designer::equal_power_baseline: return "equal_power_baseline";
  }
  return "?";
}

Designer designer_from_name(const std::string& name) {
  if (name == "comm_centric") return Designer::comm_centric;
  if (name == "sensing_centric") return Designer::sensing_centric;
  if (name == "equal_power_baseline") return Designer::equal_power_baseline;
  throw InvalidConfig("unknown designer '" + name + "'");
}

double Scenario::comm_budget() const {
  return p_bar_c ? *p_bar_c : static_cast<double>(frame.m_sym * frame.n_c);
}

double Scenario::sigma2_c() const {
  // Unit mean channel gain: SNR = P_c / (M N_c sigma2_c).
  return comm_budget() / static_cast<double>(frame.m_sym * frame.n_c) *
         std::pow(10.0, -snr_db / 10.0);
}

void validate(const Scenario& s) {
  auto fail = [](const std::string& key, const std::string& msg) {
    throw InvalidConfig(key + ": " + msg);
  };
  try {
    make_config(s.frame.f_c, s.frame.delta_f, s.frame.n_c, s.frame.m_sym, s.frame.t_g);
  } catch (const Error& e) {
    fail("frame", e.what());
  }
  if (s.channel != "fast" && s.channel != "slow") fail("channel.preset", "expected fast or slow");
  if (s.paths == 0) fail("channel.paths", "must be positive");
  if (s.seeds.empty()) fail("seeds", "at least one seed is required");
  if (s.designers.empty()) fail("designers", "at least one designer is required");
  if (s.scopes.empty()) fail("scopes", "at least one scope is required");
  for (std::size_t i = 0; i < s.scopes.size(); ++i) {
    try {
      make_roi(s.frame, s.scopes[i].d0, s.scopes[i].u0);
    } catch (const Error& e) {
      throw ScopeError("scopes[" + std::to_string(i) + "]: " + e.what());
    }
  }
  if (!std::isfinite(s.snr_db)) fail("power.snr_db", "must be finite");
  if (s.p_bar_c && !(*s.p_bar_c > 0.0)) fail("power.p_bar_c", "must be positive");
  if (s.ratios.empty()) fail("power.ratios", "at least one ratio is required");
  for (double r : s.ratios) {
    if (!(r > 0.0)) fail("power.ratios", "ratios must be positive");
  }
  if (!(s.sigma2_r >= 0.0)) fail("power.sigma2_r", "must be non-negative");
  if (s.bb.r < 2) fail("comm_centric.r", "alphabet needs at least two phases");
  if (!(s.bb.epsilon > 0.0)) fail("comm_centric.epsilon", "must be positive");
  if (s.bb.n_s == 0) fail("comm_centric.n_s", "must be positive");
  for (double t : s.thresholds) {
    if (!(t > 0.0)) fail("comm_centric.thresholds", "thresholds must be positive");
  }
  const auto& sc = s.sc;
  if (!(sc.lambda >= 0.0)) fail("sensing_centric.lambda", "must be non-negative");
  if (!(sc.delta_fraction >= 0.0)) fail("sensing_centric.delta_fraction", "must be non-negative");
  if (sc.i_m == 0) fail("sensing_centric.i_m", "must be positive");
  if (sc.j_m == 0) fail("sensing_centric.j_m", "must be positive");
  if (!(sc.eps1 > 0.0)) fail("sensing_centric.eps1", "must be positive");
  if (!(sc.eps2 > 0.0)) fail("sensing_centric.eps2", "must be positive");
  for (double d : s.delta_fractions) {
    if (!(d >= 0.0)) fail("sensing_centric.delta_fractions", "must be non-negative");
  }
  for (double l : s.lambdas) {
    if (!(l >= 0.0)) fail("sensing_centric.lambdas", "must be non-negative");
  }
  if (!(s.cfar_gamma > 0.0)) fail("detection.gamma", "must be positive");
}

json to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["frame"] = {{"f_c_hz", s.frame.f_c},
                {"delta_f_hz", s.frame.delta_f},
                {"n_c", s.frame.n_c},
                {"m_sym", s.frame.m_sym},
                {"t_g_s", s.frame.t_g}};
  j["channel"] = {{"preset", s.channel}, {"paths", s.paths}};
  j["seeds"] = s.seeds;
  json ds = json::array();
  for (auto d : s.designers) ds.push_back(designer_name(d));
  j["designers"] = ds;
  json sc = json::array();
  for (const auto& p : s.scopes) sc.push_back({{"d0_m", p.d0}, {"u0_mps", p.u0}});
  j["scopes"] = sc;
  j["power"] = {{"snr_db", s.snr_db}, {"ratios", s.ratios}, {"sigma2_r", s.sigma2_r}};
  if (s.p_bar_c) j["power"]["p_bar_c"] = *s.p_bar_c;
  j["comm_centric"] = {{"r", s.bb.r},
                       {"epsilon", s.bb.epsilon},
                       {"n_s", s.bb.n_s},
                       {"max_expansions", s.bb.max_expansions},
                       {"relax_iterations", s.bb.relax.max_iter},
                       {"reduce_papr", s.reduce_papr},
                       {"thresholds", s.thresholds}};
  j["sensing_centric"] = {{"delta_fraction", s.sc.delta_fraction},
                          {"lambda", s.sc.lambda},
                          {"a_norm", s.sc.a_norm},
                          {"i_m", s.sc.i_m},
                          {"j_m", s.sc.j_m},
                          {"eps1", s.sc.eps1},
                          {"eps2", s.sc.eps2},
                          {"delta_fractions", s.delta_fractions},
                          {"lambdas", s.lambdas}};
  j["detection"] = {{"distance_m", s.target.distance},
                    {"speed_mps", s.target.speed},
                    {"gamma", s.cfar_gamma}};
  j["outputs"] = {{"surfaces", s.outputs.surfaces},
                  {"surface_binary", s.outputs.surface_binary},
                  {"exact_surface", s.outputs.exact_surface},
                  {"traces", s.outputs.traces},
                  {"detection", s.outputs.detection}};
  return j;
}

namespace {

// Reads keys of one JSON object, rejecting unknown keys and mistyped values with the
// full key path in the message.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidConfig(where("") + "expected an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw InvalidConfig(where(key) + "wrong type (" + e.what() + ")");
    }
  }

  template <class T>
  void read(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    T v{};
    read(key, v);
    out = v;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw InvalidConfig(where(it.key()) + "unknown key");
    }
  }

 private:
  std::string where(const std::string& key) const {
    std::string p = path_;
    if (!key.empty()) p = p.empty() ? key : p + "." + key;
    return (p.empty() ? std::string("<root>") : p) + ": ";
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

Scenario scenario_from_json(const json& j) {
  Scenario s;
  Section root(j, "");
  root.read("name", s.name);
  if (const json* f = root.child("frame")) {
    Section sec(*f, "frame");
    sec.read("f_c_hz", s.frame.f_c);
    sec.read("delta_f_hz", s.frame.delta_f);
    sec.read("n_c", s.frame.n_c);
    sec.read("m_sym", s.frame.m_sym);
    sec.read("t_g_s", s.frame.t_g);
    sec.finish();
  }
  if (const json* c = root.child("channel")) {
    Section sec(*c, "channel");
    sec.read("preset", s.channel);
    sec.read("paths", s.paths);
    sec.finish();
  }
  root.read("seeds", s.seeds);
  if (const json* d = root.child("designer")) {
    if (!d->is_string()) throw InvalidConfig("designer: expected a string");
    s.designers = {designer_from_name(d->get<std::string>())};
  }
  if (const json* d = root.child("designers")) {
    if (!d->is_array()) throw InvalidConfig("designers: expected an array");
    s.designers.clear();
    for (const auto& e : *d) {
      if (!e.is_string()) throw InvalidConfig("designers: expected strings");
      s.designers.push_back(designer_from_name(e.get<std::string>()));
    }
  }
  auto read_scope = [](const json& e, const std::string& path) {
    Scope p;
    Section sec(e, path);
    sec.read("d0_m", p.d0);
    sec.read("u0_mps", p.u0);
    sec.finish();
    return p;
  };
  if (const json* sc = root.child("scope")) s.scopes = {read_scope(*sc, "scope")};
  if (const json* sc = root.child("scopes")) {
    if (!sc->is_array()) throw InvalidConfig("scopes: expected an array");
    s.scopes.clear();
    for (std::size_t i = 0; i < sc->size(); ++i) {
      s.scopes.push_back(read_scope((*sc)[i], "scopes[" + std::to_string(i) + "]"));
    }
  }
  if (const json* p = root.child("power")) {
    Section sec(*p, "power");
    sec.read("snr_db", s.snr_db);
    sec.read("p_bar_c", s.p_bar_c);
    sec.read("ratios", s.ratios);
    sec.read("sigma2_r", s.sigma2_r);
    sec.finish();
  }
  if (const json* c = root.child("comm_centric")) {
    Section sec(*c, "comm_centric");
    sec.read("r", s.bb.r);
    sec.read("epsilon", s.bb.epsilon);
    sec.read("n_s", s.bb.n_s);
    sec.read("max_expansions", s.bb.max_expansions);
    sec.read("relax_iterations", s.bb.relax.max_iter);
    sec.read("reduce_papr", s.reduce_papr);
    sec.read("thresholds", s.thresholds);
    sec.finish();
  }
  if (const json* c = root.child("sensing_centric")) {
    Section sec(*c, "sensing_centric");
    sec.read("delta_fraction", s.sc.delta_fraction);
    sec.read("lambda", s.sc.lambda);
    sec.read("a_norm", s.sc.a_norm);
    sec.read("i_m", s.sc.i_m);
    sec.read("j_m", s.sc.j_m);
    sec.read("eps1", s.sc.eps1);
    sec.read("eps2", s.sc.eps2);
    sec.read("delta_fractions", s.delta_fractions);
    sec.read("lambdas", s.lambdas);
    sec.finish();
  }
  if (const json* d = root.child("detection")) {
    Section sec(*d, "detection");
    sec.read("distance_m", s.target.distance);
    sec.read("speed_mps", s.target.speed);
    sec.read("gamma", s.cfar_gamma);
    sec.finish();
  }
  if (const json* o = root.child("outputs")) {
    Section sec(*o, "outputs");
    sec.read("surfaces", s.outputs.surfaces);
    sec.read("surface_binary", s.outputs.surface_binary);
    sec.read("exact_surface", s.outputs.exact_surface);
    sec.read("traces", s.outputs.traces);
    sec.read("detection", s.outputs.detection);
    sec.finish();
  }
  root.finish();
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidConfig("cannot open scenario file " + file.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw InvalidConfig(file.string() + ": " + e.what());
  }
  Scenario s = scenario_from_json(j);
  validate(s);
  return s;
}

std::vector<std::string> preset_names() {
  return {"fig4", "fig5a", "fig5b", "fig6", "fig7", "fig8"};
}

Scenario preset(const std::string& name) {
  Scenario s;
  s.name = name;
  if (name == "fig4") {
    s.designers = {Designer::comm_centric};
    s.scopes = {{60.0, 20.0}};
    s.seeds = {1};
    s.outputs.surfaces = true;
  } else if (name == "fig5a") {
    // PSLR against the speed scope at fixed distance scope.
    s.designers = {Designer::comm_centric, Designer::equal_power_baseline};
    s.scopes = {{60.0, 5.0}, {60.0, 10.0}, {60.0, 20.0}, {60.0, 30.0}, {60.0, 40.0}};
    s.seeds = {1, 2, 3};
    s.reduce_papr = false;
  } else if (name == "fig5b") {
    // PSLR and rate against the split threshold.
    s.designers = {Designer::comm_centric, Designer::equal_power_baseline};
    s.scopes = {{60.0, 20.0}};
    s.thresholds = {0.05, 0.1, 0.2, 0.4, 0.8};
    s.seeds = {1, 2, 3};
    s.reduce_papr = false;
  } else if (name == "fig6") {
    s.designers = {Designer::sensing_centric};
    s.snr_db = 10.0;
    s.scopes.clear();
    for (double d0 : {20.0, 40.0, 80.0, 150.0}) {
      for (double u0 : {10.0, 25.0, 50.0}) s.scopes.push_back({d0, u0});
    }
    s.ratios = {0.5, 1.0, 2.0};
    s.seeds = {1, 2, 3};
  } else if (name == "fig7") {
    s.designers = {Designer::sensing_centric};
    s.snr_db = 10.0;
    s.scopes = {{40.0, 50.0}};
    s.delta_fractions = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
    s.seeds = {1, 2, 3};
  } else if (name == "fig8") {
    s.designers = {Designer::sensing_centric};
    s.snr_db = 10.0;
    s.scopes = {{40.0, 50.0}};
    s.lambdas = {0.0, 0.02, 0.04, 0.06, 0.1};
    s.seeds = {1, 2, 3};
  } else {
    throw InvalidConfig("unknown preset '" + name + "'");
  }
  return s;
}

std::vector<RunPoint> expand(const Scenario& s) {
  std::vector<std::optional<double>> thresholds;
  for (double t : s.thresholds) thresholds.emplace_back(t);
  if (thresholds.empty()) thresholds.emplace_back(std::nullopt);
  std::vector<double> deltas = s.delta_fractions;
  if (deltas.empty()) deltas = {s.sc.delta_fraction};
  std::vector<double> lambdas = s.lambdas;
  if (lambdas.empty()) lambdas = {s.sc.lambda};

  std::vector<RunPoint> pts;
  for (auto seed : s.seeds) {
    for (auto d : s.designers) {
      const bool sc = d == Designer::sensing_centric;
      for (const auto& scope : s.scopes) {
        for (double ratio : s.ratios) {
          // Threshold sweeps only apply to the split designers; delta and lambda only to
          // the sensing-centric one.
          const auto th = sc ? std::vector<std::optional<double>>{std::nullopt} : thresholds;
          const auto ds = sc ? deltas : std::vector<double>{s.sc.delta_fraction};
          const auto ls = sc ? lambdas : std::vector<double>{s.sc.lambda};
          for (const auto& t : th) {
            for (double delta : ds) {
              for (double lambda : ls) {
                pts.push_back({pts.size(), seed, d, scope, ratio, t, delta, lambda});
              }
            }
          }
        }
      }
    }
  }
  return pts;
}

namespace {

ComplexGrid sensing_symbols(const DesignResult& r) {
  ComplexGrid s(r.p_r.rows(), r.p_r.cols());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = std::polar(std::sqrt(std::max(r.p_r[i], 0.0)), r.phases[i]);
  }
  return s;
}

}  // namespace

RunRecord execute(const Scenario& s, const RunPoint& pt) {
  const FrameConfig& cfg = s.frame;
  const PathSpec spec = s.channel == "fast" ? fast_fading_spec(s.paths) : slow_fading_spec(s.paths);
  const ComplexGrid h = sample_grid(gen_paths(spec, cfg, pt.seed), cfg);
  const Roi roi = make_roi(cfg, pt.scope.d0, pt.scope.u0);
  const double p_c = s.comm_budget();
  const double p_r = pt.ratio * p_c;
  const double s2 = s.sigma2_c();

  RunRecord rec;
  rec.point = pt;
  rec.wf_rate = comm_centric::allocate_comm(h, p_c, s2).rate;
  switch (pt.designer) {
    case Designer::comm_centric: {
      comm_centric::CcConfig cc;
      cc.bb = s.bb;
      cc.reduce_papr = s.reduce_papr;
      cc.threshold = pt.threshold;
      rec.design = comm_centric::design(h, p_c, p_r, s2, roi, cc);
      break;
    }
    case Designer::equal_power_baseline:
      rec.design = comm_centric::equal_power_baseline(h, p_c, p_r, s2, roi, pt.threshold);
      break;
    case Designer::sensing_centric: {
      auto sc = s.sc;
      sc.delta_fraction = pt.delta_fraction;
      sc.lambda = pt.lambda;
      auto res = sensing_centric::design(h, p_c, p_r, s2, roi, sc);
      rec.design = std::move(res.design);
      rec.trace = std::move(res.trace);
      break;
    }
  }

  if (s.outputs.surfaces || s.outputs.surface_binary) rec.surface = approx_aaf(rec.design.p_r);
  if (s.outputs.exact_surface && cfg.m_sym * cfg.n_c <= 1024) {
    const TimeSeries x = synthesize(sensing_symbols(rec.design), cfg, false, Normalization::raw);
    rec.exact_surface = exact_aaf(x, cfg);
    rec.pslr_exact_db = pslr_db(*rec.exact_surface, roi);
  }
  if (s.outputs.detection) {
    const ComplexGrid s_r = sensing_symbols(rec.design);
    const TimeSeries x = synthesize(s_r, cfg, true, Normalization::raw);
    const std::uint64_t noise_seed = pt.seed * 0x9E3779B97F4A7C15ULL + pt.id;
    const TimeSeries y = simulate_echo(x, cfg, s.target, s.sigma2_r, noise_seed, s.sigma2_r > 0.0);
    Periodogram pg = periodogram(s_r, y, cfg);
    // Default window, trimmed so it still fits frames with few symbols or subcarriers.
    kernels::CfarWindow w;
    auto fit = [](std::size_t& train, std::size_t& guard, std::size_t len) {
      while (2 * (train + guard) + 1 > len && train > 1) --train;
      while (2 * (train + guard) + 1 > len && guard > 0) --guard;
    };
    fit(w.train_nu, w.guard_nu, cfg.m_sym);
    fit(w.train_mu, w.guard_mu, cfg.n_c);
    pg.theta = cfar_threshold(pg, w);
    rec.detections = detect_and_localize(pg, pg.theta, s.cfar_gamma, cfg);
  }
  return rec;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string run_stem(const RunRecord& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "run_%04zu", r.point.id);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << data;
  if (!out) throw Error("write failed for " + p.string());
}

double median_papr(const DesignResult& d) {
  std::vector<double> v;
  for (double x : d.papr_db) {
    if (std::isfinite(x)) v.push_back(x);
  }
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

}  // namespace

void write_metrics_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << "seed,designer,d0_m,u0_mps,ratio_pr_pc,rate_bits,pslr_roi_db,papr_db_max,iters\n";
  for (const auto& r : records) {
    os << r.point.seed << ',' << designer_name(r.point.designer) << ','
       << fmt("%.6g", r.point.scope.d0) << ',' << fmt("%.6g", r.point.scope.u0) << ','
       << fmt("%.6g", r.point.ratio) << ',' << fmt("%.9e", r.design.rate) << ','
       << fmt("%.6f", r.design.pslr_db) << ',' << fmt("%.6f", max_papr_db(r.design)) << ','
       << r.design.iterations << '\n';
  }
}

void write_points_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << "id,seed,designer,d0_m,u0_mps,ratio_pr_pc,threshold,delta_fraction,lambda,rate_bits,"
        "wf_rate_bits,rate_ratio,pslr_roi_db,pslr_exact_db,papr_db_max,papr_db_median,"
        "sensing_res,iters,converged,detections\n";
  for (const auto& r : records) {
    const auto& p = r.point;
    os << p.id << ',' << p.seed << ',' << designer_name(p.designer) << ','
       << fmt("%.6g", p.scope.d0) << ',' << fmt("%.6g", p.scope.u0) << ','
       << fmt("%.6g", p.ratio) << ',' << (p.threshold ? fmt("%.6g", *p.threshold) : "") << ','
       << fmt("%.6g", p.delta_fraction) << ',' << fmt("%.6g", p.lambda) << ','
       << fmt("%.9e", r.design.rate) << ',' << fmt("%.9e", r.wf_rate) << ','
       << fmt("%.6f", r.design.rate / r.wf_rate) << ',' << fmt("%.6f", r.design.pslr_db) << ','
       << (r.pslr_exact_db ? fmt("%.6f", *r.pslr_exact_db) : "") << ','
       << fmt("%.6f", max_papr_db(r.design)) << ',' << fmt("%.6f", median_papr(r.design)) << ','
       << count_ones(r.design.u) << ',' << r.design.iterations << ','
       << (r.design.converged ? 1 : 0) << ',' << r.detections.size() << '\n';
  }
}

json summary_json(const Scenario& s, const std::vector<RunRecord>& records) {
  json j;
  j["scenario"] = to_json(s);
  json runs = json::array();
  for (const auto& r : records) {
    json e = to_json(r.design);
    e["id"] = r.point.id;
    e["seed"] = r.point.seed;
    e["designer"] = designer_name(r.point.designer);
    e["d0_m"] = r.point.scope.d0;
    e["u0_mps"] = r.point.scope.u0;
    e["ratio_pr_pc"] = r.point.ratio;
    if (r.point.threshold) e["threshold"] = *r.point.threshold;
    e["wf_rate_bits"] = r.wf_rate;
    runs.push_back(std::move(e));
  }
  j["runs"] = std::move(runs);
  return j;
}

std::vector<RunRecord> run_scenario(const Scenario& s, const std::filesystem::path& out_dir) {
  validate(s);
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto pts = expand(s);
  std::vector<RunRecord> records(pts.size());
  std::vector<std::string> errors(pts.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < pts.size(); ++i) {
    try {
      records[i] = execute(s, pts[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!errors[i].empty()) throw Error("run " + std::to_string(i) + ": " + errors[i]);
  }

  std::ostringstream metrics, points;
  write_metrics_csv(metrics, records);
  write_points_csv(points, records);
  write_file(out_dir / "metrics.csv", metrics.str());
  write_file(out_dir / "points.csv", points.str());
  write_file(out_dir / "summary.json", summary_json(s, records).dump(2) + "\n");

  for (const auto& r : records) {
    const std::string stem = run_stem(r);
    if (s.outputs.surfaces) {
      fs::create_directories(out_dir / "surfaces");
      std::ostringstream os;
      write_surface_csv(os, r.surface);
      write_file(out_dir / "surfaces" / (stem + ".csv"), os.str());
    }
    if (s.outputs.surface_binary) {
      fs::create_directories(out_dir / "surfaces");
      std::ostringstream os;
      write_surface_binary(os, r.surface);
      write_file(out_dir / "surfaces" / (stem + ".bin"), os.str());
    }
    if (r.exact_surface) {
      fs::create_directories(out_dir / "surfaces");
      std::ostringstream os;
      write_surface_csv(os, *r.exact_surface);
      write_file(out_dir / "surfaces" / (stem + "_exact.csv"), os.str());
    }
    if (s.outputs.traces && r.trace) {
      fs::create_directories(out_dir / "traces");
      std::ostringstream os;
      sensing_centric::write_trace_csv(os, *r.trace);
      write_file(out_dir / "traces" / (stem + ".csv"), os.str());
    }
    if (s.outputs.detection) {
      fs::create_directories(out_dir / "detections");
      std::ostringstream os;
      write_detections_csv(os, r.detections);
      write_file(out_dir / "detections" / (stem + ".csv"), os.str());
    }
  }
  return records;
}

}  // namespace isac
