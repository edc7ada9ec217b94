#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "isac/channel.hpp"
#include "isac/comm_centric.hpp"
#include "isac/frame.hpp"
#include "isac/sensing.hpp"
#include "isac/sensing_centric.hpp"
#include "json.hpp"

namespace isac {

enum class Designer { comm_centric, sensing_centric, equal_power_baseline };

const char* designer_name(Designer d);
Designer designer_from_name(const std::string& name);

struct Scope {
  double d0 = 0.0;  // m
  double u0 = 0.0;  // m/s
  bool operator==(const Scope&) const = default;
};

struct OutputSpec {
  bool surfaces = false;        // approximate ambiguity of each design, CSV
  bool surface_binary = false;  // same surfaces as raw little-endian doubles
  bool exact_surface = false;   // exact ambiguity too, only for small frames
  bool traces = true;           // sensing-centric convergence traces
  bool detection = false;       // echo simulation and CFAR detection per design
  bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
  std::string name = "scenario";
  FrameConfig frame = default_frame();
  std::string channel = "fast";  // "fast" or "slow"
  std::size_t paths = 8;
  std::vector<std::uint64_t> seeds{1};
  std::vector<Designer> designers{Designer::comm_centric};
  std::vector<Scope> scopes{{60.0, 20.0}};

  double snr_db = 0.0;                 // mean per-RE SNR at uniform communication power
  std::optional<double> p_bar_c;       // defaults to M * N_c
  std::vector<double> ratios{1.0};     // P_r / P_c budgets
  double sigma2_r = 1.0;

  comm_centric::BbConfig bb;
  bool reduce_papr = true;
  std::vector<double> thresholds;      // split threshold sweep; empty uses the budget
  sensing_centric::ScConfig sc;
  std::vector<double> delta_fractions; // empty uses sc.delta_fraction
  std::vector<double> lambdas;         // empty uses sc.lambda

  Target target{97.65625, 10.0};       // detection demo
  double cfar_gamma = 10.0;
  OutputSpec outputs;

  bool operator==(const Scenario&) const = default;

  double comm_budget() const;
  double sigma2_c() const;
};

/// Checks every field; throws InvalidConfig (or ScopeError) naming the offending key.
void validate(const Scenario& s);

nlohmann::json to_json(const Scenario& s);
/// Unknown keys are rejected. Missing keys keep their defaults.
Scenario scenario_from_json(const nlohmann::json& j);
/// Parses and validates a scenario file; syntax errors carry line and column.
Scenario load_scenario(const std::filesystem::path& file);

/// Built-in experiment setups: fig4, fig5a, fig5b, fig6, fig7, fig8.
Scenario preset(const std::string& name);
std::vector<std::string> preset_names();

/// One point of the scenario's sweep grid.
struct RunPoint {
  std::size_t id = 0;
  std::uint64_t seed = 0;
  Designer designer = Designer::comm_centric;
  Scope scope;
  double ratio = 1.0;
  std::optional<double> threshold;
  double delta_fraction = 0.0;
  double lambda = 0.0;
};

/// Sweep grid ordered by seed, then designer, scope, ratio, threshold, delta, lambda.
std::vector<RunPoint> expand(const Scenario& s);

struct RunRecord {
  RunPoint point;
  DesignResult design;
  double wf_rate = 0.0;  // unconstrained water-filling rate
  std::optional<double> pslr_exact_db;
  std::optional<sensing_centric::ScTrace> trace;
  AmbiguitySurface surface;
  std::optional<AmbiguitySurface> exact_surface;
  std::vector<Detection> detections;
};

/// Runs one sweep point.
RunRecord execute(const Scenario& s, const RunPoint& pt);

/// Runs every point (parallel across points) and writes metrics.csv, points.csv,
/// summary.json and the requested per-run files into out_dir. Returns the records in
/// sweep order.
std::vector<RunRecord> run_scenario(const Scenario& s, const std::filesystem::path& out_dir);

void write_metrics_csv(std::ostream& os, const std::vector<RunRecord>& records);
void write_points_csv(std::ostream& os, const std::vector<RunRecord>& records);
nlohmann::json summary_json(const Scenario& s, const std::vector<RunRecord>& records);

}  // namespace isac
