#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "isac/ambiguity.hpp"
#include "isac/grid.hpp"
#include "json.hpp"

namespace isac::optim {

/// Outcome of an iterative solve.
struct SolveReport {
  double objective = 0.0;
  std::size_t iterations = 0;
  double feasibility_residual = 0.0;
  double stationarity_residual = 0.0;
  bool converged = false;

  bool operator==(const SolveReport&) const = default;
};

nlohmann::json to_json(const SolveReport& r);
SolveReport report_from_json(const nlohmann::json& j);

// ---- feasible sets -------------------------------------------------------------------------

/// {x >= 0, x_i = 0 off support, sum x = total}. An empty support mask means "everywhere".
struct Simplex {
  double total = 1.0;
  std::vector<std::uint8_t> support;
};

/// lo <= x <= hi elementwise.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// x holds complex coordinates as (re, im) pairs; free coordinates lie in the closed unit
/// disk, frozen ones equal their pinned value.
struct UnitDisk {
  std::vector<std::uint8_t> frozen;
  std::vector<cplx> pinned;
};

/// Real m x n power grids (row-major) whose transform equals the locally perfect pattern on
/// the region of interest and its mirror: gamma(0,0) = p_bar, zero on the other cells.
struct AffineFourier {
  std::size_t m = 0;
  std::size_t n = 0;
  Roi roi;
  double p_bar = 0.0;
};

/// {x : <normal, x> <= offset}.
struct Halfspace {
  std::vector<double> normal;
  double offset = 0.0;
};

struct FeasibleSet;

/// Intersection of sets, projected with Dykstra's algorithm.
struct Intersection {
  std::vector<FeasibleSet> sets;
  double tol = 1e-10;
  std::size_t max_iter = 2000;
};

struct FeasibleSet {
  std::variant<Simplex, Box, UnitDisk, AffineFourier, Halfspace, Intersection> kind;
};

/// Euclidean projection in place. Throws DimensionMismatch for inconsistent descriptors.
void project(const FeasibleSet& set, std::span<double> x);

/// Euclidean distance from x to the set.
double distance(const FeasibleSet& set, std::span<const double> x);

struct ProjectionResult {
  std::vector<double> x;
  SolveReport report;
};

/// Dykstra's alternating projections. The report's feasibility residual is the largest
/// distance to any set; converged means it dropped to tol within max_iter sweeps.
ProjectionResult project_intersection(const std::vector<FeasibleSet>& sets,
                                      std::span<const double> x0, double tol,
                                      std::size_t max_iter);

// ---- water-filling -------------------------------------------------------------------------

struct WaterFill {
  std::vector<double> allocation;
  double level = 0.0;           // common value of P_i + 1/g_i over active entries
  double gain_threshold = 0.0;  // 1 / level; entries with g_i <= this stay empty
  std::size_t active = 0;
};

/// Maximizes sum log2(1 + P_i g_i) subject to sum P_i = total, P_i >= 0.
/// Ties in gain are broken by index. Throws EmptySupport if every gain is zero.
WaterFill water_fill(std::span<const double> gains, double total);

// ---- minimax modulus -----------------------------------------------------------------------

/// A family of real-affine complex maps c_i(x), x real.
class ModulusFunctionals {
 public:
  virtual ~ModulusFunctionals() = default;
  virtual std::size_t count() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual void evaluate(std::span<const double> x, std::span<cplx> out) const = 0;
  /// grad_j += Re(weight * d c_i / d x_j).
  virtual void accumulate_gradient(std::size_t i, cplx weight, std::span<double> grad) const = 0;
};

/// c = offset + coeffs * x with a dense row-major coefficient matrix.
class DenseFunctionals final : public ModulusFunctionals {
 public:
  DenseFunctionals(std::size_t count, std::size_t dimension);
  DenseFunctionals(std::vector<cplx> coeffs, std::vector<cplx> offset, std::size_t dimension);

  std::size_t count() const override { return offset_.size(); }
  std::size_t dimension() const override { return dim_; }
  void evaluate(std::span<const double> x, std::span<cplx> out) const override;
  void accumulate_gradient(std::size_t i, cplx weight, std::span<double> grad) const override;

  cplx& coeff(std::size_t i, std::size_t j) { return coeffs_[i * dim_ + j]; }
  cplx& offset(std::size_t i) { return offset_[i]; }

 private:
  std::vector<cplx> coeffs_;
  std::vector<cplx> offset_;
  std::size_t dim_ = 0;
};

struct SubgradientOptions {
  double tol = 1e-6;           // relative stall tolerance on the best objective
  std::size_t max_iter = 2000;
  double alpha0 = 0.0;         // 0 selects 0.1 * ||x0||
  std::size_t stall_window = 0;  // 0 selects max(50, max_iter / 10)
  std::size_t restarts = 0;    // extra passes from the best point with halved alpha0

  bool operator==(const SubgradientOptions&) const = default;
};

struct MinimaxResult {
  std::vector<double> x;
  SolveReport report;
  std::vector<double> best_trace;  // best objective after each iteration
};

/// Projected subgradient descent on max_i |c_i(x)| with normalized steps alpha0 / sqrt(t).
/// Returns the best iterate seen.
MinimaxResult minimize_max_modulus(const ModulusFunctionals& f, const FeasibleSet& set,
                                   std::span<const double> x0,
                                   const SubgradientOptions& opts = {});

// ---- concave ascent ------------------------------------------------------------------------

/// Returns f(x) and writes its gradient. May throw DomainError.
using ValueGradient = std::function<double(std::span<const double> x, std::span<double> grad)>;
using Projector = std::function<void(std::span<double> x)>;

struct AscentOptions {
  double tol = 1e-8;           // relative improvement that ends the ascent
  std::size_t max_iter = 500;
  double step0 = 1.0;
  double backtrack = 0.5;
  double armijo = 1e-4;
  double growth = 2.0;         // step expansion after an accepted step
  std::size_t max_backtracks = 60;

  bool operator==(const AscentOptions&) const = default;
};

struct AscentResult {
  std::vector<double> x;
  SolveReport report;
  std::vector<double> trace;  // objective after each accepted step, starting with f(x0)
};

/// Projected gradient ascent with Armijo backtracking along the projection arc.
AscentResult maximize_concave_pg(const ValueGradient& oracle, const Projector& projector,
                                 std::span<const double> x0, const AscentOptions& opts = {});
AscentResult maximize_concave_pg(const ValueGradient& oracle, const FeasibleSet& set,
                                 std::span<const double> x0, const AscentOptions& opts = {});

}  // namespace isac::optim
