#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "isac/ambiguity.hpp"
#include "isac/design.hpp"
#include "isac/grid.hpp"
#include "isac/optim.hpp"

namespace isac::sensing_centric {

struct ScConfig {
  double delta_fraction = 0.01;  // sensing threshold delta as a fraction of a_norm
  double lambda = 0.04;          // penalty weight
  double a_norm = 0.0;           // box bound A; 0 takes the largest initial power
  std::size_t i_m = 10;          // outer iterations
  std::size_t j_m = 10;          // inner iterations per outer iteration
  double eps1 = 1e-3;            // outer stop on |r(i) - r(i-1)|, bits per RE
  double eps2 = 1e-1;            // inner stop on |rbar(j) - rbar(j-1)|, bits per RE
  optim::AscentOptions inner{1e-6, 40, 1.0, 0.5, 1e-4, 2.0, 40};
  std::size_t projection_sweeps = 40;
  std::size_t lp_iterations = 400;

  bool operator==(const ScConfig&) const = default;
};

/// delta = delta_fraction * A.
inline double sensing_threshold(const ScConfig& sc, double a_norm) {
  return sc.delta_fraction * a_norm;
}

struct TraceRow {
  std::size_t outer = 0;
  std::size_t inner = 0;
  double r = 0.0;       // P12 rate of the current outer iteration, bits
  double r_bar = 0.0;   // penalized lower-bound objective after this inner step, bits
  std::size_t u_churn = 0;  // indicator flips at the end of the outer iteration
};

struct ScTrace {
  std::vector<TraceRow> rows;
  std::vector<double> outer_rates;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  std::size_t total_iterations() const { return outer_iterations + inner_iterations; }
};

void write_trace_csv(std::ostream& os, const ScTrace& trace);

/// Scales p toward the uniform grid of equal total, by the smallest amount that brings every
/// entry into [0, upper]. Preserves the affine Fourier constraints.
void pull_into_box(std::span<double> p, double upper);

/// Minimizes sum P |H|^2 over locally perfect, non-negative power grids with total p_bar_r.
/// Falls back to the uniform grid when the solver ends worse than it.
struct LpInit {
  PowerGrid p_r;
  GammaGrid gamma;
  double objective = 0.0;
  bool fell_back = false;
  optim::SolveReport report;
};
LpInit init_gamma_lp(const ComplexGrid& h, const Roi& roi, double p_bar_r,
                     std::size_t iterations = 400);

struct CommGivenU {
  PowerGrid p_c;
  double rate = 0.0;
  double level = 0.0;
  bool no_comm = false;  // every RE is sensing; zero rate
};

/// Water-filling restricted to the REs with U = 0.
CommGivenU comm_alloc_given_u(const ComplexGrid& h, const IndicatorGrid& u, double p_bar_c,
                              double sigma2_c);

/// Penalized rate sum log2(1 + (1 - P/A) P_c |H|^2 / s2) - lambda sum P (1 - P/A).
double penalized_rate(const PowerGrid& p_r, const PowerGrid& p_c, const PowerGrid& gain,
                      double sigma2_c, double a_norm, double lambda);

struct MmStep {
  PowerGrid p_r;
  double objective = 0.0;  // penalized rate at the returned point
  optim::SolveReport report;
};

/// One minorize-maximize step from p_prev over the locally perfect grids in [0, A].
MmStep mm_inner_step(const PowerGrid& p_prev, const PowerGrid& p_c, const ComplexGrid& h,
                     double sigma2_c, const Roi& roi, const ScConfig& sc, double a_norm);

/// U = 1 iff P_r > delta.
IndicatorGrid update_indicator(const PowerGrid& p_r, double delta);

struct ScResult {
  DesignResult design;
  ScTrace trace;
  GammaGrid gamma;
  double a_norm = 0.0;
  double delta = 0.0;
};

/// Alternating water-filling and minorize-maximize design; returns the best-rate iterate.
ScResult design(const ComplexGrid& h, double p_bar_c, double p_bar_r, double sigma2_c,
                const Roi& roi, const ScConfig& sc = {});

}  // namespace isac::sensing_centric
