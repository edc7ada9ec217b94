#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "isac/ambiguity.hpp"
#include "isac/design.hpp"
#include "isac/grid.hpp"
#include "isac/optim.hpp"

namespace isac::comm_centric {

struct CommAllocation {
  PowerGrid p_c;
  double threshold = 0.0;  // REs with |H|^2 <= threshold get no communication power
  double rate = 0.0;
};

/// Water-filling over every RE with gains |H|^2 / sigma2_c.
CommAllocation allocate_comm(const ComplexGrid& h, double p_bar_c, double sigma2_c);

/// Water-filling at a prescribed threshold instead of a prescribed budget; the budget
/// becomes sum over |H|^2 > threshold of (sigma2_c / threshold - sigma2_c / |H|^2).
CommAllocation allocate_comm_at_threshold(const ComplexGrid& h, double threshold,
                                          double sigma2_c);

/// U(m,k) = 1 iff |H(m,k)|^2 <= threshold.
IndicatorGrid split_res(const ComplexGrid& h, double threshold);

struct SensingAllocOptions {
  bool eta_weight = true;  // constrain |gamma * eta| rather than |gamma|
  optim::SubgradientOptions solver{1e-6, 3000, 0.0, 0, 2};
};

struct SensingAllocation {
  PowerGrid p_r;
  optim::SolveReport report;
};

/// Minimax sidelobe power allocation over the sensing REs with total p_bar_r.
/// Throws EmptySupport when u has no ones.
SensingAllocation allocate_sensing_power(const IndicatorGrid& u, double p_bar_r, const Roi& roi,
                                         const SensingAllocOptions& opts = {});

/// p_bar_r spread evenly over the sensing REs.
PowerGrid equal_power_allocation(const IndicatorGrid& u, double p_bar_r);

struct BbConfig {
  std::size_t r = 2;             // phase alphabet size
  double epsilon = 1e-3;         // gap on the mean-normalized peak power
  std::size_t n_s = 16;          // live-node cap
  std::size_t max_expansions = 20000;
  optim::SubgradientOptions relax{1e-4, 100, 0.0, 30, 0};

  bool operator==(const BbConfig&) const = default;
};

struct BbReport {
  double papr_db = 0.0;
  double upper = 0.0;  // incumbent normalized peak
  double lower = 0.0;  // smallest live lower bound at exit
  std::size_t expansions = 0;
  std::size_t relaxations = 0;
  bool gap_closed = false;
  std::vector<double> upper_trace;
};

struct PhaseResult {
  std::vector<double> phases;  // per subcarrier, 0 where no sensing power
  BbReport report;
};

/// Branch-and-bound phase search over the R-th roots of unity for one symbol.
PhaseResult reduce_papr_bb(std::span<const double> p_r_row, std::span<const std::uint8_t> u_row,
                           const BbConfig& bb);

struct CcConfig {
  BbConfig bb;
  SensingAllocOptions alloc;
  bool reduce_papr = true;
  std::optional<double> threshold;  // set to sweep the split threshold instead of p_bar_c
};

/// Steps 1-3: water-filling, RE split, minimax sensing power, per-symbol phase search.
DesignResult design(const ComplexGrid& h, double p_bar_c, double p_bar_r, double sigma2_c,
                    const Roi& roi, const CcConfig& cfg = {});

/// Same split as design() with equal sensing power and zero phases.
DesignResult equal_power_baseline(const ComplexGrid& h, double p_bar_c, double p_bar_r,
                                  double sigma2_c, const Roi& roi,
                                  std::optional<double> threshold = std::nullopt);

}  // namespace isac::comm_centric
