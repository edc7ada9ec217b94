#pragma once

#include <cstddef>
#include <vector>

#include "isac/ambiguity.hpp"
#include "isac/grid.hpp"
#include "json.hpp"

namespace isac {

/// Output of either waveform designer.
struct DesignResult {
  IndicatorGrid u;
  PowerGrid p_r;
  PowerGrid p_c;
  PowerGrid phases;               // per-RE sensing phase (rad); 0 on communication REs
  double rate = 0.0;              // bits per frame
  double pslr_db = 0.0;           // approximate ambiguity, region of interest
  double roi_sidelobe_max = 0.0;  // max |gamma| over the region of interest minus origin
  std::vector<double> papr_db;    // per symbol; NaN where a symbol has no sensing power
  std::size_t iterations = 0;
  bool comm_only = false;         // no RE was left for sensing
  bool converged = true;
};

/// Largest finite entry of papr_db, or NaN when none.
double max_papr_db(const DesignResult& r);

/// Per-symbol PAPR of the sensing component with the designed phases.
std::vector<double> symbol_papr_db(const PowerGrid& p_r, const IndicatorGrid& u,
                                   const PowerGrid& phases);

/// PSLR and sidelobe maximum of the approximate ambiguity of p_r over the region of interest.
void fill_sidelobe_metrics(DesignResult& r, const Roi& roi);

/// Compact report: rate, PSLR, per-symbol PAPR, iteration count and flags.
nlohmann::json to_json(const DesignResult& r);

}  // namespace isac
