#include "isac/design.hpp"

#include <cmath>
#include <limits>

#include "isac/frame.hpp"

namespace isac {

double max_papr_db(const DesignResult& r) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double v : r.papr_db) {
    if (std::isfinite(v) && !(v <= best)) best = v;
  }
  return best;
}

std::vector<double> symbol_papr_db(const PowerGrid& p_r, const IndicatorGrid& u,
                                   const PowerGrid& phases) {
  require_same_shape(p_r, u, "symbol_papr_db");
  require_same_shape(p_r, phases, "symbol_papr_db");
  std::vector<double> out(p_r.rows(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t m = 0; m < p_r.rows(); ++m) {
    double sum = 0.0;
    for (std::size_t k = 0; k < p_r.cols(); ++k) sum += u(m, k) ? p_r(m, k) : 0.0;
    if (sum > 0.0) out[m] = papr_db(phases.row(m), p_r.row(m), u.row(m));
  }
  return out;
}

void fill_sidelobe_metrics(DesignResult& r, const Roi& roi) {
  const GammaGrid g = gamma_from_power(r.p_r);
  double side = 0.0;
  for (const auto& [nu, mu] : roi.sidelobe_cells()) side = std::max(side, std::abs(g.at(nu, mu)));
  r.roi_sidelobe_max = side;
  r.pslr_db = total(r.p_r) > 0.0 ? pslr_db(approx_aaf(r.p_r), roi)
                                 : std::numeric_limits<double>::quiet_NaN();
}

nlohmann::json to_json(const DesignResult& r) {
  nlohmann::json papr = nlohmann::json::array();
  for (double v : r.papr_db) {
    if (std::isfinite(v)) {
      papr.push_back(v);
    } else {
      papr.push_back(nullptr);
    }
  }
  nlohmann::json j;
  j["rate_bits"] = r.rate;
  j["pslr_roi_db"] = std::isfinite(r.pslr_db) ? nlohmann::json(r.pslr_db) : nlohmann::json();
  j["roi_sidelobe_max"] = r.roi_sidelobe_max;
  j["papr_db"] = papr;
  j["iterations"] = r.iterations;
  j["sensing_res"] = count_ones(r.u);
  j["comm_only"] = r.comm_only;
  j["converged"] = r.converged;
  return j;
}

}  // namespace isac
