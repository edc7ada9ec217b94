#include "isac/sensing_centric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>

#include "isac/channel.hpp"

namespace isac::sensing_centric {

namespace {

optim::FeasibleSet perfect_set(const Roi& roi, double p_bar_r) {
  return {optim::AffineFourier{roi.m(), roi.n(), roi, p_bar_r}};
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void write_trace_csv(std::ostream& os, const ScTrace& trace) {
  os << "iter,r,r_bar,u_churn\n";
  char buf[128];
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const auto& row = trace.rows[i];
    std::snprintf(buf, sizeof buf, "%zu,%.9e,%.9e,%zu\n", i + 1, row.r, row.r_bar, row.u_churn);
    os << buf;
  }
}

void pull_into_box(std::span<double> p, double upper) {
  if (p.empty()) return;
  double mean = 0.0;
  for (double v : p) mean += v;
  mean /= static_cast<double>(p.size());
  if (mean < 0.0 || mean > upper) throw DomainError("box cannot contain the mean power");
  double t = 1.0;
  for (double v : p) {
    if (v < 0.0) t = std::min(t, mean / (mean - v));
    if (v > upper) t = std::min(t, (upper - mean) / (v - mean));
  }
  if (t >= 1.0) return;
  for (double& v : p) v = mean + t * (v - mean);
}

LpInit init_gamma_lp(const ComplexGrid& h, const Roi& roi, double p_bar_r,
                     std::size_t iterations) {
  if (h.rows() != roi.m() || h.cols() != roi.n()) {
    throw DimensionMismatch("channel and region of interest differ in size");
  }
  if (!(p_bar_r > 0.0)) throw InvalidConfig("sensing power budget must be positive");
  const std::size_t len = h.size();
  const double uniform = p_bar_r / static_cast<double>(len);
  const auto v_set = perfect_set(roi, p_bar_r);

  std::vector<double> cost(len);
  for (std::size_t i = 0; i < len; ++i) cost[i] = std::norm(h[i]);
  double mean_cost = 0.0;
  for (double c : cost) mean_cost += c;
  mean_cost /= static_cast<double>(len);
  const double uniform_obj = uniform * mean_cost * static_cast<double>(len);

  // ADMM on x in V, z >= 0, x = z.
  const double rho = mean_cost > 0.0 ? mean_cost / uniform : 1.0;
  std::vector<double> x(len), z(len, uniform), w(len, 0.0);
  double primal = 0.0;
  std::size_t it = 0;
  for (; it < iterations; ++it) {
    for (std::size_t i = 0; i < len; ++i) x[i] = z[i] - w[i] - cost[i] / rho;
    optim::project(v_set, x);
    primal = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      z[i] = std::max(x[i] + w[i], 0.0);
      w[i] += x[i] - z[i];
      primal = std::max(primal, std::abs(x[i] - z[i]));
    }
  }
  std::vector<double> p = z;
  optim::project(v_set, p);
  pull_into_box(p, std::numeric_limits<double>::infinity());

  LpInit out;
  out.p_r = PowerGrid(h.rows(), h.cols());
  out.objective = dot(p, cost);
  out.report.iterations = it;
  out.report.feasibility_residual = primal;
  out.report.objective = out.objective;
  out.report.converged = primal <= 1e-6 * uniform;
  if (!(out.objective <= uniform_obj)) {
    std::fill(p.begin(), p.end(), uniform);
    out.objective = uniform_obj;
    out.fell_back = true;
  }
  for (std::size_t i = 0; i < len; ++i) out.p_r[i] = p[i];
  GammaGrid g = gamma_from_power(out.p_r);
  fix_roi_cells(g, roi, p_bar_r);
  out.gamma = enforce_centrohermitian(std::move(g));
  return out;
}

CommGivenU comm_alloc_given_u(const ComplexGrid& h, const IndicatorGrid& u, double p_bar_c,
                              double sigma2_c) {
  require_same_shape(h, u, "comm_alloc_given_u");
  if (!(p_bar_c > 0.0)) throw InvalidConfig("communication power budget must be positive");
  if (!(sigma2_c > 0.0)) throw InvalidConfig("sigma2_c must be positive");
  CommGivenU out;
  out.p_c = PowerGrid(h.rows(), h.cols());
  std::vector<double> gains(h.size(), 0.0);
  bool any = false;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!u[i]) {
      gains[i] = std::norm(h[i]) / sigma2_c;
      any = any || gains[i] > 0.0;
    }
  }
  if (!any) {
    out.no_comm = true;
    return out;
  }
  const auto wf = optim::water_fill(gains, p_bar_c);
  for (std::size_t i = 0; i < h.size(); ++i) out.p_c[i] = wf.allocation[i];
  out.level = wf.level;
  out.rate = achievable_rate(out.p_c, h, sigma2_c);
  return out;
}

double penalized_rate(const PowerGrid& p_r, const PowerGrid& p_c, const PowerGrid& gain,
                      double sigma2_c, double a_norm, double lambda) {
  double total_rate = 0.0;
  double penalty = 0.0;
  for (std::size_t i = 0; i < p_r.size(); ++i) {
    const double share = 1.0 - p_r[i] / a_norm;
    const double arg = 1.0 + share * p_c[i] * gain[i] / sigma2_c;
    if (!(arg > 0.0)) throw DomainError("log argument is not positive", i);
    total_rate += std::log2(arg);
    penalty += p_r[i] * share;
  }
  return total_rate - lambda * penalty;
}

MmStep mm_inner_step(const PowerGrid& p_prev, const PowerGrid& p_c, const ComplexGrid& h,
                     double sigma2_c, const Roi& roi, const ScConfig& sc, double a_norm) {
  require_same_shape(p_prev, p_c, "mm_inner_step");
  require_same_shape(p_prev, h, "mm_inner_step");
  if (!(a_norm > 0.0)) throw InvalidConfig("normalization A must be positive");
  const std::size_t len = p_prev.size();
  const double p_bar = total(p_prev);
  const auto v_set = perfect_set(roi, p_bar);
  const optim::FeasibleSet box{optim::Box{std::vector<double>(len, 0.0),
                                          std::vector<double>(len, a_norm)}};
  const std::vector<optim::FeasibleSet> both{v_set, box};

  std::vector<double> snr(len);
  for (std::size_t i = 0; i < len; ++i) snr[i] = p_c[i] * std::norm(h[i]) / sigma2_c;
  const double inv_ln2 = 1.0 / std::numbers::ln2;
  const double lambda = sc.lambda;

  // Linear minorant of the penalty at p_prev.
  auto surrogate = [&](std::span<const double> p, std::span<double> grad) {
    double value = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double arg = 1.0 + (1.0 - p[i] / a_norm) * snr[i];
      if (!(arg > 0.0)) throw DomainError("log argument is not positive", i);
      const double lin = 1.0 - 2.0 * p_prev[i] / a_norm;
      value += std::log2(arg) - lambda * lin * p[i];
      grad[i] = -snr[i] / a_norm / arg * inv_ln2 - lambda * lin;
    }
    return value;
  };
  auto projector = [&](std::span<double> y) {
    auto res = optim::project_intersection(both, y, 1e-9 * a_norm, sc.projection_sweeps);
    std::copy(res.x.begin(), res.x.end(), y.begin());
    optim::project(v_set, y);
    pull_into_box(y, a_norm);
  };

  const auto res = optim::maximize_concave_pg(surrogate, projector, p_prev.data(), sc.inner);
  MmStep out;
  out.p_r = PowerGrid(p_prev.rows(), p_prev.cols());
  std::copy(res.x.begin(), res.x.end(), out.p_r.data().begin());
  PowerGrid gain(p_prev.rows(), p_prev.cols());
  for (std::size_t i = 0; i < len; ++i) gain[i] = std::norm(h[i]);
  out.objective = penalized_rate(out.p_r, p_c, gain, sigma2_c, a_norm, lambda);
  out.report = res.report;
  return out;
}

IndicatorGrid update_indicator(const PowerGrid& p_r, double delta) {
  IndicatorGrid u(p_r.rows(), p_r.cols());
  for (std::size_t i = 0; i < p_r.size(); ++i) u[i] = p_r[i] > delta ? 1 : 0;
  return u;
}

ScResult design(const ComplexGrid& h, double p_bar_c, double p_bar_r, double sigma2_c,
                const Roi& roi, const ScConfig& sc) {
  if (sc.delta_fraction < 0.0 || sc.lambda < 0.0 || sc.a_norm < 0.0) {
    throw InvalidConfig("delta, lambda and A must be non-negative");
  }
  if (!(sc.eps1 > 0.0) || !(sc.eps2 > 0.0)) throw InvalidConfig("thresholds must be positive");
  if (sc.i_m == 0) throw InvalidConfig("need at least one outer iteration");

  const std::size_t len = h.size();
  const double per_re = 1.0 / static_cast<double>(len);
  PowerGrid gain(h.rows(), h.cols());
  for (std::size_t i = 0; i < len; ++i) gain[i] = std::norm(h[i]);

  const LpInit init = init_gamma_lp(h, roi, p_bar_r, sc.lp_iterations);
  ScResult out;
  PowerGrid p_r = init.p_r;
  double a_norm = sc.a_norm;
  if (a_norm == 0.0) a_norm = *std::max_element(p_r.data().begin(), p_r.data().end());
  if (a_norm < p_bar_r * per_re) throw InvalidConfig("A below the uniform power level");
  pull_into_box(p_r.data(), a_norm);
  out.a_norm = a_norm;
  out.delta = sensing_threshold(sc, a_norm);

  IndicatorGrid u = update_indicator(p_r, out.delta);
  struct Snapshot {
    IndicatorGrid u;
    PowerGrid p_r;
    CommGivenU comm;
  };
  std::optional<Snapshot> best;
  double r_prev = 0.0;
  bool converged = false;

  for (std::size_t i = 1; i <= sc.i_m; ++i) {
    const CommGivenU comm = comm_alloc_given_u(h, u, p_bar_c, sigma2_c);
    ++out.trace.outer_iterations;
    out.trace.outer_rates.push_back(comm.rate);
    if (!best || comm.rate > best->comm.rate) best = Snapshot{u, p_r, comm};
    if (i > 1 && std::abs(comm.rate - r_prev) * per_re < sc.eps1) {
      converged = true;
      break;
    }
    if (i == sc.i_m) break;
    r_prev = comm.rate;

    double r_bar_prev = penalized_rate(p_r, comm.p_c, gain, sigma2_c, a_norm, sc.lambda);
    for (std::size_t j = 1; j <= sc.j_m; ++j) {
      MmStep step = mm_inner_step(p_r, comm.p_c, h, sigma2_c, roi, sc, a_norm);
      p_r = std::move(step.p_r);
      ++out.trace.inner_iterations;
      out.trace.rows.push_back({i, j, comm.rate, step.objective, 0});
      const bool small = std::abs(step.objective - r_bar_prev) * per_re < sc.eps2;
      r_bar_prev = step.objective;
      if (small) break;
    }
    IndicatorGrid next = update_indicator(p_r, out.delta);
    std::size_t churn = 0;
    for (std::size_t k = 0; k < len; ++k) churn += next[k] != u[k];
    if (!out.trace.rows.empty()) out.trace.rows.back().u_churn = churn;
    u = std::move(next);
  }

  DesignResult& r = out.design;
  r.u = best->u;
  r.p_r = best->p_r;
  r.p_c = best->comm.p_c;
  r.rate = best->comm.rate;
  r.phases = PowerGrid(h.rows(), h.cols());
  r.comm_only = false;
  r.iterations = out.trace.total_iterations();
  r.converged = converged;
  r.papr_db = symbol_papr_db(r.p_r, r.u, r.phases);
  fill_sidelobe_metrics(r, roi);

  GammaGrid g = gamma_from_power(r.p_r);
  fix_roi_cells(g, roi, p_bar_r);
  out.gamma = enforce_centrohermitian(std::move(g));
  return out;
}

}  // namespace isac::sensing_centric
