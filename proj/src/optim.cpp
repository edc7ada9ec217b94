#include "isac/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "isac/fft.hpp"
#include "isac/kernels.hpp"

namespace isac::optim {

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

void project_simplex(const Simplex& s, std::span<double> x) {
  if (!s.support.empty() && s.support.size() != x.size()) {
    throw DimensionMismatch("simplex support does not match the vector length");
  }
  if (!(s.total >= 0.0)) throw InvalidConfig("simplex total must be non-negative");
  std::vector<double> v;
  v.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (s.support.empty() || s.support[i]) v.push_back(x[i]);
  }
  if (v.empty()) throw EmptySupport("simplex support is empty");
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cum += sorted[k];
    const double t = (cum - s.total) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = (s.support.empty() || s.support[i]) ? std::max(x[i] - theta, 0.0) : 0.0;
  }
}

void project_box(const Box& b, std::span<double> x) {
  if (b.lo.size() != x.size() || b.hi.size() != x.size()) {
    throw DimensionMismatch("box bounds do not match the vector length");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (b.lo[i] > b.hi[i]) throw InvalidConfig("box has lo > hi at " + std::to_string(i));
    x[i] = std::clamp(x[i], b.lo[i], b.hi[i]);
  }
}

void project_disk(const UnitDisk& d, std::span<double> x) {
  if (x.size() != 2 * d.frozen.size() || d.pinned.size() != d.frozen.size()) {
    throw DimensionMismatch("unit-disk descriptor does not match the vector length");
  }
  for (std::size_t k = 0; k < d.frozen.size(); ++k) {
    if (d.frozen[k]) {
      x[2 * k] = d.pinned[k].real();
      x[2 * k + 1] = d.pinned[k].imag();
      continue;
    }
    const double r = std::hypot(x[2 * k], x[2 * k + 1]);
    if (r > 1.0) {
      x[2 * k] /= r;
      x[2 * k + 1] /= r;
    }
  }
}

void project_affine_fourier(const AffineFourier& a, std::span<double> x) {
  const std::size_t m = a.m;
  const std::size_t n = a.n;
  if (x.size() != m * n || a.roi.m() != m || a.roi.n() != n) {
    throw DimensionMismatch("affine-Fourier descriptor does not match the vector length");
  }
  std::vector<cplx> g(x.begin(), x.end());
  fft::transform_rows(g, m, n, fft::Direction::forward);
  fft::transform_cols(g, m, n, fft::Direction::backward);

  // Residual of the constraint on the fixed cells, zero elsewhere.
  std::vector<cplx> r(m * n);
  GammaGrid idx(m, n);
  for (const auto& [nu, mu] : a.roi.cells()) {
    const cplx target = (nu == 0 && mu == 0) ? cplx(a.p_bar, 0.0) : cplx{};
    const std::size_t i = idx.index(nu, mu);
    const std::size_t j = idx.index(-nu, -mu);
    r[i] = g[i] - target;
    r[j] = g[j] - std::conj(target);
  }
  fft::transform_rows(r, m, n, fft::Direction::backward);
  fft::transform_cols(r, m, n, fft::Direction::forward);
  const double scale = 1.0 / static_cast<double>(m * n);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= r[i].real() * scale;
}

void project_halfspace(const Halfspace& h, std::span<double> x) {
  if (h.normal.size() != x.size()) {
    throw DimensionMismatch("halfspace normal does not match the vector length");
  }
  const double nn = std::inner_product(h.normal.begin(), h.normal.end(), h.normal.begin(), 0.0);
  if (nn == 0.0) {
    if (h.offset < 0.0) throw InvalidConfig("empty halfspace");
    return;
  }
  const double excess = std::inner_product(x.begin(), x.end(), h.normal.begin(), 0.0) - h.offset;
  if (excess <= 0.0) return;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= excess / nn * h.normal[i];
}

}  // namespace

nlohmann::json to_json(const SolveReport& r) {
  return {{"objective", r.objective},
          {"iterations", r.iterations},
          {"feasibility_residual", r.feasibility_residual},
          {"stationarity_residual", r.stationarity_residual},
          {"converged", r.converged}};
}

SolveReport report_from_json(const nlohmann::json& j) {
  SolveReport r;
  r.objective = j.at("objective").get<double>();
  r.iterations = j.at("iterations").get<std::size_t>();
  r.feasibility_residual = j.at("feasibility_residual").get<double>();
  r.stationarity_residual = j.at("stationarity_residual").get<double>();
  r.converged = j.at("converged").get<bool>();
  return r;
}

void project(const FeasibleSet& set, std::span<double> x) {
  std::visit(
      [&x](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Simplex>) {
          project_simplex(s, x);
        } else if constexpr (std::is_same_v<T, Box>) {
          project_box(s, x);
        } else if constexpr (std::is_same_v<T, UnitDisk>) {
          project_disk(s, x);
        } else if constexpr (std::is_same_v<T, AffineFourier>) {
          project_affine_fourier(s, x);
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          project_halfspace(s, x);
        } else {
          auto res = project_intersection(s.sets, x, s.tol, s.max_iter);
          std::copy(res.x.begin(), res.x.end(), x.begin());
        }
      },
      set.kind);
}

double distance(const FeasibleSet& set, std::span<const double> x) {
  std::vector<double> p(x.begin(), x.end());
  project(set, p);
  return dist2(p, x);
}

ProjectionResult project_intersection(const std::vector<FeasibleSet>& sets,
                                      std::span<const double> x0, double tol,
                                      std::size_t max_iter) {
  ProjectionResult res{std::vector<double>(x0.begin(), x0.end()), {}};
  if (sets.empty()) {
    res.report.converged = true;
    return res;
  }
  auto& x = res.x;
  const std::size_t n = x.size();
  std::vector<std::vector<double>> incr(sets.size(), std::vector<double>(n, 0.0));
  std::vector<double> y(n);

  auto worst_distance = [&] {
    double worst = 0.0;
    for (const auto& s : sets) worst = std::max(worst, distance(s, x));
    return worst;
  };

  double resid = worst_distance();
  std::size_t it = 0;
  while (resid > tol && it < max_iter) {
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = 0; j < n; ++j) y[j] = x[j] + incr[i][j];
      x = y;
      project(sets[i], x);
      for (std::size_t j = 0; j < n; ++j) incr[i][j] = y[j] - x[j];
    }
    ++it;
    resid = worst_distance();
  }
  res.report.iterations = it;
  res.report.feasibility_residual = resid;
  res.report.converged = resid <= tol;
  return res;
}

WaterFill water_fill(std::span<const double> gains, double total) {
  if (!(total > 0.0)) throw InvalidConfig("water-filling needs a positive power budget");
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (gains[i] < 0.0 || !std::isfinite(gains[i])) {
      throw DomainError("gain must be finite and non-negative", i);
    }
    if (gains[i] > 0.0) order.push_back(i);
  }
  if (order.empty()) throw EmptySupport("every gain is zero; nothing to allocate");
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });

  double inv_sum = 0.0;
  double level = 0.0;
  std::size_t active = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    inv_sum += 1.0 / gains[order[k]];
    const double cand = (total + inv_sum) / static_cast<double>(k + 1);
    const bool next_stays_dry = k + 1 == order.size() || cand <= 1.0 / gains[order[k + 1]];
    if (next_stays_dry) {
      level = cand;
      active = k + 1;
      break;
    }
  }
  WaterFill wf;
  wf.allocation.assign(gains.size(), 0.0);
  wf.level = level;
  wf.gain_threshold = 1.0 / level;
  wf.active = active;
  for (std::size_t k = 0; k < active; ++k) {
    const std::size_t i = order[k];
    wf.allocation[i] = std::max(level - 1.0 / gains[i], 0.0);
  }
  return wf;
}

DenseFunctionals::DenseFunctionals(std::size_t count, std::size_t dimension)
    : coeffs_(count * dimension), offset_(count), dim_(dimension) {}

DenseFunctionals::DenseFunctionals(std::vector<cplx> coeffs, std::vector<cplx> offset,
                                   std::size_t dimension)
    : coeffs_(std::move(coeffs)), offset_(std::move(offset)), dim_(dimension) {
  if (coeffs_.size() != offset_.size() * dim_) {
    throw DimensionMismatch("coefficient matrix does not match count x dimension");
  }
}

void DenseFunctionals::evaluate(std::span<const double> x, std::span<cplx> out) const {
  if (x.size() != dim_ || out.size() != offset_.size()) {
    throw DimensionMismatch("functional evaluation size mismatch");
  }
  kernels::dense_affine(coeffs_, offset_, x, out);
}

void DenseFunctionals::accumulate_gradient(std::size_t i, cplx weight,
                                           std::span<double> grad) const {
  const cplx* row = coeffs_.data() + i * dim_;
  for (std::size_t j = 0; j < dim_; ++j) grad[j] += (weight * row[j]).real();
}

MinimaxResult minimize_max_modulus(const ModulusFunctionals& f, const FeasibleSet& set,
                                   std::span<const double> x0, const SubgradientOptions& opts) {
  const std::size_t dim = f.dimension();
  if (x0.size() != dim) throw DimensionMismatch("x0 does not match the functional dimension");
  MinimaxResult res;
  std::vector<double> x(x0.begin(), x0.end());
  project(set, x);

  std::vector<cplx> vals(f.count());
  std::vector<double> grad(dim);
  auto eval = [&](std::span<const double> pt, std::size_t& arg) {
    f.evaluate(pt, vals);
    double peak = 0.0;
    arg = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double a = std::abs(vals[i]);
      if (a > peak) {
        peak = a;
        arg = i;
      }
    }
    return peak;
  };

  std::size_t arg = 0;
  double best = eval(x, arg);
  res.x = x;
  double alpha0 = opts.alpha0 > 0.0 ? opts.alpha0 : 0.1 * norm2(x);
  if (!(alpha0 > 0.0)) alpha0 = 0.1;
  const std::size_t window =
      opts.stall_window ? opts.stall_window : std::max<std::size_t>(50, opts.max_iter / 10);

  bool converged = false;
  double last_step = 0.0;
  std::size_t total_iter = 0;
  for (std::size_t pass = 0; pass <= opts.restarts && !converged; ++pass) {
    x = res.x;
    double cur = eval(x, arg);
    const double a0 = alpha0 / std::pow(2.0, static_cast<double>(pass));
    const std::size_t trace_start = res.best_trace.size();
    for (std::size_t t = 1; t <= opts.max_iter; ++t) {
      if (cur == 0.0) {
        converged = true;
        break;
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      f.accumulate_gradient(arg, std::conj(vals[arg]) / cur, grad);
      const double gn = norm2(grad);
      if (gn == 0.0) {
        converged = true;
        break;
      }
      last_step = a0 / std::sqrt(static_cast<double>(t));
      for (std::size_t j = 0; j < dim; ++j) x[j] -= last_step * grad[j] / gn;
      project(set, x);
      cur = eval(x, arg);
      ++total_iter;
      if (cur < best) {
        best = cur;
        res.x = x;
      }
      res.best_trace.push_back(best);
      const std::size_t done = res.best_trace.size() - trace_start;
      if (done > window) {
        const double before = res.best_trace[res.best_trace.size() - 1 - window];
        if (before - best <= opts.tol * before) {
          converged = pass == opts.restarts;
          break;
        }
      }
    }
  }
  res.report.objective = best;
  res.report.iterations = total_iter;
  res.report.feasibility_residual = distance(set, res.x);
  res.report.stationarity_residual = last_step;
  res.report.converged = converged;
  return res;
}

AscentResult maximize_concave_pg(const ValueGradient& oracle, const Projector& projector,
                                 std::span<const double> x0, const AscentOptions& opts) {
  const std::size_t n = x0.size();
  AscentResult res;
  res.x.assign(x0.begin(), x0.end());
  projector(res.x);
  std::vector<double> g(n), gy(n), y(n);
  double fx = oracle(res.x, g);
  res.trace.push_back(fx);
  double step = opts.step0;
  bool converged = false;
  std::size_t it = 0;
  for (; it < opts.max_iter; ++it) {
    bool accepted = false;
    double fy = fx;
    for (std::size_t bt = 0; bt < opts.max_backtracks; ++bt) {
      for (std::size_t j = 0; j < n; ++j) y[j] = res.x[j] + step * g[j];
      projector(y);
      double lin = 0.0;
      double moved = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        lin += g[j] * (y[j] - res.x[j]);
        moved = std::max(moved, std::abs(y[j] - res.x[j]));
      }
      if (moved == 0.0) break;  // stationary
      fy = oracle(y, gy);
      if (fy >= fx + opts.armijo * lin) {
        accepted = true;
        break;
      }
      step *= opts.backtrack;
    }
    if (!accepted) {
      converged = true;
      break;
    }
    const double gain = fy - fx;
    res.x.swap(y);
    g.swap(gy);
    fx = fy;
    res.trace.push_back(fx);
    step *= opts.growth;
    if (gain <= opts.tol * std::max(1.0, std::abs(fx))) {
      converged = true;
      ++it;
      break;
    }
  }
  // Projected-gradient residual with a unit step.
  for (std::size_t j = 0; j < n; ++j) y[j] = res.x[j] + g[j];
  projector(y);
  res.report.objective = fx;
  res.report.iterations = it;
  res.report.stationarity_residual = dist2(y, res.x);
  res.report.converged = converged;
  return res;
}

AscentResult maximize_concave_pg(const ValueGradient& oracle, const FeasibleSet& set,
                                 std::span<const double> x0, const AscentOptions& opts) {
  AscentResult res = maximize_concave_pg(
      oracle, [&set](std::span<double> x) { project(set, x); }, x0, opts);
  res.report.feasibility_residual = distance(set, res.x);
  return res;
}

}  // namespace isac::optim
