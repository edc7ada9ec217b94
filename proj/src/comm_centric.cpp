#include "isac/comm_centric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "isac/channel.hpp"
#include "isac/fft.hpp"

namespace isac::comm_centric {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^{j 2 pi num / den} with the argument reduced to one turn first.
cplx turn(long num, long den) {
  const long r = ((num % den) + den) % den;
  return std::polar(1.0, kTwoPi * static_cast<double>(r) / static_cast<double>(den));
}

struct Coord {
  std::size_t k;
  double amp;  // sqrt of the RE power
};

// Spectrum of one symbol's sensing component: c_n = offset_n + sum_j amp_j a_j e^{-j 2 pi n k_j / N}
// over the free coordinates, evaluated with one FFT. x holds (re, im) pairs of the free a_j.
class SpectrumFunctionals final : public optim::ModulusFunctionals {
 public:
  SpectrumFunctionals(const std::vector<Coord>& coords, std::size_t first_free,
                      const std::vector<cplx>& twiddle, std::vector<cplx> offset)
      : coords_(coords), first_(first_free), twiddle_(twiddle), offset_(std::move(offset)) {}

  std::size_t count() const override { return offset_.size(); }
  std::size_t dimension() const override { return 2 * (coords_.size() - first_); }

  void evaluate(std::span<const double> x, std::span<cplx> out) const override {
    std::fill(out.begin(), out.end(), cplx{});
    for (std::size_t j = first_; j < coords_.size(); ++j) {
      const std::size_t v = 2 * (j - first_);
      out[coords_[j].k] += coords_[j].amp * cplx(x[v], x[v + 1]);
    }
    fft::transform(out, fft::Direction::forward);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += offset_[t];
  }

  void accumulate_gradient(std::size_t i, cplx weight, std::span<double> grad) const override {
    const std::size_t n = offset_.size();
    for (std::size_t j = first_; j < coords_.size(); ++j) {
      const cplx w = weight * coords_[j].amp * twiddle_[(i * coords_[j].k) % n];
      const std::size_t v = 2 * (j - first_);
      grad[v] += w.real();
      grad[v + 1] -= w.imag();
    }
  }

 private:
  const std::vector<Coord>& coords_;
  std::size_t first_;
  const std::vector<cplx>& twiddle_;
  std::vector<cplx> offset_;
};

class PeakEvaluator {
 public:
  PeakEvaluator(const std::vector<Coord>& coords, std::size_t n, std::size_t r)
      : coords_(coords), n_(n), roots_(r), twiddle_(n), buf_(n) {
    for (std::size_t i = 0; i < r; ++i) roots_[i] = turn(static_cast<long>(i), static_cast<long>(r));
    for (std::size_t i = 0; i < n; ++i) twiddle_[i] = turn(-static_cast<long>(i), static_cast<long>(n));
    for (const auto& c : coords) power_ += c.amp * c.amp;
  }

  double power() const { return power_; }
  const cplx& root(std::size_t i) const { return roots_[i]; }
  const std::vector<cplx>& twiddle() const { return twiddle_; }

  double normalized_peak(const std::vector<std::size_t>& assign) {
    std::fill(buf_.begin(), buf_.end(), cplx{});
    for (std::size_t j = 0; j < coords_.size(); ++j) {
      buf_[coords_[j].k] += coords_[j].amp * roots_[assign[j]];
    }
    fft::transform(buf_, fft::Direction::forward);
    double peak = 0.0;
    for (const auto& v : buf_) peak = std::max(peak, std::norm(v));
    return peak / power_;
  }

  // Adds coordinate j pinned to root r into a spectrum offset.
  void pin(std::vector<cplx>& offset, std::size_t j, std::size_t r) const {
    const cplx a = coords_[j].amp * roots_[r];
    for (std::size_t t = 0; t < n_; ++t) offset[t] += a * twiddle_[(t * coords_[j].k) % n_];
  }

  std::size_t nearest_root(cplx z) const {
    if (z == cplx{}) return 0;
    const double r = static_cast<double>(roots_.size());
    const long idx = std::lround(std::arg(z) / kTwoPi * r);
    const long lr = static_cast<long>(roots_.size());
    return static_cast<std::size_t>(((idx % lr) + lr) % lr);
  }

 private:
  const std::vector<Coord>& coords_;
  std::size_t n_;
  std::vector<cplx> roots_;
  std::vector<cplx> twiddle_;  // e^{-j 2 pi i / N}
  std::vector<cplx> buf_;
  double power_ = 0.0;
};

struct Node {
  std::vector<std::size_t> prefix;
  std::vector<cplx> relaxed;  // full-length relaxed point (fixed coordinates included)
  std::vector<cplx> offset;   // spectrum of the fixed prefix
  double lower = 0.0;
  std::size_t seq = 0;
};

}  // namespace

CommAllocation allocate_comm(const ComplexGrid& h, double p_bar_c, double sigma2_c) {
  if (!(p_bar_c > 0.0)) throw InvalidConfig("communication power budget must be positive");
  if (!(sigma2_c > 0.0)) throw InvalidConfig("sigma2_c must be positive");
  std::vector<double> gains(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) gains[i] = std::norm(h[i]) / sigma2_c;
  const auto wf = optim::water_fill(gains, p_bar_c);
  CommAllocation out;
  out.p_c = PowerGrid(h.rows(), h.cols());
  for (std::size_t i = 0; i < h.size(); ++i) out.p_c[i] = wf.allocation[i];
  out.threshold = sigma2_c * wf.gain_threshold;
  out.rate = achievable_rate(out.p_c, h, sigma2_c);
  return out;
}

CommAllocation allocate_comm_at_threshold(const ComplexGrid& h, double threshold,
                                          double sigma2_c) {
  if (!(threshold > 0.0)) throw InvalidConfig("split threshold must be positive");
  if (!(sigma2_c > 0.0)) throw InvalidConfig("sigma2_c must be positive");
  CommAllocation out;
  out.p_c = PowerGrid(h.rows(), h.cols());
  out.threshold = threshold;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double g = std::norm(h[i]);
    if (g > threshold) out.p_c[i] = sigma2_c / threshold - sigma2_c / g;
  }
  out.rate = achievable_rate(out.p_c, h, sigma2_c);
  return out;
}

IndicatorGrid split_res(const ComplexGrid& h, double threshold) {
  IndicatorGrid u(h.rows(), h.cols());
  for (std::size_t i = 0; i < h.size(); ++i) u[i] = std::norm(h[i]) <= threshold ? 1 : 0;
  return u;
}

PowerGrid equal_power_allocation(const IndicatorGrid& u, double p_bar_r) {
  const std::size_t k = count_ones(u);
  if (k == 0) throw EmptySupport("no sensing REs");
  PowerGrid p(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.size(); ++i) p[i] = u[i] ? p_bar_r / static_cast<double>(k) : 0.0;
  return p;
}

SensingAllocation allocate_sensing_power(const IndicatorGrid& u, double p_bar_r, const Roi& roi,
                                         const SensingAllocOptions& opts) {
  if (!(p_bar_r > 0.0)) throw InvalidConfig("sensing power budget must be positive");
  if (u.rows() != roi.m() || u.cols() != roi.n()) {
    throw DimensionMismatch("indicator and region of interest differ in size");
  }
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i]) support.push_back(i);
  }
  if (support.empty()) throw EmptySupport("no sensing REs to allocate power to");

  const std::size_t m = u.rows();
  const std::size_t n = u.cols();
  const auto cells = roi.sidelobe_cells();
  const std::size_t dim = support.size();
  std::vector<double> x0(dim, p_bar_r / static_cast<double>(dim));

  SensingAllocation out{PowerGrid(m, n), {}};
  if (cells.empty()) {
    for (std::size_t j = 0; j < dim; ++j) out.p_r[support[j]] = x0[j];
    out.report.converged = true;
    return out;
  }

  optim::DenseFunctionals f(cells.size(), dim);
  const long mn = static_cast<long>(m * n);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [nu, mu] = cells[c];
    const cplx w = opts.eta_weight ? eta_factor(nu, m, n) : cplx(1.0, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
      const long row = static_cast<long>(support[j] / n);
      const long col = static_cast<long>(support[j] % n);
      // e^{-j 2 pi mu k / N} e^{j 2 pi nu m / M} over the common denominator M N.
      f.coeff(c, j) = w * turn(static_cast<long>(nu) * row * static_cast<long>(n) -
                                   static_cast<long>(mu) * col * static_cast<long>(m),
                               mn);
    }
  }
  optim::FeasibleSet simplex{optim::Simplex{p_bar_r, {}}};
  const auto res = optim::minimize_max_modulus(f, simplex, x0, opts.solver);
  for (std::size_t j = 0; j < dim; ++j) out.p_r[support[j]] = res.x[j];
  out.report = res.report;
  return out;
}

PhaseResult reduce_papr_bb(std::span<const double> p_r_row, std::span<const std::uint8_t> u_row,
                           const BbConfig& bb) {
  if (p_r_row.size() != u_row.size()) throw DimensionMismatch("power and indicator rows differ");
  if (bb.r < 2) throw InvalidConfig("phase alphabet needs at least two points");
  if (!(bb.epsilon > 0.0)) throw InvalidConfig("epsilon must be positive");
  if (bb.n_s < 1) throw InvalidConfig("live-node cap must be at least 1");

  const std::size_t n = p_r_row.size();
  std::vector<Coord> coords;
  for (std::size_t k = 0; k < n; ++k) {
    if (u_row[k] && p_r_row[k] > 0.0) coords.push_back({k, std::sqrt(p_r_row[k])});
  }
  if (coords.empty()) throw EmptySupport("symbol has no sensing power");
  std::stable_sort(coords.begin(), coords.end(),
                   [](const Coord& a, const Coord& b) { return a.amp > b.amp; });

  const std::size_t dim = coords.size();
  PeakEvaluator eval(coords, n, bb.r);
  PhaseResult out;
  out.phases.assign(n, 0.0);
  auto& rep = out.report;

  std::vector<std::size_t> incumbent(dim, 0);
  double upper = eval.normalized_peak(incumbent);
  rep.upper_trace.push_back(upper);

  auto round_from = [&](const std::vector<std::size_t>& prefix, const std::vector<cplx>& relaxed) {
    std::vector<std::size_t> a(prefix);
    for (std::size_t j = prefix.size(); j < dim; ++j) a.push_back(eval.nearest_root(relaxed[j]));
    return a;
  };

  std::vector<Node> live;
  std::size_t seq = 0;
  live.push_back({{}, std::vector<cplx>(dim), std::vector<cplx>(n), 0.0, seq++});

  while (!live.empty() && rep.expansions < bb.max_expansions) {
    auto pick = live.begin();
    for (auto it = live.begin(); it != live.end(); ++it) {
      if (it->lower < pick->lower || (it->lower == pick->lower && it->seq < pick->seq)) pick = it;
    }
    if (upper - pick->lower <= bb.epsilon) break;
    Node node = std::move(*pick);
    live.erase(pick);
    if (node.prefix.size() == dim) continue;
    ++rep.expansions;

    for (std::size_t r = 0; r < bb.r; ++r) {
      Node child;
      child.prefix = node.prefix;
      child.prefix.push_back(r);
      child.relaxed = node.relaxed;
      const std::size_t fixed = child.prefix.size();
      child.relaxed[fixed - 1] = eval.root(r);
      child.offset = node.offset;
      eval.pin(child.offset, fixed - 1, r);
      if (fixed == dim) {
        child.lower = eval.normalized_peak(child.prefix);
      } else {
        const SpectrumFunctionals f(coords, fixed, eval.twiddle(), child.offset);
        std::vector<double> x0(2 * (dim - fixed));
        for (std::size_t j = fixed; j < dim; ++j) {
          x0[2 * (j - fixed)] = child.relaxed[j].real();
          x0[2 * (j - fixed) + 1] = child.relaxed[j].imag();
        }
        optim::FeasibleSet disk{optim::UnitDisk{std::vector<std::uint8_t>(dim - fixed, 0),
                                                std::vector<cplx>(dim - fixed)}};
        auto sol = optim::minimize_max_modulus(f, disk, x0, bb.relax);
        ++rep.relaxations;
        for (std::size_t j = fixed; j < dim; ++j) {
          child.relaxed[j] = cplx(sol.x[2 * (j - fixed)], sol.x[2 * (j - fixed) + 1]);
        }
        child.lower = sol.report.objective * sol.report.objective / eval.power();
      }
      const auto rounded = round_from(child.prefix, child.relaxed);
      const double cand = eval.normalized_peak(rounded);
      if (cand < upper) {
        upper = cand;
        incumbent = rounded;
      }
      rep.upper_trace.push_back(upper);
      if (child.lower <= upper) {
        child.seq = seq++;
        live.push_back(std::move(child));
      }
    }
    std::erase_if(live, [&](const Node& nd) { return nd.lower > upper; });
    while (live.size() > bb.n_s) {
      auto worst = live.begin();
      for (auto it = live.begin(); it != live.end(); ++it) {
        if (it->lower > worst->lower || (it->lower == worst->lower && it->seq > worst->seq)) {
          worst = it;
        }
      }
      live.erase(worst);
    }
  }

  double lower = upper;
  for (const auto& nd : live) lower = std::min(lower, nd.lower);
  rep.upper = upper;
  rep.lower = lower;
  rep.gap_closed = upper - lower <= bb.epsilon;
  rep.papr_db = 10.0 * std::log10(upper);
  for (std::size_t j = 0; j < dim; ++j) {
    out.phases[coords[j].k] = kTwoPi * static_cast<double>(incumbent[j]) / static_cast<double>(bb.r);
  }
  return out;
}

namespace {

DesignResult assemble(const ComplexGrid& h, const CommAllocation& alloc) {
  DesignResult r;
  r.p_c = alloc.p_c;
  r.u = split_res(h, alloc.threshold);
  // Boundary ties follow the allocation so the supports stay disjoint.
  for (std::size_t i = 0; i < r.u.size(); ++i) {
    if (r.p_c[i] > 0.0) r.u[i] = 0;
  }
  r.p_r = PowerGrid(h.rows(), h.cols());
  r.phases = PowerGrid(h.rows(), h.cols());
  r.rate = alloc.rate;
  r.comm_only = count_ones(r.u) == 0;
  r.papr_db.assign(h.rows(), std::numeric_limits<double>::quiet_NaN());
  r.pslr_db = std::numeric_limits<double>::quiet_NaN();
  return r;
}

CommAllocation step_one(const ComplexGrid& h, double p_bar_c, double sigma2_c,
                        std::optional<double> threshold) {
  return threshold ? allocate_comm_at_threshold(h, *threshold, sigma2_c)
                   : allocate_comm(h, p_bar_c, sigma2_c);
}

}  // namespace

DesignResult design(const ComplexGrid& h, double p_bar_c, double p_bar_r, double sigma2_c,
                    const Roi& roi, const CcConfig& cfg) {
  const auto alloc = step_one(h, p_bar_c, sigma2_c, cfg.threshold);
  DesignResult r = assemble(h, alloc);
  if (r.comm_only) return r;

  const auto sens = allocate_sensing_power(r.u, p_bar_r, roi, cfg.alloc);
  r.p_r = sens.p_r;
  r.iterations = sens.report.iterations;
  r.converged = sens.report.converged;

  if (cfg.reduce_papr) {
    const long rows = static_cast<long>(h.rows());
#pragma omp parallel for schedule(dynamic)
    for (long m = 0; m < rows; ++m) {
      const auto row = static_cast<std::size_t>(m);
      bool any = false;
      for (std::size_t k = 0; k < h.cols(); ++k) any = any || (r.u(row, k) && r.p_r(row, k) > 0.0);
      if (!any) continue;
      const auto ph = reduce_papr_bb(r.p_r.row(row), r.u.row(row), cfg.bb);
      std::copy(ph.phases.begin(), ph.phases.end(), r.phases.row(row).begin());
    }
  }
  r.papr_db = symbol_papr_db(r.p_r, r.u, r.phases);
  fill_sidelobe_metrics(r, roi);
  return r;
}

DesignResult equal_power_baseline(const ComplexGrid& h, double p_bar_c, double p_bar_r,
                                  double sigma2_c, const Roi& roi,
                                  std::optional<double> threshold) {
  const auto alloc = step_one(h, p_bar_c, sigma2_c, threshold);
  DesignResult r = assemble(h, alloc);
  if (r.comm_only) return r;
  r.p_r = equal_power_allocation(r.u, p_bar_r);
  r.papr_db = symbol_papr_db(r.p_r, r.u, r.phases);
  fill_sidelobe_metrics(r, roi);
  return r;
}

}  // namespace isac::comm_centric
