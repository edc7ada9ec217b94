#include "isac/ambiguity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <ostream>
#include <string>

#include "isac/fft.hpp"
#include "isac/kernels.hpp"

namespace isac {

namespace {

// Relative floor below which a sidelobe counts as numerically zero.
constexpr double kZeroSidelobe = 1e-12;

bool ge_rel(double lhs, double rhs) { return lhs >= rhs * (1.0 - 1e-12); }

void check_aaf_input(const TimeSeries& x, const FrameConfig& cfg, std::size_t max_samples) {
  if (x.with_cp) throw InvalidConfig("ambiguity input must not carry a cyclic prefix");
  if (x.normalization != Normalization::raw) {
    throw InvalidConfig("ambiguity input must use raw normalization");
  }
  const std::size_t total = cfg.m_sym * cfg.n_c;
  if (x.n_c != cfg.n_c || x.samples.size() != total) {
    throw DimensionMismatch("time series does not match the frame size");
  }
  if (total > max_samples) {
    throw SizeGuardExceeded("exact ambiguity refused for " + std::to_string(total) +
                            " samples (cap " + std::to_string(max_samples) + ")");
  }
}

}  // namespace

double GammaGrid::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s);
}

Roi Roi::from_divisors(std::size_t m, std::size_t n, std::size_t a, std::size_t b) {
  if (m == 0 || n == 0) throw InvalidConfig("empty grid");
  if (a == 0 || m % a != 0) throw InvalidConfig("a must divide M");
  if (b == 0 || n % b != 0) throw InvalidConfig("b must divide N_c");
  Roi r;
  r.m_ = m;
  r.n_ = n;
  r.a_ = a;
  r.b_ = b;
  const int ma = static_cast<int>(m / a);
  const int nb = static_cast<int>(n / b);
  r.nu_lo_ = -(ma / 2);
  r.nu_hi_ = ma - 1 - ma / 2;
  r.mu_hi_ = nb - 1 - nb / 2;
  return r;
}

std::vector<std::pair<int, int>> Roi::cells() const {
  std::vector<std::pair<int, int>> out;
  for (int nu = nu_lo_; nu <= nu_hi_; ++nu) {
    for (int mu = 0; mu <= mu_hi_; ++mu) out.emplace_back(nu, mu);
  }
  return out;
}

std::vector<std::pair<int, int>> Roi::sidelobe_cells() const {
  auto out = cells();
  std::erase(out, std::pair<int, int>{0, 0});
  return out;
}

double Roi::distance_coverage(const FrameConfig& cfg) const {
  return kSpeedOfLight / (2.0 * static_cast<double>(b_) * cfg.delta_f);
}

double Roi::speed_coverage(const FrameConfig& cfg) const {
  return cfg.max_speed() / static_cast<double>(a_);
}

Roi make_roi(const FrameConfig& cfg, double d0, double u0) {
  if (!(d0 >= 0.0) || !(d0 < cfg.max_distance())) {
    throw ScopeError("distance scope must lie in [0, c*t_g/2)");
  }
  if (!(u0 >= 0.0) || !(u0 <= cfg.max_speed())) {
    throw ScopeError("speed scope must lie in [0, c/(4 f_c t_o)]");
  }
  std::size_t a = 1;
  for (std::size_t cand = 1; cand <= cfg.m_sym; ++cand) {
    if (cfg.m_sym % cand == 0 && ge_rel(cfg.max_speed() / static_cast<double>(cand), u0)) a = cand;
  }
  std::size_t b = 1;
  for (std::size_t cand = 1; cand <= cfg.n_c; ++cand) {
    const double reach = kSpeedOfLight / (2.0 * static_cast<double>(cand) * cfg.delta_f);
    if (cfg.n_c % cand == 0 && ge_rel(reach, d0)) b = cand;
  }
  return Roi::from_divisors(cfg.m_sym, cfg.n_c, a, b);
}

GammaGrid gamma_from_power(const PowerGrid& p) {
  const std::size_t m = p.rows();
  const std::size_t n = p.cols();
  GammaGrid g(m, n);
  auto& v = g.values();
  for (std::size_t i = 0; i < p.size(); ++i) v[i] = p[i];
  // Rows: k -> mu with e^{-j...}; columns: m -> nu with e^{+j...}.
  fft::transform_rows(v, m, n, fft::Direction::forward);
  fft::transform_cols(v, m, n, fft::Direction::backward);
  v[0] = cplx(total(p), 0.0);
  return g;
}

PowerFromGamma power_from_gamma(const GammaGrid& g, bool require_symmetric, double tol) {
  const std::size_t m = g.m();
  const std::size_t n = g.n();
  std::vector<cplx> v = g.values();
  fft::transform_rows(v, m, n, fft::Direction::backward);
  fft::transform_cols(v, m, n, fft::Direction::forward);
  const double scale = 1.0 / static_cast<double>(m * n);
  PowerFromGamma out{PowerGrid(m, n), 0.0};
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.power[i] = v[i].real() * scale;
    out.imag_residue = std::max(out.imag_residue, std::abs(v[i].imag() * scale));
  }
  if (require_symmetric && out.imag_residue > tol * std::max(g.frobenius_norm(), 1e-300)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "inverse transform has imaginary residue %.3e", out.imag_residue);
    throw SymmetryViolation(buf);
  }
  return out;
}

cplx eta_factor(int nu, std::size_t m, std::size_t n) {
  const double mn = static_cast<double>(m * n);
  // Geometric series; the removable singularity sits at nu = 0 mod M N_c.
  const long ln = static_cast<long>(m * n);
  const long wrapped = ((nu % ln) + ln) % ln;
  if (wrapped == 0) return {static_cast<double>(n), 0.0};
  const double step = 2.0 * std::numbers::pi * static_cast<double>(nu) / mn;
  const cplx num = 1.0 - std::polar(1.0, step * static_cast<double>(n));
  const cplx den = 1.0 - std::polar(1.0, step);
  return num / den;
}

AmbiguitySurface approx_aaf(const PowerGrid& p) {
  const GammaGrid g = gamma_from_power(p);
  AmbiguitySurface s;
  s.m = p.rows();
  s.n = p.cols();
  s.provenance = Provenance::approx;
  s.values = g.values();
  s.eta.resize(s.m);
  for (std::size_t r = 0; r < s.m; ++r) {
    s.eta[r] = eta_factor(CenteredAxis::centered(r, s.m), s.m, s.n);
    for (std::size_t c = 0; c < s.n; ++c) s.values[r * s.n + c] *= s.eta[r];
  }
  s.values[0] = cplx(static_cast<double>(s.n) * total(p), 0.0);
  return s;
}

AmbiguitySurface exact_aaf(const TimeSeries& x, const FrameConfig& cfg, std::size_t max_samples) {
  check_aaf_input(x, cfg, max_samples);
  AmbiguitySurface s;
  s.m = cfg.m_sym;
  s.n = cfg.n_c;
  s.provenance = Provenance::exact;
  s.values.resize(s.m * s.n);
  kernels::cyclic_aaf(x.samples, s.m, s.n, s.values);
  return s;
}

AmbiguitySurface linear_aaf(const TimeSeries& x, const FrameConfig& cfg, std::size_t max_samples) {
  check_aaf_input(x, cfg, max_samples);
  AmbiguitySurface s;
  s.m = cfg.m_sym;
  s.n = cfg.n_c;
  s.provenance = Provenance::exact;
  s.values.resize(s.m * s.n);
  kernels::linear_aaf(x.samples, s.m, s.n, s.values);
  return s;
}

double max_roi_sidelobe(const AmbiguitySurface& chi, const Roi& roi) {
  if (chi.m != roi.m() || chi.n != roi.n()) {
    throw DimensionMismatch("surface and region of interest differ in size");
  }
  double best = 0.0;
  for (const auto& [nu, mu] : roi.sidelobe_cells()) best = std::max(best, std::abs(chi.at(nu, mu)));
  return best;
}

double pslr_db(const AmbiguitySurface& chi, const Roi& roi) {
  if (roi.sidelobe_cells().empty()) throw InvalidConfig("region of interest has no sidelobes");
  const double main = std::abs(chi.at(0, 0));
  const double side = max_roi_sidelobe(chi, roi);
  if (side <= kZeroSidelobe * main) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(main / side);
}

GammaGrid enforce_centrohermitian(GammaGrid g, double tol) {
  auto& v = g.values();
  auto& st = g.statuses();
  const std::size_t m = g.m();
  const std::size_t n = g.n();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t j = g.mirror_index(i);
    if (j < i) continue;
    if (j == i) {
      if (st[i] != CellStatus::fixed_roi) v[i] = cplx(v[i].real(), 0.0);
      continue;
    }
    const bool fi = st[i] == CellStatus::fixed_roi;
    const bool fj = st[j] == CellStatus::fixed_roi;
    if (fi && fj) {
      const double scale = std::max({std::abs(v[i]), std::abs(v[j]), 1.0});
      if (std::abs(v[i] - std::conj(v[j])) > tol * scale) {
        throw ConsistencyError("fixed cells " + std::to_string(i) + " and " + std::to_string(j) +
                               " are not conjugate");
      }
      continue;
    }
    std::size_t keep = i;
    if (fj) {
      keep = j;
    } else if (!fi) {
      // Canonical representative: larger centered mu, then larger centered nu.
      const int mu_i = CenteredAxis::centered(i % n, n);
      const int mu_j = CenteredAxis::centered(j % n, n);
      const int nu_i = CenteredAxis::centered(i / n, m);
      const int nu_j = CenteredAxis::centered(j / n, m);
      keep = (mu_j > mu_i || (mu_j == mu_i && nu_j > nu_i)) ? j : i;
    }
    const std::size_t other = keep == i ? j : i;
    v[other] = std::conj(v[keep]);
    if (st[other] != CellStatus::fixed_roi) st[other] = CellStatus::mirrored;
  }
  return g;
}

void fix_roi_cells(GammaGrid& g, const Roi& roi, double p_bar) {
  if (g.m() != roi.m() || g.n() != roi.n()) {
    throw DimensionMismatch("gamma grid and region of interest differ in size");
  }
  for (const auto& [nu, mu] : roi.cells()) {
    const cplx value = (nu == 0 && mu == 0) ? cplx(p_bar, 0.0) : cplx{};
    g.at(nu, mu) = value;
    g.set_status(nu, mu, CellStatus::fixed_roi);
    g.at(-nu, -mu) = std::conj(value);
    g.set_status(-nu, -mu, CellStatus::fixed_roi);
  }
}

void write_surface_csv(std::ostream& os, const AmbiguitySurface& chi) {
  os << "nu,mu,abs,arg\n";
  char buf[128];
  for (int nu = CenteredAxis::lo(chi.m); nu <= CenteredAxis::hi(chi.m); ++nu) {
    for (int mu = CenteredAxis::lo(chi.n); mu <= CenteredAxis::hi(chi.n); ++mu) {
      const cplx v = chi.at(nu, mu);
      std::snprintf(buf, sizeof buf, "%d,%d,%.12e,%.12e\n", nu, mu, std::abs(v), std::arg(v));
      os << buf;
    }
  }
}

void write_surface_binary(std::ostream& os, const AmbiguitySurface& chi) {
  auto put = [&os](double d) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(d);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    os.write(reinterpret_cast<const char*>(bytes), 8);
  };
  for (int nu = CenteredAxis::lo(chi.m); nu <= CenteredAxis::hi(chi.m); ++nu) {
    for (int mu = CenteredAxis::lo(chi.n); mu <= CenteredAxis::hi(chi.n); ++mu) {
      const cplx v = chi.at(nu, mu);
      put(v.real());
      put(v.imag());
    }
  }
}

}  // namespace isac
