#include "isac/frame.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "isac/fft.hpp"

namespace isac {

std::size_t FrameConfig::cp_samples() const {
  return static_cast<std::size_t>(std::llround(t_g / sample_period()));
}

double FrameConfig::distance_per_bin() const {
  return kSpeedOfLight / (2.0 * static_cast<double>(n_c) * delta_f);
}

double FrameConfig::speed_per_bin() const {
  return kSpeedOfLight / (2.0 * static_cast<double>(m_sym) * f_c * t_o());
}

FrameConfig make_config(double f_c, double delta_f, std::size_t n_c, std::size_t m_sym,
                        double t_g) {
  if (!(f_c > 0.0) || !std::isfinite(f_c)) throw InvalidConfig("f_c must be positive");
  if (!(delta_f > 0.0) || !std::isfinite(delta_f)) {
    throw InvalidConfig("delta_f must be positive");
  }
  if (n_c < 2) throw InvalidConfig("n_c must be at least 2, got " + std::to_string(n_c));
  if (m_sym < 1) throw InvalidConfig("m_sym must be at least 1");
  if (!(t_g >= 0.0) || !std::isfinite(t_g)) throw InvalidConfig("t_g must be non-negative");
  FrameConfig cfg{f_c, delta_f, n_c, m_sym, t_g};
  if (t_g > 0.0 && !(cfg.max_speed() > 0.0)) throw InvalidConfig("degenerate speed limit");
  return cfg;
}

FrameConfig default_frame() { return make_config(240e9, 240e3, 128, 32, 1.0368e-6); }

std::pair<ComplexGrid, ComplexGrid> split_grid(const ComplexGrid& s, const IndicatorGrid& u) {
  require_same_shape(s, u, "split_grid");
  ComplexGrid s_r(s.rows(), s.cols(), GridRole::sensing);
  ComplexGrid s_c(s.rows(), s.cols(), GridRole::comm);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (u[i] != 0) {
      s_r[i] = s[i];
    } else {
      s_c[i] = s[i];
    }
  }
  return {std::move(s_r), std::move(s_c)};
}

TimeSeries synthesize(const ComplexGrid& s, const FrameConfig& cfg, bool with_cp,
                      Normalization normalization) {
  if (s.rows() != cfg.m_sym || s.cols() != cfg.n_c) {
    throw DimensionMismatch("synthesize: grid does not match frame config");
  }
  const std::size_t n = cfg.n_c;
  const std::size_t n_cp = with_cp ? cfg.cp_samples() : 0;
  if (n_cp > n) throw InvalidConfig("cyclic prefix longer than symbol");
  const double scale = normalization == Normalization::unit ? 1.0 / std::sqrt(double(n)) : 1.0;

  TimeSeries out;
  out.sample_period = cfg.sample_period();
  out.normalization = normalization;
  out.with_cp = with_cp;
  out.n_c = n;
  out.n_cp = cfg.cp_samples();
  out.samples.resize(cfg.m_sym * (n + n_cp));

  std::vector<cplx> sym(n);
  for (std::size_t m = 0; m < cfg.m_sym; ++m) {
    auto row = s.row(m);
    std::copy(row.begin(), row.end(), sym.begin());
    fft::transform(sym, fft::Direction::backward);
    cplx* dst = out.samples.data() + m * (n + n_cp);
    for (std::size_t i = 0; i < n_cp; ++i) dst[i] = scale * sym[n - n_cp + i];
    for (std::size_t i = 0; i < n; ++i) dst[n_cp + i] = scale * sym[i];
  }
  return out;
}

double sensing_peak_power(std::span<const double> phases, std::span<const double> p_r_row,
                          std::span<const std::uint8_t> u_row) {
  const std::size_t n = p_r_row.size();
  if (phases.size() != n || u_row.size() != n) {
    throw DimensionMismatch("papr: row lengths differ");
  }
  std::vector<cplx> a(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (u_row[k] != 0) a[k] = std::polar(std::sqrt(std::max(p_r_row[k], 0.0)), phases[k]);
  }
  fft::transform(a, fft::Direction::forward);
  double peak = 0.0;
  for (const auto& v : a) peak = std::max(peak, std::norm(v));
  return peak;
}

double papr_db(std::span<const double> phases, std::span<const double> p_r_row,
               std::span<const std::uint8_t> u_row) {
  double mean = 0.0;
  for (std::size_t k = 0; k < p_r_row.size(); ++k) {
    if (u_row.size() > k && u_row[k] != 0) mean += p_r_row[k];
  }
  if (!(mean > 0.0)) throw DomainError("papr undefined: no active sensing power in row");
  return 10.0 * std::log10(sensing_peak_power(phases, p_r_row, u_row) / mean);
}

}  // namespace isac
