#include "isac/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "isac/fft.hpp"

namespace isac {

std::size_t echo_delay_samples(double distance, const FrameConfig& cfg) {
  const double samples = 2.0 * distance / (kSpeedOfLight * cfg.sample_period());
  return static_cast<std::size_t>(std::floor(samples + 1e-9));
}

TimeSeries simulate_echo(const TimeSeries& x_r, const FrameConfig& cfg, const Target& target,
                         double sigma2_r, std::uint64_t seed, bool add_noise) {
  if (!x_r.with_cp) throw InvalidConfig("echo simulation needs the transmitted prefix");
  if (!(target.distance >= 0.0) || !(2.0 * target.distance / kSpeedOfLight < cfg.t_g)) {
    throw ScopeError("target delay must be shorter than the cyclic prefix");
  }
  if (!(std::abs(target.speed) < cfg.max_speed())) {
    throw ScopeError("target speed exceeds the unambiguous Doppler range");
  }
  const std::size_t delay = echo_delay_samples(target.distance, cfg);
  const double ts = x_r.sample_period > 0.0 ? x_r.sample_period : cfg.sample_period();
  const double per_sample = 2.0 * target.speed * cfg.f_c * ts / kSpeedOfLight;

  TimeSeries y = x_r;
  const std::size_t len = x_r.samples.size();
  for (std::size_t n = 0; n < len; ++n) {
    const cplx src = n >= delay ? x_r.samples[n - delay] : cplx{};
    const double turns = std::fmod(per_sample * static_cast<double>(n), 1.0);
    y.samples[n] = src * std::polar(1.0, 2.0 * std::numbers::pi * turns);
  }
  if (add_noise) {
    if (!(sigma2_r > 0.0)) throw InvalidConfig("sigma2_r must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2_r / 2.0));
    for (auto& v : y.samples) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      v += cplx(re, im);
    }
  }
  return y;
}

Periodogram periodogram(const ComplexGrid& s_r, const TimeSeries& y_r, const FrameConfig& cfg) {
  const std::size_t m = cfg.m_sym;
  const std::size_t n = cfg.n_c;
  if (s_r.rows() != m || s_r.cols() != n) {
    throw DimensionMismatch("sensing grid does not match the frame");
  }
  if (!y_r.with_cp || y_r.n_c != n || y_r.samples.size() != m * (n + y_r.n_cp)) {
    throw DimensionMismatch("echo must hold M symbols with their prefixes");
  }
  const std::size_t stride = n + y_r.n_cp;
  Periodogram p{ComplexGrid(m, n, GridRole::echo), PowerGrid(m, n)};
  auto e = p.e.data();
  for (std::size_t r = 0; r < m; ++r) {
    const cplx* src = y_r.samples.data() + r * stride + y_r.n_cp;
    std::copy(src, src + n, e.begin() + static_cast<std::ptrdiff_t>(r * n));
  }
  fft::transform_rows(e, m, n, fft::Direction::forward);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] *= std::conj(s_r[i]);
  fft::transform_rows(e, m, n, fft::Direction::backward);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (auto& v : e) v *= inv_n;
  fft::transform_cols(e, m, n, fft::Direction::forward);
  return p;
}

PowerGrid cfar_threshold(const Periodogram& p, const kernels::CfarWindow& window) {
  const std::size_t rows = p.e.rows();
  const std::size_t cols = p.e.cols();
  if (2 * (window.train_nu + window.guard_nu) + 1 > rows ||
      2 * (window.train_mu + window.guard_mu) + 1 > cols) {
    throw InvalidConfig("CFAR window larger than the delay-Doppler grid");
  }
  if (window.train_nu == 0 && window.train_mu == 0) {
    throw InvalidConfig("CFAR window has no training cells");
  }
  PowerGrid power(rows, cols);
  for (std::size_t i = 0; i < power.size(); ++i) power[i] = std::norm(p.e[i]);
  PowerGrid theta(rows, cols);
  kernels::cfar_mean(power.data(), rows, cols, window, theta.data());
  return theta;
}

double bin_distance(std::size_t mu, const FrameConfig& cfg) {
  return static_cast<double>(mu) * cfg.distance_per_bin();
}

double bin_speed(std::size_t nu, const FrameConfig& cfg) {
  const std::size_t m = cfg.m_sym;
  if (nu <= m / 2) return static_cast<double>(nu) * cfg.speed_per_bin();
  return -static_cast<double>(m - nu) * cfg.speed_per_bin();
}

std::vector<Detection> detect_and_localize(const Periodogram& p, const PowerGrid& theta,
                                           double gamma_thresh, const FrameConfig& cfg,
                                           double floor_rel) {
  require_same_shape(p.e, theta, "detect_and_localize");
  double peak = 0.0;
  for (const auto& v : p.e.data()) peak = std::max(peak, std::norm(v));
  const double floor = floor_rel * peak;
  std::vector<Detection> out;
  for (std::size_t r = 0; r < p.e.rows(); ++r) {
    for (std::size_t c = 0; c < p.e.cols(); ++c) {
      const double power = std::norm(p.e(r, c));
      const double noise = std::max(theta(r, c), floor);
      if (!(noise > 0.0)) continue;
      const double stat = power / noise;
      if (stat > gamma_thresh) out.push_back({r, c, bin_distance(c, cfg), bin_speed(r, cfg), stat});
    }
  }
  return out;
}

void write_detections_csv(std::ostream& os, const std::vector<Detection>& dets) {
  os << "nu,mu,d_m,u_mps,statistic\n";
  char buf[160];
  for (const auto& d : dets) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%.6f,%.6e\n", d.nu, d.mu, d.distance, d.speed,
                  d.statistic);
    os << buf;
  }
}

}  // namespace isac
