#include "isac/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace isac {

PathSpec fast_fading_spec(std::size_t paths) {
  PathSpec spec;
  spec.paths = paths;
  spec.doppler_max = 100e3;
  return spec;
}

PathSpec slow_fading_spec(std::size_t paths) {
  PathSpec spec;
  spec.paths = paths;
  spec.doppler_max = 1e3;
  return spec;
}

PathSet gen_paths(const PathSpec& spec, const FrameConfig& cfg, std::uint64_t seed) {
  if (spec.paths == 0) throw InvalidConfig("path count must be at least 1");
  const double delay_hi = spec.delay_max >= 0.0 ? spec.delay_max : cfg.t_g;
  if (spec.delay_min < 0.0 || delay_hi < spec.delay_min) {
    throw InvalidConfig("empty delay range");
  }
  if (spec.delay_min > 0.0 && spec.delay_min >= cfg.t_g) {
    throw ScopeError("delay range must start inside the cyclic prefix");
  }
  if (delay_hi > cfg.t_g) throw ScopeError("delay range exceeds the cyclic prefix");
  if (spec.doppler_max < 0.0) throw InvalidConfig("empty Doppler range");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double per_path = 1.0 / static_cast<double>(spec.paths);

  PathSet out;
  out.reserve(spec.paths);
  for (std::size_t l = 0; l < spec.paths; ++l) {
    Path p;
    if (spec.rayleigh) {
      const double s = std::sqrt(per_path / 2.0);
      const double re = gauss(rng);
      const double im = gauss(rng);
      p.alpha = {s * re, s * im};
    } else {
      p.alpha = std::polar(std::sqrt(per_path), 2.0 * std::numbers::pi * unit(rng));
    }
    // Half-open [lo, hi): a pinned range yields exactly lo.
    p.tau = spec.delay_min + (delay_hi - spec.delay_min) * unit(rng);
    if (p.tau >= cfg.t_g && cfg.t_g > 0.0) p.tau = spec.delay_min;
    p.doppler = spec.doppler_max * (2.0 * unit(rng) - 1.0);
    out.push_back(p);
  }
  return out;
}

void validate_paths(const PathSet& paths, const FrameConfig& cfg, double doppler_limit) {
  if (paths.empty()) throw InvalidConfig("path set is empty");
  for (std::size_t l = 0; l < paths.size(); ++l) {
    const auto& p = paths[l];
    const bool delay_ok = p.tau >= 0.0 && (p.tau < cfg.t_g || (cfg.t_g == 0.0 && p.tau == 0.0));
    if (!delay_ok) throw ScopeError("path " + std::to_string(l) + " delay outside CP");
    if (std::abs(p.doppler) > doppler_limit) {
      throw ScopeError("path " + std::to_string(l) + " Doppler exceeds limit");
    }
  }
}

ComplexGrid sample_grid(const PathSet& paths, const FrameConfig& cfg) {
  ComplexGrid h(cfg.m_sym, cfg.n_c, GridRole::transmit);
  const double two_pi = 2.0 * std::numbers::pi;
  for (const auto& p : paths) {
    for (std::size_t m = 0; m < cfg.m_sym; ++m) {
      // Reduce each phase modulo one turn before combining to keep the argument small.
      const double t_phase = std::fmod(p.doppler * static_cast<double>(m) * cfg.t_o(), 1.0);
      for (std::size_t k = 0; k < cfg.n_c; ++k) {
        const double f_phase = std::fmod(p.tau * static_cast<double>(k) * cfg.delta_f, 1.0);
        h(m, k) += p.alpha * std::polar(1.0, two_pi * (t_phase - f_phase));
      }
    }
  }
  return h;
}

ComplexGrid comm_receive(const ComplexGrid& s_c, const ComplexGrid& h, const NoiseSpec& noise,
                         std::uint64_t seed, bool add_noise) {
  require_same_shape(s_c, h, "comm_receive");
  ComplexGrid y(s_c.rows(), s_c.cols(), GridRole::received);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = h[i] * s_c[i];
  if (!add_noise) return y;
  if (!(noise.sigma2_c > 0.0)) throw InvalidConfig("sigma2_c must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise.sigma2_c / 2.0));
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    y[i] += cplx(re, im);
  }
  return y;
}

double achievable_rate(const PowerGrid& p_c, const ComplexGrid& h, double sigma2_c) {
  require_same_shape(p_c, h, "achievable_rate");
  if (!(sigma2_c > 0.0)) throw DomainError("sigma2_c must be positive");
  double rate = 0.0;
  for (std::size_t i = 0; i < p_c.size(); ++i) {
    if (p_c[i] < 0.0) throw DomainError("negative communication power", i);
    rate += std::log2(1.0 + p_c[i] * std::norm(h[i]) / sigma2_c);
  }
  return rate;
}

PowerGrid channel_gain(const ComplexGrid& h) {
  PowerGrid g(h.rows(), h.cols());
  for (std::size_t i = 0; i < h.size(); ++i) g[i] = std::norm(h[i]);
  return g;
}

nlohmann::json paths_to_json(const PathSet& paths) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : paths) j.push_back({p.alpha.real(), p.alpha.imag(), p.tau, p.doppler});
  return j;
}

PathSet paths_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidConfig("path list must be an array");
  PathSet out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 4) {
      throw InvalidConfig("each path needs [alpha_re, alpha_im, tau_s, doppler_hz]");
    }
    out.push_back({cplx(e[0].get<double>(), e[1].get<double>()), e[2].get<double>(),
                   e[3].get<double>()});
  }
  return out;
}

}  // namespace isac
