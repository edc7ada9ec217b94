#pragma once

#include <cstdint>
#include <vector>

#include "isac/frame.hpp"
#include "isac/grid.hpp"
#include "json.hpp"

namespace isac {

struct Path {
  cplx alpha;     // complex gain
  double tau;     // delay, s
  double doppler; // Doppler shift, Hz

  bool operator==(const Path&) const = default;
};

using PathSet = std::vector<Path>;

/// Statistics for random path draws. Delays are uniform in [delay_min, delay_max),
/// Dopplers uniform in [-doppler_max, doppler_max]. A degenerate range (min == max) pins
/// the value.
struct PathSpec {
  std::size_t paths = 8;
  double delay_min = 0.0;
  double delay_max = -1.0;  // negative means "up to t_g"
  double doppler_max = 0.0;
  bool rayleigh = true;     // false: unit-magnitude equal-power gains with random phase

  bool operator==(const PathSpec&) const = default;
};

/// Channel presets: fast fading spans +-100 kHz Doppler, slow fading +-1 kHz.
PathSpec fast_fading_spec(std::size_t paths = 8);
PathSpec slow_fading_spec(std::size_t paths = 8);

struct NoiseSpec {
  double sigma2_c = 1.0;
  double sigma2_r = 1.0;
};

/// Draws a path set. Gains are complex Gaussian with E[sum |alpha_l|^2] = 1.
PathSet gen_paths(const PathSpec& spec, const FrameConfig& cfg, std::uint64_t seed);

/// Path list as [[alpha_re, alpha_im, tau_s, doppler_hz], ...] for replay.
nlohmann::json paths_to_json(const PathSet& paths);
PathSet paths_from_json(const nlohmann::json& j);

/// Checks delays lie in [0, t_g) and |doppler| <= doppler_limit. Throws ScopeError.
void validate_paths(const PathSet& paths, const FrameConfig& cfg, double doppler_limit);

/// H(m,k) = sum_l alpha_l e^{j 2 pi (v_l m T_O - tau_l k delta_f)}.
ComplexGrid sample_grid(const PathSet& paths, const FrameConfig& cfg);

/// Y_c = H (.) S_c + W_c. Passing add_noise = false yields the exact Hadamard product.
ComplexGrid comm_receive(const ComplexGrid& s_c, const ComplexGrid& h, const NoiseSpec& noise,
                         std::uint64_t seed, bool add_noise = true);

/// Frame rate in bits: sum log2(1 + P_c |H|^2 / sigma2_c).
double achievable_rate(const PowerGrid& p_c, const ComplexGrid& h, double sigma2_c);

/// |H|^2 per RE.
PowerGrid channel_gain(const ComplexGrid& h);

}  // namespace isac
