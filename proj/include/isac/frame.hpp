#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "isac/grid.hpp"

namespace isac {

inline constexpr double kSpeedOfLight = 3.0e8;

/// OFDM numerology of one coherent processing frame.
struct FrameConfig {
  double f_c = 0.0;        // carrier frequency, Hz
  double delta_f = 0.0;    // subcarrier spacing, Hz
  std::size_t n_c = 0;     // subcarriers
  std::size_t m_sym = 0;   // OFDM symbols per frame
  double t_g = 0.0;        // cyclic prefix duration, s

  double t() const { return 1.0 / delta_f; }
  double t_o() const { return t() + t_g; }
  double sample_period() const { return t() / static_cast<double>(n_c); }
  std::size_t cp_samples() const;

  /// Largest unambiguous distance c*t_g/2 (m).
  double max_distance() const { return kSpeedOfLight * t_g / 2.0; }
  /// Largest unambiguous radial speed c/(4 f_c t_o) (m/s).
  double max_speed() const { return kSpeedOfLight / (4.0 * f_c * t_o()); }
  /// Distance spanned by one delay bin, c/(2 N_c delta_f).
  double distance_per_bin() const;
  /// Speed spanned by one Doppler bin, c/(2 M f_c t_o).
  double speed_per_bin() const;

  bool operator==(const FrameConfig&) const = default;
};

/// Validates numerology and returns the config. Throws InvalidConfig.
FrameConfig make_config(double f_c, double delta_f, std::size_t n_c, std::size_t m_sym,
                        double t_g);

/// The numerology used throughout the experiments (240 GHz, 240 kHz, 128 x 32).
FrameConfig default_frame();

enum class Normalization { unit, raw };

/// Sampled baseband sequence of a frame, optionally with cyclic prefixes.
struct TimeSeries {
  std::vector<cplx> samples;
  double sample_period = 0.0;
  Normalization normalization = Normalization::raw;
  bool with_cp = false;
  std::size_t n_c = 0;
  std::size_t n_cp = 0;

  std::size_t symbol_length() const { return n_c + (with_cp ? n_cp : 0); }
  std::size_t symbols() const { return symbol_length() ? samples.size() / symbol_length() : 0; }
};

/// s_r = u (.) s and s_c = (1 - u) (.) s.
std::pair<ComplexGrid, ComplexGrid> split_grid(const ComplexGrid& s, const IndicatorGrid& u);

/// Per-symbol IDFT synthesis; prepends the last n_cp samples of each symbol when with_cp.
TimeSeries synthesize(const ComplexGrid& s, const FrameConfig& cfg, bool with_cp,
                      Normalization normalization);

/// PAPR (dB) of one symbol's sensing component with the given per-RE phases.
double papr_db(std::span<const double> phases, std::span<const double> p_r_row,
               std::span<const std::uint8_t> u_row);

/// Peak instantaneous power max_n |sum_k U sqrt(P) e^{j(theta - 2 pi n k / N)}|^2.
double sensing_peak_power(std::span<const double> phases, std::span<const double> p_r_row,
                          std::span<const std::uint8_t> u_row);

}  // namespace isac
