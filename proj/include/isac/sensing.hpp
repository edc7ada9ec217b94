#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "isac/frame.hpp"
#include "isac/grid.hpp"
#include "isac/kernels.hpp"

namespace isac {

struct Target {
  double distance = 0.0;  // m
  double speed = 0.0;     // radial, m/s

  bool operator==(const Target&) const = default;
};

/// Delay in whole samples, floor(2 d / (c T_s)), robust to rounding at exact bin multiples.
std::size_t echo_delay_samples(double distance, const FrameConfig& cfg);

/// y(n) = x(n - D) e^{j 2 pi n 2 u f_c T_s / c} + w(n). x must carry its cyclic prefix.
/// Throws ScopeError when the round-trip delay reaches the prefix or |u| is unresolvable.
TimeSeries simulate_echo(const TimeSeries& x_r, const FrameConfig& cfg, const Target& target,
                         double sigma2_r, std::uint64_t seed, bool add_noise = true);

/// Delay-Doppler map E(nu, mu) in DFT-bin order (rows nu = 0..M-1, cols mu = 0..N_c-1),
/// plus the noise floor once estimated.
struct Periodogram {
  ComplexGrid e;
  PowerGrid theta;
};

/// Strips each prefix, demodulates every symbol, correlates against the conjugated sensing
/// symbols, then takes an inverse DFT over subcarriers and a DFT over symbols.
Periodogram periodogram(const ComplexGrid& s_r, const TimeSeries& y_r, const FrameConfig& cfg);

/// Cell-averaging floor: mean |E|^2 over the toroidal training annulus of each cell.
/// Throws InvalidConfig when the window does not fit the grid.
PowerGrid cfar_threshold(const Periodogram& p, const kernels::CfarWindow& window = {});

struct Detection {
  std::size_t nu = 0;
  std::size_t mu = 0;
  double distance = 0.0;
  double speed = 0.0;
  double statistic = 0.0;
};

double bin_distance(std::size_t mu, const FrameConfig& cfg);
/// Positive branch for nu <= floor(M/2), negative branch above.
double bin_speed(std::size_t nu, const FrameConfig& cfg);

/// Cells with |E|^2 / theta > gamma_thresh, in row-major order. theta is floored at
/// floor_rel * max|E|^2 so roundoff-only cells of a noiseless map are not tested on noise.
std::vector<Detection> detect_and_localize(const Periodogram& p, const PowerGrid& theta,
                                           double gamma_thresh, const FrameConfig& cfg,
                                           double floor_rel = 1e-12);

void write_detections_csv(std::ostream& os, const std::vector<Detection>& dets);

}  // namespace isac
