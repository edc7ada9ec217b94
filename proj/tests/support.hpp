#pragma once

#include <cstdint>
#include <numbers>
#include <random>

#include "isac/frame.hpp"
#include "isac/grid.hpp"

namespace test {

inline isac::PowerGrid random_power(std::size_t m, std::size_t n, std::uint64_t seed,
                                    double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  isac::PowerGrid p(m, n);
  for (auto& v : p.data()) v = u(rng);
  return p;
}

inline isac::ComplexGrid random_qpsk(std::size_t m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> q(0, 3);
  isac::ComplexGrid s(m, n);
  for (auto& v : s.data()) {
    v = std::polar(1.0, std::numbers::pi / 2 * q(rng) + std::numbers::pi / 4);
  }
  return s;
}

inline isac::ComplexGrid random_complex(std::size_t m, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  isac::ComplexGrid s(m, n);
  for (auto& v : s.data()) v = {g(rng), g(rng)};
  return s;
}

// Speed whose Doppler phase advances exactly nu / M turns per sampled symbol (prefix included).
inline double integer_bin_speed(const isac::FrameConfig& cfg, int nu) {
  const double symbol = static_cast<double>(cfg.n_c + cfg.cp_samples()) * cfg.sample_period();
  return nu * isac::kSpeedOfLight / (2.0 * static_cast<double>(cfg.m_sym) * cfg.f_c * symbol);
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace test
