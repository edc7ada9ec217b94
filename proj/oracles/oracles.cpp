#include "isac/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "isac/error.hpp"

namespace isac::oracle {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long centered(std::size_t bin, std::size_t n) {
  const long hi = static_cast<long>(n) - 1 - static_cast<long>(n / 2);
  return static_cast<long>(bin) > hi ? static_cast<long>(bin) - static_cast<long>(n)
                                     : static_cast<long>(bin);
}

std::size_t bin_of(long v, std::size_t n) {
  const long ln = static_cast<long>(n);
  return static_cast<std::size_t>(((v % ln) + ln) % ln);
}

// The quadruple sum, keeping either the diagonal (k1 == k2) or the off-diagonal terms.
std::vector<cplx> quad_sum(const ComplexGrid& s, bool diagonal, bool off_diagonal) {
  const std::size_t m_sym = s.rows();
  const std::size_t n_c = s.cols();
  const double mn = static_cast<double>(m_sym * n_c);
  std::vector<cplx> out(m_sym * n_c);
  for (std::size_t nb = 0; nb < m_sym; ++nb) {
    const double nu = static_cast<double>(centered(nb, m_sym));
    for (std::size_t mb = 0; mb < n_c; ++mb) {
      const double mu = static_cast<double>(centered(mb, n_c));
      cplx acc{};
      for (std::size_t m = 0; m < m_sym; ++m) {
        for (std::size_t k1 = 0; k1 < n_c; ++k1) {
          for (std::size_t k2 = 0; k2 < n_c; ++k2) {
            if (k1 == k2 ? !diagonal : !off_diagonal) continue;
            cplx inner{};
            for (std::size_t n = 0; n < n_c; ++n) {
              const double ph = kTwoPi * (static_cast<double>(k1) * static_cast<double>(n) /
                                              static_cast<double>(n_c) -
                                          static_cast<double>(k2) *
                                              (static_cast<double>(n) + mu) /
                                              static_cast<double>(n_c) +
                                          nu * (static_cast<double>(m * n_c + n)) / mn);
              inner += std::polar(1.0, ph);
            }
            acc += s(m, k1) * std::conj(s(m, k2)) * inner;
          }
        }
      }
      out[nb * n_c + mb] = acc;
    }
  }
  return out;
}

}  // namespace

std::vector<cplx> naive_gamma(const PowerGrid& p) {
  const std::size_t m_sym = p.rows();
  const std::size_t n_c = p.cols();
  std::vector<cplx> out(m_sym * n_c);
  for (std::size_t nb = 0; nb < m_sym; ++nb) {
    const double nu = static_cast<double>(centered(nb, m_sym));
    for (std::size_t mb = 0; mb < n_c; ++mb) {
      const double mu = static_cast<double>(centered(mb, n_c));
      cplx acc{};
      for (std::size_t m = 0; m < m_sym; ++m) {
        for (std::size_t k = 0; k < n_c; ++k) {
          const double ph = kTwoPi * (nu * static_cast<double>(m) / static_cast<double>(m_sym) -
                                      mu * static_cast<double>(k) / static_cast<double>(n_c));
          acc += p(m, k) * std::polar(1.0, ph);
        }
      }
      out[nb * n_c + mb] = acc;
    }
  }
  return out;
}

std::vector<double> naive_power(std::span<const cplx> gamma, std::size_t m_sym, std::size_t n_c) {
  if (gamma.size() != m_sym * n_c) throw DimensionMismatch("naive_power: size");
  std::vector<double> out(m_sym * n_c);
  const double scale = 1.0 / static_cast<double>(m_sym * n_c);
  for (std::size_t m = 0; m < m_sym; ++m) {
    for (std::size_t k = 0; k < n_c; ++k) {
      cplx acc{};
      for (std::size_t nb = 0; nb < m_sym; ++nb) {
        for (std::size_t mb = 0; mb < n_c; ++mb) {
          const double ph = kTwoPi * (static_cast<double>(mb * k) / static_cast<double>(n_c) -
                                      static_cast<double>(nb * m) / static_cast<double>(m_sym));
          acc += gamma[nb * n_c + mb] * std::polar(1.0, ph);
        }
      }
      out[m * n_c + k] = acc.real() * scale;
    }
  }
  return out;
}

cplx naive_eta(int nu, std::size_t m_sym, std::size_t n_c) {
  cplx acc{};
  const double mn = static_cast<double>(m_sym * n_c);
  for (std::size_t n = 0; n < n_c; ++n) {
    acc += std::polar(1.0, kTwoPi * static_cast<double>(nu) * static_cast<double>(n) / mn);
  }
  return acc;
}

std::vector<cplx> naive_exact_aaf(const ComplexGrid& s) { return quad_sum(s, true, true); }

std::vector<cplx> cross_term_sum(const ComplexGrid& s) { return quad_sum(s, false, true); }

GridSearch simplex_rate_search(std::span<const double> gains, double total, std::size_t steps,
                               std::size_t zooms, std::span<const std::uint8_t> mask) {
  if (!mask.empty() && mask.size() != gains.size()) throw DimensionMismatch("mask size");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (mask.empty() || mask[i]) idx.push_back(i);
  }
  if (idx.empty() || steps == 0) throw InvalidConfig("empty search");
  const std::size_t dim = idx.size();

  auto rate = [&](const std::vector<double>& p) {
    double r = 0.0;
    for (std::size_t j = 0; j < dim; ++j) r += std::log2(1.0 + gains[idx[j]] * p[j]);
    return r;
  };

  GridSearch best;
  std::vector<double> best_p(dim, total / static_cast<double>(dim));
  best.rate = rate(best_p);

  // Lattice points center + h * (c - c_center) with integer counts summing to steps, where
  // the center lattice is uniform at the first level and the previous best afterwards.
  std::vector<double> center(dim, 0.0);
  double h = total / static_cast<double>(steps);
  std::vector<long> counts(dim);
  std::vector<double> p(dim);
  for (std::size_t level = 0; level <= zooms; ++level) {
    // Level 0 scans the whole simplex; zoom levels scan +-10 steps of a tenth of the
    // previous spacing around the incumbent.
    const long range = level == 0 ? static_cast<long>(steps) : 0;
    const long lo = level == 0 ? 0 : -10;
    const long hi = level == 0 ? range : 10;
    std::function<void(std::size_t, long)> rec = [&](std::size_t j, long acc) {
      if (j + 1 == dim) {
        counts[j] = range - acc;
        if (counts[j] < lo || counts[j] > hi) return;
        bool ok = true;
        for (std::size_t t = 0; t < dim && ok; ++t) {
          p[t] = center[t] + h * static_cast<double>(counts[t]);
          if (p[t] < -1e-15) ok = false;
          p[t] = std::max(p[t], 0.0);
        }
        if (!ok) return;
        ++best.evaluated;
        const double r = rate(p);
        if (r > best.rate) {
          best.rate = r;
          best_p = p;
        }
        return;
      }
      for (long c = lo; c <= hi; ++c) {
        counts[j] = c;
        rec(j + 1, acc + c);
      }
    };
    rec(0, 0);
    center = best_p;
    h /= 10.0;
  }
  best.allocation.assign(gains.size(), 0.0);
  for (std::size_t j = 0; j < dim; ++j) best.allocation[idx[j]] = best_p[j];
  return best;
}

PhaseSearch exhaustive_papr(std::span<const double> p_r_row, std::span<const std::uint8_t> u_row,
                            std::size_t r) {
  const std::size_t n_c = p_r_row.size();
  std::vector<std::size_t> active;
  double mean = 0.0;
  for (std::size_t k = 0; k < n_c; ++k) {
    if (u_row[k] && p_r_row[k] > 0.0) {
      active.push_back(k);
      mean += p_r_row[k];
    }
  }
  if (active.empty()) throw EmptySupport("no active subcarriers");
  std::size_t combos = 1;
  for (std::size_t i = 0; i < active.size(); ++i) combos *= r;

  PhaseSearch best;
  best.papr_db = std::numeric_limits<double>::infinity();
  std::vector<double> phases(n_c, 0.0);
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    for (std::size_t k : active) {
      phases[k] = kTwoPi * static_cast<double>(c % r) / static_cast<double>(r);
      c /= r;
    }
    double peak = 0.0;
    for (std::size_t n = 0; n < n_c; ++n) {
      cplx acc{};
      for (std::size_t k : active) {
        acc += std::polar(std::sqrt(p_r_row[k]),
                          phases[k] - kTwoPi * static_cast<double>(n * k) / static_cast<double>(n_c));
      }
      peak = std::max(peak, std::norm(acc));
    }
    const double v = 10.0 * std::log10(peak / mean);
    if (v < best.papr_db) {
      best.papr_db = v;
      best.phases = phases;
    }
  }
  return best;
}

double naive_sidelobe_peak(const PowerGrid& p, std::span<const std::pair<int, int>> cells,
                           bool eta_weight) {
  const std::size_t m_sym = p.rows();
  const std::size_t n_c = p.cols();
  double peak = 0.0;
  for (const auto& [nu, mu] : cells) {
    cplx acc{};
    for (std::size_t m = 0; m < m_sym; ++m) {
      for (std::size_t k = 0; k < n_c; ++k) {
        const double ph = kTwoPi * (nu * static_cast<double>(m) / static_cast<double>(m_sym) -
                                    mu * static_cast<double>(k) / static_cast<double>(n_c));
        acc += p(m, k) * std::polar(1.0, ph);
      }
    }
    if (eta_weight) acc *= naive_eta(nu, m_sym, n_c);
    peak = std::max(peak, std::abs(acc));
  }
  return peak;
}

RandomMinimax random_minimax(const IndicatorGrid& u, double p_bar,
                             std::span<const std::pair<int, int>> cells, std::size_t samples,
                             std::uint64_t seed) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i]) support.push_back(i);
  }
  if (support.empty()) throw EmptySupport("no support");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);

  RandomMinimax best{PowerGrid(u.rows(), u.cols()), std::numeric_limits<double>::infinity()};
  PowerGrid p(u.rows(), u.cols());
  for (std::size_t s = 0; s < samples; ++s) {
    double sum = 0.0;
    std::vector<double> w(support.size());
    for (auto& v : w) sum += (v = expo(rng));
    for (std::size_t j = 0; j < support.size(); ++j) p[support[j]] = p_bar * w[j] / sum;
    const double obj = naive_sidelobe_peak(p, cells);
    if (obj < best.objective) best = {p, obj};
  }
  return best;
}

std::vector<double> annulus_mean(std::span<const double> power, std::size_t rows,
                                 std::size_t cols, const kernels::CfarWindow& w) {
  const long outer_nu = static_cast<long>(w.train_nu + w.guard_nu);
  const long outer_mu = static_cast<long>(w.train_mu + w.guard_mu);
  std::vector<std::pair<long, long>> offsets;
  for (long a = -outer_nu; a <= outer_nu; ++a) {
    for (long b = -outer_mu; b <= outer_mu; ++b) {
      const bool guard = std::abs(a) <= static_cast<long>(w.guard_nu) &&
                         std::abs(b) <= static_cast<long>(w.guard_mu);
      if (!guard) offsets.emplace_back(a, b);
    }
  }
  std::vector<double> out(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (const auto& [a, b] : offsets) {
        acc += power[bin_of(static_cast<long>(r) + a, rows) * cols +
                     bin_of(static_cast<long>(c) + b, cols)];
      }
      out[r * cols + c] = acc / static_cast<double>(offsets.size());
    }
  }
  return out;
}

}  // namespace isac::oracle
