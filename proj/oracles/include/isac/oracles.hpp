#pragma once

// Brute-force references for the library's fast paths. Everything here is a direct
// evaluation of a defining sum or an exhaustive search; none of it is meant to be fast.

#include <cstdint>
#include <span>
#include <vector>

#include "isac/grid.hpp"
#include "isac/kernels.hpp"

namespace isac::oracle {

/// gamma(nu, mu) = sum_{m,k} P(m,k) e^{j 2 pi (nu m / M - mu k / N)}, bin-ordered M x N.
std::vector<cplx> naive_gamma(const PowerGrid& p);

/// Inverse of naive_gamma by direct summation.
std::vector<double> naive_power(std::span<const cplx> gamma, std::size_t m, std::size_t n);

/// sum_{n=0}^{N-1} e^{j 2 pi nu n / (M N)} summed term by term.
cplx naive_eta(int nu, std::size_t m, std::size_t n);

/// Per-symbol cyclic ambiguity of the frequency-domain grid s, as the full quadruple sum
/// over (m, k1, k2, n). Bin-ordered.
std::vector<cplx> naive_exact_aaf(const ComplexGrid& s);

/// The k1 != k2 part of the quadruple sum alone.
std::vector<cplx> cross_term_sum(const ComplexGrid& s);

struct GridSearch {
  std::vector<double> allocation;
  double rate = 0.0;
  std::size_t evaluated = 0;
};

/// Maximizes sum log2(1 + g_i p_i) over the simplex sum p = total with a uniform lattice of
/// `steps` divisions per axis, then `zooms` local refinements around the best point.
/// Entries with a zero mask value are held at zero.
GridSearch simplex_rate_search(std::span<const double> gains, double total, std::size_t steps,
                               std::size_t zooms = 0, std::span<const std::uint8_t> mask = {});

struct PhaseSearch {
  std::vector<double> phases;
  double papr_db = 0.0;
};

/// Minimum PAPR over every assignment of R-th roots of unity to the active subcarriers.
PhaseSearch exhaustive_papr(std::span<const double> p_r_row, std::span<const std::uint8_t> u_row,
                            std::size_t r);

/// max |gamma(nu,mu) eta(nu)| over the listed centered cells, by direct summation.
double naive_sidelobe_peak(const PowerGrid& p, std::span<const std::pair<int, int>> cells,
                           bool eta_weight = true);

/// Best of `samples` uniform draws from the simplex on the support of u (total p_bar)
/// for the objective naive_sidelobe_peak.
struct RandomMinimax {
  PowerGrid p;
  double objective = 0.0;
};
RandomMinimax random_minimax(const IndicatorGrid& u, double p_bar,
                             std::span<const std::pair<int, int>> cells, std::size_t samples,
                             std::uint64_t seed);

/// Cell-averaging noise floor with the training annulus enumerated cell by cell.
std::vector<double> annulus_mean(std::span<const double> power, std::size_t rows,
                                 std::size_t cols, const kernels::CfarWindow& w);

/// Maximizes f over a uniform grid of `points` values on [lo, hi].
struct LineSearch {
  double x = 0.0;
  double value = 0.0;
};
template <class F>
LineSearch grid_maximize(F&& f, double lo, double hi, std::size_t points) {
  LineSearch best{lo, f(lo)};
  for (std::size_t i = 1; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = f(x);
    if (v > best.value) best = {x, v};
  }
  return best;
}

}  // namespace isac::oracle
