#pragma once

#include <cstddef>
#include <span>

#include "isac/grid.hpp"

// Data-parallel inner loops. Each kernel has an OpenMP variant and a serial reference
// with the same per-element summation order, so both produce bit-identical output.
namespace isac::kernels {

/// Per-symbol cyclic auto-ambiguity on the centered (nu, mu) grid.
/// x holds m_sym consecutive symbols of n_c samples each. out is bin-ordered
/// (row = nu mod M, col = mu mod N), size m_sym * n_c.
void cyclic_aaf(std::span<const cplx> x, std::size_t m_sym, std::size_t n_c, std::span<cplx> out);
void cyclic_aaf_serial(std::span<const cplx> x, std::size_t m_sym, std::size_t n_c,
                       std::span<cplx> out);

/// Linear (zero-padded) correlation sum_n x(n) x*(n + mu) e^{j 2 pi nu n / N} on the same grid.
void linear_aaf(std::span<const cplx> x, std::size_t m_sym, std::size_t n_c, std::span<cplx> out);
void linear_aaf_serial(std::span<const cplx> x, std::size_t m_sym, std::size_t n_c,
                       std::span<cplx> out);

/// out = offset + coeffs * x, coeffs row-major (rows x x.size()), x real.
void dense_affine(std::span<const cplx> coeffs, std::span<const cplx> offset,
                  std::span<const double> x, std::span<cplx> out);
void dense_affine_serial(std::span<const cplx> coeffs, std::span<const cplx> offset,
                         std::span<const double> x, std::span<cplx> out);

/// Cell-averaging noise floor over a toroidal training annulus.
struct CfarWindow {
  std::size_t train_nu = 8;
  std::size_t train_mu = 8;
  std::size_t guard_nu = 2;
  std::size_t guard_mu = 2;
};

void cfar_mean(std::span<const double> power, std::size_t rows, std::size_t cols,
               const CfarWindow& window, std::span<double> out);
void cfar_mean_serial(std::span<const double> power, std::size_t rows, std::size_t cols,
                      const CfarWindow& window, std::span<double> out);

}  // namespace isac::kernels
