#include "isac/kernels.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace isac::kernels {
namespace {

// e^{j 2 pi i / len} for i in [0, len).
std::vector<cplx> unit_roots(std::size_t len) {
  std::vector<cplx> w(len);
  for (std::size_t i = 0; i < len; ++i) {
    w[i] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(i) /
                               static_cast<double>(len));
  }
  return w;
}

long centered(std::size_t bin, std::size_t n) {
  const long hi = static_cast<long>(n) - 1 - static_cast<long>(n / 2);
  const long b = static_cast<long>(bin);
  return b > hi ? b - static_cast<long>(n) : b;
}

std::size_t wrap(long v, std::size_t n) {
  const long ln = static_cast<long>(n);
  return static_cast<std::size_t>(((v % ln) + ln) % ln);
}

// One Doppler row nu of the cyclic per-symbol ambiguity.
void cyclic_row(std::span<const cplx> x, std::size_t m_sym, std::size_t n_c,
                const std::vector<cplx>& roots, std::size_t nu_bin, std::span<cplx> out) {
  const std::size_t total = m_sym * n_c;
  const std::size_t nu_step = wrap(centered(nu_bin, m_sym), total);
  for (std::size_t mu_bin = 0; mu_bin < n_c; ++mu_bin) {
    cplx acc{0.0, 0.0};
    for (std::size_t m = 0; m < m_sym; ++m) {
      const cplx* sym = x.data() + m * n_c;
      for (std::size_t nb = 0; nb < n_c; ++nb) {
        const std::size_t n = m * n_c + nb;
        const cplx z = sym[nb] * std::conj(sym[(nb + mu_bin) % n_c]);
        acc += z * roots[(nu_step * n) % total];
      }
    }
    out[nu_bin * n_c + mu_bin] = acc;
  }
}

void linear_row(std::span<const cplx> x, std::size_t m_sym, std::size_t n_c,
                const std::vector<cplx>& roots, std::size_t nu_bin, std::span<cplx> out) {
  const std::size_t total = m_sym * n_c;
  const std::size_t nu_step = wrap(centered(nu_bin, m_sym), total);
  for (std::size_t mu_bin = 0; mu_bin < n_c; ++mu_bin) {
    const long mu = centered(mu_bin, n_c);
    cplx acc{0.0, 0.0};
    for (std::size_t n = 0; n < total; ++n) {
      const long j = static_cast<long>(n) + mu;
      if (j < 0 || j >= static_cast<long>(total)) continue;
      acc += x[n] * std::conj(x[static_cast<std::size_t>(j)]) * roots[(nu_step * n) % total];
    }
    out[nu_bin * n_c + mu_bin] = acc;
  }
}

void affine_row(std::span<const cplx> coeffs, std::span<const cplx> offset,
                std::span<const double> x, std::size_t i, std::span<cplx> out) {
  const std::size_t n = x.size();
  const cplx* a = coeffs.data() + i * n;
  cplx acc = offset.empty() ? cplx{} : offset[i];
  for (std::size_t j = 0; j < n; ++j) acc += a[j] * x[j];
  out[i] = acc;
}

void cfar_row(std::span<const double> power, std::size_t rows, std::size_t cols,
              const CfarWindow& w, std::size_t r, std::span<double> out) {
  const long tn = static_cast<long>(w.train_nu + w.guard_nu);
  const long tm = static_cast<long>(w.train_mu + w.guard_mu);
  const long gn = static_cast<long>(w.guard_nu);
  const long gm = static_cast<long>(w.guard_mu);
  for (std::size_t c = 0; c < cols; ++c) {
    double acc = 0.0;
    std::size_t count = 0;
    for (long dr = -tn; dr <= tn; ++dr) {
      const std::size_t rr = wrap(static_cast<long>(r) + dr, rows);
      for (long dc = -tm; dc <= tm; ++dc) {
        if (std::abs(dr) <= gn && std::abs(dc) <= gm) continue;
        acc += power[rr * cols + wrap(static_cast<long>(c) + dc, cols)];
        ++count;
      }
    }
    out[r * cols + c] = count ? acc / static_cast<double>(count) : 0.0;
  }
}

}  // namespace

void cyclic_aaf(std::span<const cplx> x, std::size_t m_sym, std::size_t n_c,
                std::span<cplx> out) {
  const auto roots = unit_roots(m_sym * n_c);
  const long rows = static_cast<long>(m_sym);
#pragma omp parallel for schedule(dynamic)
  for (long nu = 0; nu < rows; ++nu) {
    cyclic_row(x, m_sym, n_c, roots, static_cast<std::size_t>(nu), out);
  }
}

void cyclic_aaf_serial(std::span<const cplx> x, std::size_t m_sym, std::size_t n_c,
                       std::span<cplx> out) {
  const auto roots = unit_roots(m_sym * n_c);
  for (std::size_t nu = 0; nu < m_sym; ++nu) cyclic_row(x, m_sym, n_c, roots, nu, out);
}

void linear_aaf(std::span<const cplx> x, std::size_t m_sym, std::size_t n_c,
                std::span<cplx> out) {
  const auto roots = unit_roots(m_sym * n_c);
  const long rows = static_cast<long>(m_sym);
#pragma omp parallel for schedule(dynamic)
  for (long nu = 0; nu < rows; ++nu) {
    linear_row(x, m_sym, n_c, roots, static_cast<std::size_t>(nu), out);
  }
}

void linear_aaf_serial(std::span<const cplx> x, std::size_t m_sym, std::size_t n_c,
                       std::span<cplx> out) {
  const auto roots = unit_roots(m_sym * n_c);
  for (std::size_t nu = 0; nu < m_sym; ++nu) linear_row(x, m_sym, n_c, roots, nu, out);
}

void dense_affine(std::span<const cplx> coeffs, std::span<const cplx> offset,
                  std::span<const double> x, std::span<cplx> out) {
  const long rows = static_cast<long>(out.size());
#pragma omp parallel for schedule(static) if (rows * static_cast<long>(x.size()) > 65536)
  for (long i = 0; i < rows; ++i) affine_row(coeffs, offset, x, static_cast<std::size_t>(i), out);
}

void dense_affine_serial(std::span<const cplx> coeffs, std::span<const cplx> offset,
                         std::span<const double> x, std::span<cplx> out) {
  for (std::size_t i = 0; i < out.size(); ++i) affine_row(coeffs, offset, x, i, out);
}

void cfar_mean(std::span<const double> power, std::size_t rows, std::size_t cols,
               const CfarWindow& window, std::span<double> out) {
  const long n = static_cast<long>(rows);
#pragma omp parallel for schedule(static)
  for (long r = 0; r < n; ++r) {
    cfar_row(power, rows, cols, window, static_cast<std::size_t>(r), out);
  }
}

void cfar_mean_serial(std::span<const double> power, std::size_t rows, std::size_t cols,
                      const CfarWindow& window, std::span<double> out) {
  for (std::size_t r = 0; r < rows; ++r) cfar_row(power, rows, cols, window, r, out);
}

}  // namespace isac::kernels
