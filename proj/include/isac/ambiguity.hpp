#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "isac/frame.hpp"
#include "isac/grid.hpp"

namespace isac {

/// Centered index set [-floor(n/2), n-1-floor(n/2)] and its mapping to DFT bins.
struct CenteredAxis {
  static int lo(std::size_t n) { return -static_cast<int>(n / 2); }
  static int hi(std::size_t n) { return static_cast<int>(n) - 1 - static_cast<int>(n / 2); }
  static std::size_t bin(int i, std::size_t n) {
    const int ln = static_cast<int>(n);
    return static_cast<std::size_t>(((i % ln) + ln) % ln);
  }
  static int centered(std::size_t bin, std::size_t n) {
    const int b = static_cast<int>(bin);
    return b > hi(n) ? b - static_cast<int>(n) : b;
  }
};

enum class CellStatus : std::uint8_t { free, fixed_roi, mirrored };

/// Delay-Doppler function gamma(nu, mu) dual to a power grid. Public indices are centered;
/// storage is in DFT-bin order (row nu mod M, column mu mod N_c).
class GammaGrid {
 public:
  GammaGrid() = default;
  GammaGrid(std::size_t m, std::size_t n)
      : m_(m), n_(n), values_(m * n), status_(m * n, CellStatus::free) {}

  std::size_t m() const noexcept { return m_; }
  std::size_t n() const noexcept { return n_; }

  cplx& at(int nu, int mu) { return values_[index(nu, mu)]; }
  const cplx& at(int nu, int mu) const { return values_[index(nu, mu)]; }
  CellStatus status(int nu, int mu) const { return status_[index(nu, mu)]; }
  void set_status(int nu, int mu, CellStatus s) { status_[index(nu, mu)] = s; }

  std::size_t index(int nu, int mu) const {
    return CenteredAxis::bin(nu, m_) * n_ + CenteredAxis::bin(mu, n_);
  }
  /// Bin of the conjugate partner (-nu, -mu).
  std::size_t mirror_index(std::size_t idx) const {
    const std::size_t r = idx / n_;
    const std::size_t c = idx % n_;
    return ((m_ - r) % m_) * n_ + (n_ - c) % n_;
  }

  std::vector<cplx>& values() noexcept { return values_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  std::vector<CellStatus>& statuses() noexcept { return status_; }
  const std::vector<CellStatus>& statuses() const noexcept { return status_; }

  double frobenius_norm() const;

 private:
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::vector<cplx> values_;
  std::vector<CellStatus> status_;
};

/// Region of interest: a block of the upper delay-Doppler half plane around the origin.
class Roi {
 public:
  /// a must divide m and b must divide n. Throws InvalidConfig otherwise.
  static Roi from_divisors(std::size_t m, std::size_t n, std::size_t a, std::size_t b);

  std::size_t a() const noexcept { return a_; }
  std::size_t b() const noexcept { return b_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t n() const noexcept { return n_; }

  int nu_lo() const noexcept { return nu_lo_; }
  int nu_hi() const noexcept { return nu_hi_; }
  int mu_hi() const noexcept { return mu_hi_; }

  /// Membership of the region of interest.
  bool contains(int nu, int mu) const noexcept {
    return nu >= nu_lo_ && nu <= nu_hi_ && mu >= 0 && mu <= mu_hi_;
  }
  /// Membership of the upper half plane.
  bool in_upper(int nu, int mu) const noexcept {
    return nu >= CenteredAxis::lo(m_) && nu <= CenteredAxis::hi(m_) && mu >= 0 &&
           mu <= CenteredAxis::hi(n_);
  }
  /// Upper half plane minus the region of interest ("irrelevant" cells).
  bool in_outer(int nu, int mu) const noexcept { return in_upper(nu, mu) && !contains(nu, mu); }

  std::vector<std::pair<int, int>> cells() const;
  std::vector<std::pair<int, int>> sidelobe_cells() const;

  /// Distance and speed coverage implied by the divisors.
  double distance_coverage(const FrameConfig& cfg) const;
  double speed_coverage(const FrameConfig& cfg) const;

  bool operator==(const Roi&) const = default;

 private:
  std::size_t m_ = 0, n_ = 0, a_ = 1, b_ = 1;
  int nu_lo_ = 0, nu_hi_ = 0, mu_hi_ = 0;
};

/// Largest divisors a of M and b of N_c whose coverage still contains [-u0, u0] and [0, d0].
/// Throws ScopeError if the request exceeds what the frame resolves.
Roi make_roi(const FrameConfig& cfg, double d0, double u0);

enum class Provenance { exact, approx };

/// Auto-ambiguity values over the centered grid, bin-ordered like GammaGrid.
struct AmbiguitySurface {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<cplx> values;
  Provenance provenance = Provenance::approx;
  std::vector<cplx> eta;  // per nu bin; filled for approx surfaces

  const cplx& at(int nu, int mu) const {
    return values[CenteredAxis::bin(nu, m) * n + CenteredAxis::bin(mu, n)];
  }
};

/// gamma(nu, mu) = sum_{m,k} P(m,k) e^{-j 2 pi mu k / N_c} e^{j 2 pi nu m / M}.
GammaGrid gamma_from_power(const PowerGrid& p);

struct PowerFromGamma {
  PowerGrid power;
  double imag_residue = 0.0;  // max |Im P(m,k)| before the real part was taken
};

/// Inverse transform. With require_symmetric, an imaginary residue above
/// tol * ||gamma|| raises SymmetryViolation.
PowerFromGamma power_from_gamma(const GammaGrid& g, bool require_symmetric = false,
                                double tol = 1e-10);

/// Dirichlet factor eta(nu) = sum_{n=0}^{N_c-1} e^{j 2 pi nu n / (M N_c)} in closed form.
cplx eta_factor(int nu, std::size_t m, std::size_t n);

/// chi(nu, mu) ~= gamma(nu, mu) eta(nu).
AmbiguitySurface approx_aaf(const PowerGrid& p);

/// Per-symbol (CP-protected) exact auto-ambiguity of a raw, CP-free sequence.
/// Refuses inputs longer than max_samples samples.
AmbiguitySurface exact_aaf(const TimeSeries& x, const FrameConfig& cfg,
                           std::size_t max_samples = 8192);

/// Linear correlation over the whole frame without the per-symbol cyclic structure.
AmbiguitySurface linear_aaf(const TimeSeries& x, const FrameConfig& cfg,
                            std::size_t max_samples = 8192);

/// Largest |chi| over the region of interest excluding the origin.
double max_roi_sidelobe(const AmbiguitySurface& chi, const Roi& roi);

/// 20 log10(|chi(0,0)| / max sidelobe). Returns +infinity when every sidelobe is zero.
double pslr_db(const AmbiguitySurface& chi, const Roi& roi);

/// Makes gamma centrohermitian. Fixed cells are never modified; their partners and every
/// other non-canonical cell become conjugates; self-paired cells are made real.
/// Throws ConsistencyError when two fixed partners disagree beyond tol (relative).
GammaGrid enforce_centrohermitian(GammaGrid g, double tol = 1e-9);

/// Stamps the locally perfect pattern: gamma(0,0) = p_bar, zero on the rest of the region
/// of interest (and the mirrors), and marks cell statuses.
void fix_roi_cells(GammaGrid& g, const Roi& roi, double p_bar);

/// Writes "nu,mu,abs,arg" rows in centered order.
void write_surface_csv(std::ostream& os, const AmbiguitySurface& chi);
/// Row-major centered order, little-endian float64 (re, im) pairs, no header.
void write_surface_binary(std::ostream& os, const AmbiguitySurface& chi);

}  // namespace isac
