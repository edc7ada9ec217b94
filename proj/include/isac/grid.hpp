#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isac/error.hpp"

namespace isac {

using cplx = std::complex<double>;

/// Dense row-major matrix indexed (symbol m, subcarrier k).
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t m, std::size_t k) { return data_[m * cols_ + k]; }
  const T& operator()(std::size_t m, std::size_t k) const { return data_[m * cols_ + k]; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  std::span<T> row(std::size_t m) { return std::span<T>(data_).subspan(m * cols_, cols_); }
  std::span<const T> row(std::size_t m) const {
    return std::span<const T>(data_).subspan(m * cols_, cols_);
  }

  template <typename U>
  bool same_shape(const Grid<U>& other) const noexcept {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

enum class GridRole { transmit, sensing, comm, received, echo };

/// Complex symbol matrix carrying what it represents (S, S_r, S_c, Y_c, Y_r).
class ComplexGrid : public Grid<cplx> {
 public:
  ComplexGrid() = default;
  ComplexGrid(std::size_t rows, std::size_t cols, GridRole role = GridRole::transmit)
      : Grid<cplx>(rows, cols), role_(role) {}

  GridRole role() const noexcept { return role_; }
  void set_role(GridRole role) noexcept { role_ = role; }

 private:
  GridRole role_ = GridRole::transmit;
};

using PowerGrid = Grid<double>;
using IndicatorGrid = Grid<std::uint8_t>;

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionMismatch(std::string(what) + ": grid shapes differ (" +
                            std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                            std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
}

inline double total(const PowerGrid& p) {
  double s = 0.0;
  for (double v : p.data()) s += v;
  return s;
}

inline std::size_t count_ones(const IndicatorGrid& u) {
  std::size_t n = 0;
  for (auto v : u.data()) n += v != 0;
  return n;
}

}  // namespace isac
