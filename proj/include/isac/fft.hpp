#pragma once

#include <cstddef>
#include <span>

#include "isac/grid.hpp"

// Thin FFTW wrapper. Transforms are unnormalized:
//   forward:  X[k] = sum_n x[n] e^{-j 2 pi n k / N}
//   backward: x[n] = sum_k X[k] e^{+j 2 pi n k / N}
// Plans are cached process-wide; execution is thread-safe.
namespace isac::fft {

enum class Direction { forward, backward };

/// In-place 1-D transform of a contiguous sequence.
void transform(std::span<cplx> data, Direction dir);

/// In-place transform of every row of a row-major rows x cols block.
void transform_rows(std::span<cplx> data, std::size_t rows, std::size_t cols, Direction dir);

/// In-place transform of every column of a row-major rows x cols block.
void transform_cols(std::span<cplx> data, std::size_t rows, std::size_t cols, Direction dir);

}  // namespace isac::fft
