#pragma once

#include <complex>
#include <span>
#include <vector>

namespace mvsp::detail {

using cplx = std::complex<double>;

/// In-place forward DFT, X_k = sum_j x_j exp(-2 pi i jk / N). Any length.
void fft_forward(std::span<cplx> data);

/// Applies `line_op` to every 1D line of a row-major tensor along `axis`.
/// `line_op` receives a contiguous copy of the line and may resize it; the
/// result is written to a new tensor whose extent along `axis` is the new size.
template <class LineOp>
std::vector<cplx> transform_axis(const std::vector<cplx>& tensor, std::vector<int>& shape, int axis,
                                 LineOp&& line_op);

/// Type-II DCT of N samples via a length-4N FFT:
/// out_k = 2 * sum_m in_m cos(pi k (2m+1) / 2N), k = 0..N-1.
std::vector<cplx> dct2(std::span<const cplx> in);

}  // namespace mvsp::detail

#include "fft_impl.hpp"
