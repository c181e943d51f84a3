// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nlin/common.hpp"

namespace nlin::fft {

// Unnormalized DFTs backed by FFTW. forward: X_k = sum_n x_n e^{-2 pi i kn/N};
// inverse applies e^{+2 pi i kn/N} and divides by N, so inverse(forward(x)) == x.
// In-place operation (in == out) is allowed. Plans are cached per size and
// alignment; execution is thread-safe.
void forward(const cplx* in, cplx* out, std::size_t n);
void inverse(const cplx* in, cplx* out, std::size_t n);

inline void forward(cvec& v) { forward(v.data(), v.data(), v.size()); }
inline void inverse(cvec& v) { inverse(v.data(), v.data(), v.size()); }

// Offset of bin k in units of the bin spacing: 0..ceil(n/2)-1 are
// non-negative, the rest map to k - n.
inline long bin_index_offset(std::size_t k, std::size_t n) {
  return k < (n + 1) / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

// Inverse of bin_index_offset for offsets in [-(n/2), (n-1)/2].
inline std::size_t bin_of_offset(long offset, std::size_t n) {
  long m = offset % static_cast<long>(n);
  if (m < 0) m += static_cast<long>(n);
  return static_cast<std::size_t>(m);
}

// Frequency offsets of all bins for a grid of n bins spaced df.
rvec bin_frequencies(std::size_t n, double df);

}  // namespace nlin::fft
