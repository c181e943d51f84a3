// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nlin/kernels.hpp"

#include <cmath>
#include <vector>

namespace nlin::simd::detail {

// sinc(j h) for j = 0..n-1.
inline void cell_sinc(double h, int n, std::vector<double>& s) {
  s.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double y = j * h;
    s[static_cast<std::size_t>(j)] = y == 0.0 ? 1.0 : std::sin(y) / y;
  }
}

// Cosine-series coefficients of the cell-averaged |nu|^2.
inline void fejer_coeffs(double h, int n, std::vector<double>& b) {
  cell_sinc(h, n, b);
  b[0] = n;
  for (int j = 1; j < n; ++j) b[static_cast<std::size_t>(j)] *= 2.0 * (n - j);
}

// sum_j b[j] cos(j t), given c = cos t (Clenshaw).
inline double cos_series(const std::vector<double>& b, double c) {
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t j = b.size() - 1; j >= 1; --j) {
    const double y = b[j] + 2.0 * c * y1 - y2;
    y2 = y1;
    y1 = y;
  }
  return b[0] + c * y1 - y2;
}

// sum_j s[j] z^j (Horner).
inline cplx power_series(const std::vector<double>& s, cplx z) {
  cplx acc = s.back();
  for (std::size_t j = s.size() - 1; j-- > 0;) acc = acc * z + s[j];
  return acc;
}

inline double cell_width(double k, const MuParams& p) { return std::abs(k) * p.cell; }

#if defined(NLIN_HAVE_AVX2)
// Defined in kernels_avx2.cpp, which is the only TU compiled with -mavx2 -mfma.
const KernelTable& avx2_table();
#endif

}  // namespace nlin::simd::detail
