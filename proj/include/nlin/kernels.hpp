// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "nlin/common.hpp"

namespace nlin::simd {

enum class Isa { scalar, avx2 };

// Link-model parameters of the FWM weight mu = zeta * nu, shared by the GN
// and EGN quadrature rows. x = 2 pi^2 beta2 (f1-f)(f2-f) L.
struct MuParams {
  double alpha = 0.0;       // field attenuation [1/m]
  double beta2 = 0.0;       // [s^2/m]
  double gamma = 0.0;       // [1/(W m)]
  double span_length = 0.0; // [m]
  int span_count = 1;
  // Width of the dy cells [Hz]. When positive, the row kernels replace the
  // coherence factor at each sample by its exact average over the cell.
  double cell = 0.0;
};

struct KernelTable {
  Isa isa;
  // a[i] *= b[i]
  void (*cmul)(cplx* a, const cplx* b, std::size_t n);
  // a[i] *= amp * exp(i * c * w[i])
  void (*mul_expi)(cplx* a, const double* w, double c, double amp, std::size_t n);
  // phi = c * (|x|^2 + |y|^2); x, y *= exp(i phi). y may be null (single polarization).
  void (*kerr)(cplx* x, cplx* y, double c, std::size_t n);
  // sum |x|^2
  double (*energy)(const cplx* x, std::size_t n);
  // sum_j g2[j] g3[j] |mu(a * dy[j])|^2
  double (*gn_row)(const double* g2, const double* g3, const double* dy, double a, const MuParams& p,
                   std::size_t n);
  // sum_j g2[j] g3[j] mu(a * dy[j])
  cplx (*mu_row)(const double* g2, const double* g3, const double* dy, double a, const MuParams& p,
                 std::size_t n);
};

// Runtime-selected table: AVX2+FMA when the CPU supports it and the build
// includes it, unless NLIN_SIMD=scalar is set in the environment.
const KernelTable& kernels();
const KernelTable& scalar_kernels();
// Null when the AVX2 variant is unavailable on this build or CPU.
const KernelTable* avx2_kernels();
const char* isa_name(Isa isa);

// Scalar closed forms used by the kernels and by the analytic models.
double zeta_abs2(double x, const MuParams& p);
cplx zeta_value(double x, const MuParams& p);
double mu_abs2(double x, const MuParams& p);
cplx mu_value(double x, const MuParams& p);

// Coherence factor averaged over x in [x - h/2, x + h/2]:
// |nu|^2 -> N + 2 sum_{j=1}^{N-1} (N - j) cos(2jx) sinc(jh),
// nu -> sum_{j=0}^{N-1} exp(2ijx) sinc(jh).
double nu2_cell(double x, double h, int span_count);
cplx nu_cell(double x, double h, int span_count);

}  // namespace nlin::simd
