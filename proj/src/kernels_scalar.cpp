// SPDX-License-Identifier: Apache-2.0
// Reference kernels. The AVX2 variants are checked against these.
#include <cmath>

#include "kernels_impl.hpp"

namespace nlin::simd {

double zeta_abs2(double x, const MuParams& p) {
  const double L = p.span_length;
  if (p.alpha == 0.0) {
    double sinc = (x == 0.0) ? 1.0 : std::sin(x) / x;
    return p.gamma * p.gamma * L * L * sinc * sinc;
  }
  double e = std::exp(-2.0 * p.alpha * L);
  double num = 1.0 - 2.0 * e * std::cos(2.0 * x) + e * e;
  double den = 4.0 * p.alpha * p.alpha + 4.0 * x * x / (L * L);
  return p.gamma * p.gamma * num / den;
}

cplx zeta_value(double x, const MuParams& p) {
  const double L = p.span_length;
  if (p.alpha == 0.0) {
    double sinc = (x == 0.0) ? 1.0 : std::sin(x) / x;
    return p.gamma * L * sinc * cplx(std::cos(x), std::sin(x));
  }
  double e = std::exp(-2.0 * p.alpha * L);
  cplx num = 1.0 - e * cplx(std::cos(2.0 * x), std::sin(2.0 * x));
  cplx den(2.0 * p.alpha, -2.0 * x / L);
  return p.gamma * num / den;
}

double mu_abs2(double x, const MuParams& p) {
  const double zeta2 = zeta_abs2(x, p);
  if (p.span_count == 1) return zeta2;
  const double ns = p.span_count;
  double s = std::sin(x);
  double nu2;
  if (std::abs(s) < 1e-8) {
    nu2 = ns * ns;
  } else {
    double sn = std::sin(ns * x);
    nu2 = sn * sn / (s * s);
  }
  return zeta2 * nu2;
}

cplx mu_value(double x, const MuParams& p) {
  const cplx zeta = zeta_value(x, p);
  if (p.span_count == 1) return zeta;
  const double ns = p.span_count;
  double s = std::sin(x);
  double ratio = (std::abs(s) < 1e-8) ? ns * std::cos(ns * x) / std::cos(x) : std::sin(ns * x) / s;
  double ph = x * (ns - 1.0);
  return zeta * ratio * cplx(std::cos(ph), std::sin(ph));
}

double nu2_cell(double x, double h, int span_count) {
  std::vector<double> b;
  detail::fejer_coeffs(h, span_count, b);
  return detail::cos_series(b, std::cos(2.0 * x));
}

cplx nu_cell(double x, double h, int span_count) {
  std::vector<double> s;
  detail::cell_sinc(h, span_count, s);
  return detail::power_series(s, std::polar(1.0, 2.0 * x));
}

namespace {

void cmul_scalar(cplx* a, const cplx* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
}

void mul_expi_scalar(cplx* a, const double* w, double c, double amp, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double ph = c * w[i];
    a[i] *= cplx(amp * std::cos(ph), amp * std::sin(ph));
  }
}

void kerr_scalar(cplx* x, cplx* y, double c, std::size_t n) {
  if (y) {
    for (std::size_t i = 0; i < n; ++i) {
      double ph = c * (std::norm(x[i]) + std::norm(y[i]));
      cplx r(std::cos(ph), std::sin(ph));
      x[i] *= r;
      y[i] *= r;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double ph = c * std::norm(x[i]);
      x[i] *= cplx(std::cos(ph), std::sin(ph));
    }
  }
}

double energy_scalar(const cplx* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(x[i]);
  return s;
}

double gn_row_scalar(const double* g2, const double* g3, const double* dy, double a, const MuParams& p,
                     std::size_t n) {
  const double k = 2.0 * constants::pi * constants::pi * p.beta2 * p.span_length * a;
  double s = 0.0;
  if (p.span_count > 1 && p.cell > 0.0) {
    std::vector<double> b;
    detail::fejer_coeffs(detail::cell_width(k, p), p.span_count, b);
    for (std::size_t j = 0; j < n; ++j) {
      double w = g2[j] * g3[j];
      if (w == 0.0) continue;
      const double x = k * dy[j];
      s += w * zeta_abs2(x, p) * detail::cos_series(b, std::cos(2.0 * x));
    }
    return s;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double w = g2[j] * g3[j];
    if (w == 0.0) continue;
    s += w * mu_abs2(k * dy[j], p);
  }
  return s;
}

cplx mu_row_scalar(const double* g2, const double* g3, const double* dy, double a, const MuParams& p,
                   std::size_t n) {
  const double k = 2.0 * constants::pi * constants::pi * p.beta2 * p.span_length * a;
  cplx s = 0.0;
  if (p.span_count > 1 && p.cell > 0.0) {
    std::vector<double> c;
    detail::cell_sinc(detail::cell_width(k, p), p.span_count, c);
    for (std::size_t j = 0; j < n; ++j) {
      double w = g2[j] * g3[j];
      if (w == 0.0) continue;
      const double x = k * dy[j];
      s += w * zeta_value(x, p) * detail::power_series(c, std::polar(1.0, 2.0 * x));
    }
    return s;
  }
  for (std::size_t j = 0; j < n; ++j) {
    double w = g2[j] * g3[j];
    if (w == 0.0) continue;
    s += w * mu_value(k * dy[j], p);
  }
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable t{Isa::scalar, cmul_scalar, mul_expi_scalar, kerr_scalar,
                             energy_scalar, gn_row_scalar, mu_row_scalar};
  return t;
}

}  // namespace nlin::simd
