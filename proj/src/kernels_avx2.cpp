// SPDX-License-Identifier: Apache-2.0
// AVX2 + FMA kernels. Compiled with -mavx2 -mfma; only reached through the
// runtime dispatch in kernels.cpp after a CPU feature check.
#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace nlin::simd::detail {
namespace {

// Cephes-style sin/cos: reduction by pi/4 with a three-part constant, then
// degree-6 minimax polynomials. Valid for |x| < 2^30.
inline void sincos4(__m256d x, __m256d* s_out, __m256d* c_out) {
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d ax = _mm256_andnot_pd(sign_bit, x);
  const __m256d xneg = _mm256_and_pd(x, sign_bit);

  __m256d y = _mm256_floor_pd(_mm256_mul_pd(ax, _mm256_set1_pd(1.27323954473516268615)));
  __m128i j = _mm256_cvttpd_epi32(y);
  j = _mm_and_si128(_mm_add_epi32(j, _mm_set1_epi32(1)), _mm_set1_epi32(~1));
  y = _mm256_cvtepi32_pd(j);

  const __m256i j64 = _mm256_cvtepi32_epi64(j);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256i four = _mm256_set1_epi64x(4);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(j64, two), two));
  const __m256d bit4 = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(j64, four), four));

  __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(7.85398125648498535156E-1), ax);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(3.77489470793079817668E-8), z);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(2.69515142907905952645E-15), z);
  const __m256d zz = _mm256_mul_pd(z, z);

  __m256d ps = _mm256_set1_pd(1.58962301576546568060E-10);
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-2.50507477628578072866E-8));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(2.75573136213857245213E-6));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.98412698295895385996E-4));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(8.33333333332211858878E-3));
  ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.66666666666666307295E-1));
  ps = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), ps, z);

  __m256d pc = _mm256_set1_pd(-1.13585365213876817300E-11);
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.08757008419747316778E-9));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-2.75573141792967388112E-7));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.48015872888517045348E-5));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-1.38888888888730564116E-3));
  pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(4.16666666666665929218E-2));
  pc = _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), pc, _mm256_fnmadd_pd(_mm256_set1_pd(0.5), zz, _mm256_set1_pd(1.0)));

  __m256d s = _mm256_blendv_pd(ps, pc, swap);
  __m256d c = _mm256_blendv_pd(pc, ps, swap);
  const __m256d sflip = _mm256_xor_pd(_mm256_and_pd(bit4, sign_bit), xneg);
  const __m256d cflip = _mm256_and_pd(_mm256_xor_pd(bit4, swap), sign_bit);
  *s_out = _mm256_xor_pd(s, sflip);
  *c_out = _mm256_xor_pd(c, cflip);
}

inline __m256d cmul2(__m256d a, __m256d b) {
  const __m256d br = _mm256_movedup_pd(b);
  const __m256d bi = _mm256_permute_pd(b, 0xF);
  const __m256d asw = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(asw, bi));
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void cmul_avx2(cplx* a, const cplx* b, std::size_t n) {
  double* pa = reinterpret_cast<double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    _mm256_storeu_pd(pa + 2 * i, cmul2(va, vb));
  }
  for (; i < n; ++i) a[i] *= b[i];
}

void mul_expi_avx2(cplx* a, const double* w, double c, double amp, std::size_t n) {
  double* pa = reinterpret_cast<double*>(a);
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vamp = _mm256_set1_pd(amp);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ph = _mm256_mul_pd(vc, _mm256_loadu_pd(w + i));
    __m256d s, co;
    sincos4(ph, &s, &co);
    s = _mm256_mul_pd(s, vamp);
    co = _mm256_mul_pd(co, vamp);
    __m256d lo = _mm256_unpacklo_pd(co, s);  // c0 s0 c2 s2
    __m256d hi = _mm256_unpackhi_pd(co, s);  // c1 s1 c3 s3
    __m256d r01 = _mm256_permute2f128_pd(lo, hi, 0x20);
    __m256d r23 = _mm256_permute2f128_pd(lo, hi, 0x31);
    _mm256_storeu_pd(pa + 2 * i, cmul2(_mm256_loadu_pd(pa + 2 * i), r01));
    _mm256_storeu_pd(pa + 2 * i + 4, cmul2(_mm256_loadu_pd(pa + 2 * i + 4), r23));
  }
  for (; i < n; ++i) {
    double ph = c * w[i];
    a[i] *= cplx(amp * std::cos(ph), amp * std::sin(ph));
  }
}

void kerr_avx2(cplx* x, cplx* y, double c, std::size_t n) {
  double* px = reinterpret_cast<double*>(x);
  double* py = reinterpret_cast<double*>(y);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x01 = _mm256_loadu_pd(px + 2 * i);
    __m256d x23 = _mm256_loadu_pd(px + 2 * i + 4);
    // hadd order: |x0|^2 |x2|^2 |x1|^2 |x3|^2, matched by unpacklo/hi below.
    __m256d pw = _mm256_hadd_pd(_mm256_mul_pd(x01, x01), _mm256_mul_pd(x23, x23));
    __m256d y01, y23;
    if (py) {
      y01 = _mm256_loadu_pd(py + 2 * i);
      y23 = _mm256_loadu_pd(py + 2 * i + 4);
      pw = _mm256_add_pd(pw, _mm256_hadd_pd(_mm256_mul_pd(y01, y01), _mm256_mul_pd(y23, y23)));
    }
    __m256d s, co;
    sincos4(_mm256_mul_pd(vc, pw), &s, &co);
    __m256d r01 = _mm256_unpacklo_pd(co, s);
    __m256d r23 = _mm256_unpackhi_pd(co, s);
    _mm256_storeu_pd(px + 2 * i, cmul2(x01, r01));
    _mm256_storeu_pd(px + 2 * i + 4, cmul2(x23, r23));
    if (py) {
      _mm256_storeu_pd(py + 2 * i, cmul2(y01, r01));
      _mm256_storeu_pd(py + 2 * i + 4, cmul2(y23, r23));
    }
  }
  for (; i < n; ++i) {
    double p = std::norm(x[i]) + (y ? std::norm(y[i]) : 0.0);
    cplx r(std::cos(c * p), std::sin(c * p));
    x[i] *= r;
    if (y) y[i] *= r;
  }
}

double energy_avx2(const cplx* x, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(x);
  const std::size_t m = 2 * n;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    __m256d a = _mm256_loadu_pd(p + i);
    __m256d b = _mm256_loadu_pd(p + i + 4);
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < m; ++i) s += p[i] * p[i];
  return s;
}

struct MuConsts {
  __m256d k, e, two_e, e2p1, four_a2, four_over_l2, gamma2, gamma2_l2, ns, ns2, eps, zero, one, abs_mask;
  bool lossless;
  bool multi;
};

inline MuConsts make_consts(double a, const MuParams& p) {
  MuConsts m;
  const double L = p.span_length;
  const double e = std::exp(-2.0 * p.alpha * L);
  m.k = _mm256_set1_pd(2.0 * constants::pi * constants::pi * p.beta2 * L * a);
  m.e = _mm256_set1_pd(e);
  m.two_e = _mm256_set1_pd(2.0 * e);
  m.e2p1 = _mm256_set1_pd(1.0 + e * e);
  m.four_a2 = _mm256_set1_pd(4.0 * p.alpha * p.alpha);
  m.four_over_l2 = _mm256_set1_pd(4.0 / (L * L));
  m.gamma2 = _mm256_set1_pd(p.gamma * p.gamma);
  m.gamma2_l2 = _mm256_set1_pd(p.gamma * p.gamma * L * L);
  m.ns = _mm256_set1_pd(static_cast<double>(p.span_count));
  m.ns2 = _mm256_set1_pd(static_cast<double>(p.span_count) * p.span_count);
  m.eps = _mm256_set1_pd(1e-8);
  m.zero = _mm256_setzero_pd();
  m.one = _mm256_set1_pd(1.0);
  m.abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  m.lossless = (p.alpha == 0.0);
  m.multi = (p.span_count != 1);
  return m;
}

double gn_row_avx2(const double* g2, const double* g3, const double* dy, double a, const MuParams& p,
                   std::size_t n) {
  const MuConsts m = make_consts(a, p);
  const bool cell = m.multi && p.cell > 0.0;
  std::vector<double> b;
  if (cell) fejer_coeffs(cell_width(2.0 * constants::pi * constants::pi * p.beta2 * p.span_length * a, p),
                         p.span_count, b);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d w = _mm256_mul_pd(_mm256_loadu_pd(g2 + j), _mm256_loadu_pd(g3 + j));
    if (_mm256_movemask_pd(_mm256_cmp_pd(w, m.zero, _CMP_NEQ_OQ)) == 0) continue;
    __m256d x = _mm256_mul_pd(m.k, _mm256_loadu_pd(dy + j));
    __m256d sx, cx;
    sincos4(x, &sx, &cx);
    // cos 2x = 1 - 2 sin^2 x
    __m256d c2x = _mm256_fnmadd_pd(_mm256_add_pd(sx, sx), sx, m.one);
    __m256d z2;
    if (m.lossless) {
      __m256d xz = _mm256_cmp_pd(x, m.zero, _CMP_EQ_OQ);
      __m256d sinc = _mm256_blendv_pd(_mm256_div_pd(sx, x), m.one, xz);
      z2 = _mm256_mul_pd(m.gamma2_l2, _mm256_mul_pd(sinc, sinc));
    } else {
      __m256d num = _mm256_fnmadd_pd(m.two_e, c2x, m.e2p1);
      __m256d den = _mm256_fmadd_pd(m.four_over_l2, _mm256_mul_pd(x, x), m.four_a2);
      z2 = _mm256_div_pd(_mm256_mul_pd(m.gamma2, num), den);
    }
    if (cell) {
      // Clenshaw on sum_k b[k] cos(2kx)
      __m256d two_c = _mm256_add_pd(c2x, c2x);
      __m256d y1 = m.zero, y2 = m.zero;
      for (std::size_t k = b.size() - 1; k >= 1; --k) {
        __m256d y = _mm256_sub_pd(_mm256_fmadd_pd(two_c, y1, _mm256_set1_pd(b[k])), y2);
        y2 = y1;
        y1 = y;
      }
      __m256d nu2 = _mm256_sub_pd(_mm256_fmadd_pd(c2x, y1, _mm256_set1_pd(b[0])), y2);
      z2 = _mm256_mul_pd(z2, nu2);
    } else if (m.multi) {
      __m256d sn, cn;
      sincos4(_mm256_mul_pd(m.ns, x), &sn, &cn);
      __m256d small = _mm256_cmp_pd(_mm256_and_pd(sx, m.abs_mask), m.eps, _CMP_LT_OQ);
      __m256d r = _mm256_div_pd(sn, sx);
      __m256d nu2 = _mm256_blendv_pd(_mm256_mul_pd(r, r), m.ns2, small);
      z2 = _mm256_mul_pd(z2, nu2);
    }
    acc = _mm256_fmadd_pd(w, z2, acc);
  }
  double s = hsum(acc);
  const double k = 2.0 * constants::pi * constants::pi * p.beta2 * p.span_length * a;
  for (; j < n; ++j) {
    double w = g2[j] * g3[j];
    if (w == 0.0) continue;
    const double x = k * dy[j];
    s += w * (cell ? zeta_abs2(x, p) * cos_series(b, std::cos(2.0 * x)) : mu_abs2(x, p));
  }
  return s;
}

cplx mu_row_avx2(const double* g2, const double* g3, const double* dy, double a, const MuParams& p,
                 std::size_t n) {
  const MuConsts m = make_consts(a, p);
  const bool cell = m.multi && p.cell > 0.0;
  std::vector<double> c;
  if (cell) cell_sinc(cell_width(2.0 * constants::pi * constants::pi * p.beta2 * p.span_length * a, p),
                      p.span_count, c);
  const __m256d gam = _mm256_set1_pd(p.gamma);
  const __m256d gl = _mm256_set1_pd(p.gamma * p.span_length);
  const __m256d two_a = _mm256_set1_pd(2.0 * p.alpha);
  const __m256d two_over_l = _mm256_set1_pd(2.0 / p.span_length);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d w = _mm256_mul_pd(_mm256_loadu_pd(g2 + j), _mm256_loadu_pd(g3 + j));
    if (_mm256_movemask_pd(_mm256_cmp_pd(w, m.zero, _CMP_NEQ_OQ)) == 0) continue;
    __m256d x = _mm256_mul_pd(m.k, _mm256_loadu_pd(dy + j));
    __m256d sx, cx;
    sincos4(x, &sx, &cx);
    __m256d c2x = _mm256_fnmadd_pd(_mm256_add_pd(sx, sx), sx, m.one);
    __m256d s2x = _mm256_mul_pd(_mm256_add_pd(sx, sx), cx);
    __m256d zr, zi;
    if (m.lossless) {
      __m256d xz = _mm256_cmp_pd(x, m.zero, _CMP_EQ_OQ);
      __m256d sinc = _mm256_blendv_pd(_mm256_div_pd(sx, x), m.one, xz);
      __m256d amp = _mm256_mul_pd(gl, sinc);
      zr = _mm256_mul_pd(amp, cx);
      zi = _mm256_mul_pd(amp, sx);
    } else {
      __m256d nr = _mm256_fnmadd_pd(m.e, c2x, m.one);
      __m256d ni = _mm256_mul_pd(_mm256_sub_pd(m.zero, m.e), s2x);
      __m256d dr = two_a;
      __m256d di = _mm256_sub_pd(m.zero, _mm256_mul_pd(two_over_l, x));
      __m256d inv = _mm256_div_pd(gam, _mm256_fmadd_pd(di, di, _mm256_mul_pd(dr, dr)));
      zr = _mm256_mul_pd(_mm256_fmadd_pd(nr, dr, _mm256_mul_pd(ni, di)), inv);
      zi = _mm256_mul_pd(_mm256_fmsub_pd(ni, dr, _mm256_mul_pd(nr, di)), inv);
    }
    __m256d pr = m.one, pi_ = m.zero;
    bool have_nu = false;
    if (cell) {
      // Horner in exp(2ix) with real coefficients
      pr = _mm256_set1_pd(c.back());
      for (std::size_t k = c.size() - 1; k-- > 0;) {
        __m256d r = _mm256_fmsub_pd(pr, c2x, _mm256_fmsub_pd(pi_, s2x, _mm256_set1_pd(c[k])));
        pi_ = _mm256_fmadd_pd(pr, s2x, _mm256_mul_pd(pi_, c2x));
        pr = r;
      }
      have_nu = true;
    } else if (m.multi) {
      __m256d sn, cn;
      sincos4(_mm256_mul_pd(m.ns, x), &sn, &cn);
      __m256d small = _mm256_cmp_pd(_mm256_and_pd(sx, m.abs_mask), m.eps, _CMP_LT_OQ);
      __m256d ratio = _mm256_blendv_pd(_mm256_div_pd(sn, sx), _mm256_div_pd(_mm256_mul_pd(m.ns, cn), cx), small);
      // e^{i(N-1)x} = e^{iNx} e^{-ix}
      pr = _mm256_mul_pd(_mm256_fmadd_pd(cn, cx, _mm256_mul_pd(sn, sx)), ratio);
      pi_ = _mm256_mul_pd(_mm256_fmsub_pd(sn, cx, _mm256_mul_pd(cn, sx)), ratio);
      have_nu = true;
    }
    if (have_nu) {
      __m256d r = _mm256_fmsub_pd(zr, pr, _mm256_mul_pd(zi, pi_));
      __m256d i = _mm256_fmadd_pd(zr, pi_, _mm256_mul_pd(zi, pr));
      zr = r;
      zi = i;
    }
    acc_re = _mm256_fmadd_pd(w, zr, acc_re);
    acc_im = _mm256_fmadd_pd(w, zi, acc_im);
  }
  cplx s(hsum(acc_re), hsum(acc_im));
  const double k = 2.0 * constants::pi * constants::pi * p.beta2 * p.span_length * a;
  for (; j < n; ++j) {
    double w = g2[j] * g3[j];
    if (w == 0.0) continue;
    const double x = k * dy[j];
    s += w * (cell ? zeta_value(x, p) * power_series(c, std::polar(1.0, 2.0 * x)) : mu_value(x, p));
  }
  return s;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{Isa::avx2, cmul_avx2, mul_expi_avx2, kerr_avx2,
                             energy_avx2, gn_row_avx2, mu_row_avx2};
  return t;
}

}  // namespace nlin::simd::detail
