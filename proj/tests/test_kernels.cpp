// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlin/kernels.hpp"

using namespace nlin;
using namespace nlin::simd;

namespace {

cvec random_cvec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  cvec v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

rvec random_rvec(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  rvec v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

MuParams fiber_params(int spans, double alpha = 0.19 * std::log(10.0) / 20.0 / 1e3) {
  MuParams p;
  p.alpha = alpha;
  p.beta2 = -21.4e-27;
  p.gamma = 1.3e-3;
  p.span_length = 80e3;
  p.span_count = spans;
  return p;
}

// Brute-force midpoint average of f over [x - h/2, x + h/2].
template <class F>
auto cell_average(F f, double x, double h, int n = 20000) {
  decltype(f(x)) s{};
  for (int i = 0; i < n; ++i) s += f(x - 0.5 * h + (i + 0.5) * h / n);
  return s / static_cast<double>(n);
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("dispatch honours the environment") {
    const KernelTable& k = kernels();
    const char* env = std::getenv("NLIN_SIMD");
    if (env && std::string(env) == "scalar") CHECK(k.isa == Isa::scalar);
    CHECK(std::string(isa_name(Isa::scalar)) == "scalar");
    CHECK(scalar_kernels().isa == Isa::scalar);
  }

  TEST_CASE("closed forms") {
    const MuParams lossless = fiber_params(1, 0.0);
    CHECK(zeta_abs2(0.0, lossless) == doctest::Approx(std::pow(1.3e-3 * 80e3, 2)));
    CHECK(mu_abs2(0.7, lossless) == doctest::Approx(std::norm(mu_value(0.7, lossless))));
    const MuParams lossy = fiber_params(1);
    // zeta(0) = gamma (1 - e^{-2 alpha L}) / (2 alpha) = gamma L_eff
    const double leff = (1.0 - std::exp(-2.0 * lossy.alpha * 80e3)) / (2.0 * lossy.alpha);
    CHECK(std::abs(zeta_value(0.0, lossy) - cplx(1.3e-3 * leff, 0.0)) < 1e-12);
    const MuParams multi = fiber_params(7);
    for (double x : {0.0, 0.3, -1.2, 3.14159265358979, 10.0}) {
      CHECK(mu_abs2(x, multi) == doctest::Approx(std::norm(mu_value(x, multi))).epsilon(1e-9));
      // nu = sum_j exp(2ijx)
      cplx nu = 0.0;
      for (int j = 0; j < 7; ++j) nu += std::polar(1.0, 2.0 * j * x);
      CHECK(std::abs(mu_value(x, multi) - zeta_value(x, multi) * nu) < 1e-9 * std::abs(zeta_value(x, multi)) * 7);
    }
  }

  TEST_CASE("cell-averaged coherence factor") {
    for (int n : {1, 2, 5, 10}) {
      for (double x : {0.0, 0.4, 1.5707963, 2.9}) {
        // h = 0 reduces to the point value
        const double s = std::sin(x);
        const double nu2 = std::abs(s) < 1e-12 ? n * n : std::pow(std::sin(n * x) / s, 2);
        CHECK(nu2_cell(x, 0.0, n) == doctest::Approx(nu2).epsilon(1e-10));
        for (double h : {0.05, 0.6, 3.0}) {
          const double avg = cell_average(
              [n](double t) {
                const double st = std::sin(t);
                return std::abs(st) < 1e-12 ? double(n * n) : std::pow(std::sin(n * t) / st, 2);
              },
              x, h);
          CHECK(nu2_cell(x, h, n) == doctest::Approx(avg).epsilon(1e-6));
          const cplx cavg = cell_average(
              [n](double t) {
                cplx v = 0.0;
                for (int j = 0; j < n; ++j) v += std::polar(1.0, 2.0 * j * t);
                return v;
              },
              x, h);
          CHECK(std::abs(nu_cell(x, h, n) - cavg) < 1e-6 * n);
        }
      }
    }
  }

  TEST_CASE("avx2 kernels match the scalar reference") {
    const KernelTable* avx = avx2_kernels();
    if (!avx) {
      MESSAGE("AVX2 kernels unavailable on this build or CPU");
      return;
    }
    const KernelTable& ref = scalar_kernels();
    for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u}) {
      cvec a = random_cvec(n, 1), b = random_cvec(n, 2);
      cvec a1 = a, a2 = a;
      ref.cmul(a1.data(), b.data(), n);
      avx->cmul(a2.data(), b.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a1[i] - a2[i]) < 1e-13);

      const rvec w = random_rvec(n, 3, -1e3, 1e3);
      a1 = a;
      a2 = a;
      ref.mul_expi(a1.data(), w.data(), 0.37, 0.9, n);
      avx->mul_expi(a2.data(), w.data(), 0.37, 0.9, n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a1[i] - a2[i]) < 1e-12);

      cvec x1 = a, y1 = b, x2 = a, y2 = b;
      ref.kerr(x1.data(), y1.data(), 0.8, n);
      avx->kerr(x2.data(), y2.data(), 0.8, n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(x1[i] - x2[i]) < 1e-12);
        CHECK(std::abs(y1[i] - y2[i]) < 1e-12);
      }
      x1 = a;
      x2 = a;
      ref.kerr(x1.data(), nullptr, 0.8, n);
      avx->kerr(x2.data(), nullptr, 0.8, n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x1[i] - x2[i]) < 1e-12);

      CHECK(avx->energy(a.data(), n) == doctest::Approx(ref.energy(a.data(), n)).epsilon(1e-13));

      const rvec g2 = random_rvec(n, 4, 0.0, 1.0), g3 = random_rvec(n, 5, 0.0, 1.0);
      const rvec dy = random_rvec(n, 6, -150e9, 150e9);
      for (int spans : {1, 3, 10}) {
        for (double alpha : {0.0, 0.19 * std::log(10.0) / 20.0 / 1e3}) {
          for (double cell : {0.0, 0.4e9}) {
            MuParams p = fiber_params(spans, alpha);
            p.cell = cell;
            for (double a0 : {0.0, 3e9, -70e9}) {
              const double r1 = ref.gn_row(g2.data(), g3.data(), dy.data(), a0, p, n);
              const double r2 = avx->gn_row(g2.data(), g3.data(), dy.data(), a0, p, n);
              CHECK(r2 == doctest::Approx(r1).epsilon(1e-10));
              const cplx m1 = ref.mu_row(g2.data(), g3.data(), dy.data(), a0, p, n);
              const cplx m2 = avx->mu_row(g2.data(), g3.data(), dy.data(), a0, p, n);
              CHECK(std::abs(m1 - m2) <= 1e-10 * std::max(std::abs(m1), 1e-30));
            }
          }
        }
      }
    }
  }

  TEST_CASE("row kernels are plain sums of the closed forms") {
    const KernelTable& k = kernels();
    const std::size_t n = 37;
    const rvec g2 = random_rvec(n, 7, 0.0, 1.0), g3 = random_rvec(n, 8, 0.0, 1.0);
    const rvec dy = random_rvec(n, 9, -100e9, 100e9);
    const MuParams p = fiber_params(4);
    const double a0 = 12e9;
    const double kx = 2.0 * constants::pi * constants::pi * p.beta2 * p.span_length * a0;
    double s = 0.0;
    cplx c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s += g2[j] * g3[j] * mu_abs2(kx * dy[j], p);
      c += g2[j] * g3[j] * mu_value(kx * dy[j], p);
    }
    CHECK(k.gn_row(g2.data(), g3.data(), dy.data(), a0, p, n) == doctest::Approx(s).epsilon(1e-9));
    CHECK(std::abs(k.mu_row(g2.data(), g3.data(), dy.data(), a0, p, n) - c) < 1e-9 * std::abs(c));
  }
}
