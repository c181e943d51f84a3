// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlin/collision.hpp"
#include "nlin/waveform.hpp"

using namespace nlin;

namespace {

CollisionIndex idx(int h, int k, int m, double offset = 2.0 * constants::pi * 50e9) { return {h, k, m, offset}; }

rvec tau_grid(std::size_t n, double dt) {
  rvec t(n);
  for (std::size_t j = 0; j < n; ++j) t[j] = (static_cast<double>(j) - 0.5 * static_cast<double>(n)) * dt;
  return t;
}

double energy(const cvec& g, double dt) {
  double e = 0.0;
  for (const auto& v : g) e += std::norm(v);
  return e * dt;
}

double rms_width2(const cvec& g, const rvec& tau) {
  double e = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double p = std::norm(g[j]);
    e += p;
    m1 += p * tau[j];
    m2 += p * tau[j] * tau[j];
  }
  m1 /= e;
  return m2 / e - m1 * m1;
}

// Two-pulse terms (0, m, m) for m in [-span, span].
std::vector<CollisionIndex> two_pulse_set(int span) {
  std::vector<CollisionIndex> v;
  for (int m = -span; m <= span; ++m) v.push_back(idx(0, m, m));
  return v;
}

}  // namespace

TEST_SUITE("collision") {
  TEST_CASE("classification partitions the index space") {
    CHECK(classify(idx(0, 3, 3)) == CollisionType::TWO_PULSE);
    CHECK(classify(idx(0, 2, 5)) == CollisionType::THREE_PULSE_A);
    CHECK(classify(idx(4, 1, 1)) == CollisionType::THREE_PULSE_B);
    CHECK(classify(idx(2, 3, 7)) == CollisionType::FOUR_PULSE);
    for (int h = -3; h <= 3; ++h)
      for (int k = -3; k <= 3; ++k)
        for (int m = -3; m <= 3; ++m) {
          const CollisionType t = classify(idx(h, k, m));
          const CollisionType expect = h == 0 ? (k == m ? CollisionType::TWO_PULSE : CollisionType::THREE_PULSE_A)
                                              : (k == m ? CollisionType::THREE_PULSE_B : CollisionType::FOUR_PULSE);
          CHECK(t == expect);
        }
    CHECK(std::string(to_string(CollisionType::FOUR_PULSE)).size() > 0);
  }

  TEST_CASE("dispersed pulses conserve energy and broaden") {
    const CollisionDemo demo;
    const double dt = demo.pulse.period() / 8.0;
    const rvec tau = tau_grid(4096, dt);
    const cvec g0 = dispersed_pulse(0.0, tau, demo.pulse, demo.link.beta2);
    CHECK(energy(g0, dt) == doctest::Approx(demo.pulse.period()).epsilon(1e-6));
    // z = 0 is the RRC pulse itself
    const double t0 = demo.pulse.period();
    for (std::size_t j = 2048 - 40; j < 2048 + 40; j += 7)
      CHECK(std::abs(g0[j] - rrc_impulse(tau[j] / t0, demo.pulse.roll_off)) < 1e-6);
    const double z = 80e3;
    const cvec gz = dispersed_pulse(z, tau, demo.pulse, demo.link.beta2);
    CHECK(energy(gz, dt) == doctest::Approx(energy(g0, dt)).epsilon(1e-9));
    // chirp-free start: sigma_t^2(z) = sigma_t^2(0) + (beta2 z)^2 <w^2>,
    // <w^2> from the raised-cosine power spectrum
    double num = 0.0, den = 0.0;
    const double s = demo.pulse.symbol_rate, r = demo.pulse.roll_off;
    for (double f = -0.6 * s * (1.0 + r); f <= 0.6 * s * (1.0 + r); f += s * 1e-4) {
      const double p = raised_cosine(f, s, r);
      num += p * std::pow(2.0 * constants::pi * f, 2);
      den += p;
    }
    const double grow = std::pow(demo.link.beta2 * z, 2) * num / den;
    CHECK(rms_width2(gz, tau) - rms_width2(g0, tau) == doctest::Approx(grow).epsilon(0.10));
    const rvec narrow = tau_grid(64, dt);
    CHECK_THROWS_AS(dispersed_pulse(z, narrow, demo.pulse, demo.link.beta2), NumericalError);
  }

  TEST_CASE("coefficient symmetries") {
    const CollisionDemo demo;
    for (int m : {-5, 0, 4}) {
      const cplx x = collision_coefficient(idx(0, m, m), demo.link, demo.pulse);
      CHECK(std::abs(x.imag()) < 1e-6 * std::abs(x));
    }
    const cplx a = collision_coefficient(idx(0, 2, 5), demo.link, demo.pulse);
    const cplx b = collision_coefficient(idx(0, 5, 2), demo.link, demo.pulse);
    CHECK(std::abs(a - std::conj(b)) < 1e-6 * std::abs(a));
  }

  TEST_CASE("coefficients decay with index separation") {
    CollisionDemo demo;
    demo.link.length = demo.link.span_length = 20e3;
    double dominant = 0.0;
    for (int m = -6; m <= 6; ++m)
      dominant = std::max(dominant, std::abs(collision_coefficient(idx(0, m, m), demo.link, demo.pulse)));
    CHECK(std::abs(collision_coefficient(idx(12, 0, 9), demo.link, demo.pulse)) < 1e-3 * dominant);
    CHECK(std::abs(collision_coefficient(idx(0, 40, 40), demo.link, demo.pulse)) < 1e-3 * dominant);
  }

  TEST_CASE("accumulation curves") {
    const CollisionDemo demo;
    const rvec z = collision_z_grid(demo.link, demo.pulse, demo.offset);
    // the strongest complete two-pulse collision builds up monotonically
    const cvec two = accumulation_curve(idx(0, -8, -8), demo.link, z, demo.pulse);
    for (std::size_t j = 1; j < two.size(); ++j) CHECK(std::abs(two[j]) >= std::abs(two[j - 1]) - 1e-12 * std::abs(two.back()));
    CHECK(std::abs(two.back() - collision_coefficient(idx(0, -8, -8), demo.link, demo.pulse, false)) <
          1e-9 * std::abs(two.back()));
    // some four-pulse collision overshoots its final value
    bool overshoot = false;
    for (int k = -12; k <= 0 && !overshoot; k += 2) {
      const cvec c = accumulation_curve(idx(1, k, k - 1), demo.link, z, demo.pulse);
      double peak = 0.0;
      for (const auto& v : c) peak = std::max(peak, std::abs(v));
      overshoot = peak > 1.5 * std::abs(c.back());
    }
    CHECK(overshoot);
  }

  TEST_CASE("two-pulse perturbation is perpendicular to the symbol") {
    CollisionDemo demo;
    demo.link.length = demo.link.span_length = 30e3;
    const CollisionTable table = collision_table(two_pulse_set(12), demo.link, demo.pulse);
    SymbolWindow cut{{cplx(1.0, 0.0)}, 0};
    SymbolWindow ints{random_symbols(Modulation::QAM16, 25, 3), -12};
    const Perturbation p = xci_perturbation(cut, ints, table, demo.link.gamma);
    CHECK(std::abs(p.two_pulse.real()) < 1e-6 * std::abs(p.two_pulse));
    CHECK(p.three_pulse_a == cplx(0.0));
    // three-pulse type A pairs combine into a rotation as well
    const CollisionTable a =
        collision_table({idx(0, 1, 3), idx(0, 3, 1), idx(0, -2, 4), idx(0, 4, -2)}, demo.link, demo.pulse);
    const Perturbation pa = xci_perturbation(cut, ints, a, demo.link.gamma);
    CHECK(std::abs(pa.three_pulse_a.real()) < 1e-6 * std::abs(pa.three_pulse_a));
  }

  TEST_CASE("two-pulse variance follows the fourth moment") {
    CollisionDemo demo;
    demo.link.length = demo.link.span_length = 30e3;
    const int span = 12;
    const CollisionTable table = collision_table(two_pulse_set(span), demo.link, demo.pulse);
    const SymbolWindow cut{{cplx(1.0, 0.0)}, 0};
    const int draws = 20000;
    auto variance = [&](Modulation m) {
      const cvec b = random_symbols(m, static_cast<std::size_t>(draws) * (2 * span + 1), 17);
      cplx mean = 0.0;
      double m2 = 0.0;
      for (int d = 0; d < draws; ++d) {
        SymbolWindow w{cvec(b.begin() + d * (2 * span + 1), b.begin() + (d + 1) * (2 * span + 1)), -span};
        const cplx v = xci_perturbation(cut, w, table, demo.link.gamma).two_pulse;
        mean += v;
        m2 += std::norm(v);
      }
      mean /= draws;
      return m2 / draws - std::norm(mean);
    };
    const double g = variance(Modulation::GAUSSIAN);
    CHECK(variance(Modulation::QPSK) < 1e-4 * g);
    CHECK(variance(Modulation::QAM16) / g == doctest::Approx(0.32).epsilon(0.10));
  }

  TEST_CASE("index selection and validation") {
    CollisionDemo demo;
    demo.link.length = demo.link.span_length = 20e3;
    const auto set = collision_indices(demo.link, demo.pulse, demo.offset);
    REQUIRE_FALSE(set.empty());
    CHECK(std::any_of(set.begin(), set.end(), [](const CollisionIndex& i) { return i.h == 0 && i.k == 0 && i.m == 0; }));
    CollisionLink bad = demo.link;
    bad.length = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    PulseSpec p;
    p.roll_off = 1.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
  }
}
