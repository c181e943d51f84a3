// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlin/dsp.hpp"
#include "nlin/fiber.hpp"

using namespace nlin;

namespace {

Signal test_channel(std::size_t symbols, int sps, double power, bool dual = true, std::uint64_t seed = 21) {
  ChannelPlan plan;
  ChannelSpec c;
  c.seed = seed;
  c.launch_power = power;
  plan.channels.push_back(c);
  return generate_channel(c, plan, symbols, sps, dual).signal;
}

double rms_error(const Signal& a, const Signal& b) {
  double e = 0.0, r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e += std::norm(a.x[i] - b.x[i]);
    r += std::norm(b.x[i]);
    if (a.dual()) {
      e += std::norm(a.y[i] - b.y[i]);
      r += std::norm(b.y[i]);
    }
  }
  return std::sqrt(e / r);
}

using Jones = std::array<cplx, 4>;  // row-major 2x2

Jones mul(const Jones& a, const Jones& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

// Jones matrix of a chain of PMD sections at angular frequency w: rotate into
// the local eigenbasis, delay the axes by +-dgd/2, rotate back.
Jones chain(const PmdRealization& r, std::size_t sections, double pmd, double len, double w) {
  Jones t{1.0, 0.0, 0.0, 1.0};
  for (std::size_t s = 0; s < sections; ++s) {
    const PmdElement e = r.element(s, pmd, len);
    const Jones u{e.u[0][0], e.u[0][1], e.u[1][0], e.u[1][1]};
    const Jones uh{std::conj(e.u[0][0]), std::conj(e.u[1][0]), std::conj(e.u[0][1]), std::conj(e.u[1][1])};
    const Jones d{std::polar(1.0, -0.5 * w * e.dgd), 0.0, 0.0, std::polar(1.0, 0.5 * w * e.dgd)};
    t = mul(mul(uh, mul(d, u)), t);
  }
  return t;
}

}  // namespace

TEST_SUITE("fiber") {
  TEST_CASE("effective length") {
    CHECK(effective_length(0.19, 80e3) / 1e3 == doctest::Approx(22.2).epsilon(0.1 / 22.2));
    CHECK(effective_length(0.19, 40e3) / 1e3 == doctest::Approx(18.9).epsilon(0.1 / 18.9));
    CHECK(effective_length(0.0, 40e3) == 40e3);
    // oracle: int_0^L exp(-a z) dz with a the power attenuation in 1/m
    const double a = 0.19 / (10.0 * std::log10(std::exp(1.0))) / 1e3;
    CHECK(effective_length(0.19, 80e3) == doctest::Approx((1.0 - std::exp(-a * 80e3)) / a).epsilon(1e-12));
  }

  TEST_CASE("dispersion parameter") {
    const double b2 = beta2_from_dispersion(units::ps_nm_km_to_si(16.8), 1550e-9);
    // ps^2/km
    CHECK(b2 / 1e-27 == doctest::Approx(-21.4).epsilon(0.02));
    // oracle: -D lambda^2 / (2 pi c)
    CHECK(b2 == doctest::Approx(-16.8e-6 * 1550e-9 * 1550e-9 / (2.0 * constants::pi * constants::c0)));
    FiberParams f;
    CHECK(f.beta2() == doctest::Approx(b2));
    CHECK(f.gamma() == doctest::Approx(2.0 * constants::pi * 2.25e-20 / (1550e-9 * 84.95e-12)));
    f.gamma_override = 1.3e-3;
    CHECK(f.gamma() == 1.3e-3);
    CHECK(f.loss_db() == doctest::Approx(0.19 * 80.0));
  }

  TEST_CASE("lossless linear propagation conserves energy") {
    FiberParams f;
    f.attenuation_db_km = 0.0;
    f.gamma_override = 0.0;
    StepControl st;
    for (bool pmd : {false, true}) {
      const Signal s = test_channel(1536, 2, 2e-3);
      PmdRealization r{pmd, 5, 0};
      const Signal out = propagate_span(s, f, st, r);
      CHECK(std::abs(out.power() / s.power() - 1.0) <= 1e-9);
    }
  }

  TEST_CASE("linear propagation equals the dispersion transfer") {
    FiberParams f;
    f.gamma_override = 0.0;
    StepControl st;
    const Signal s = test_channel(1536, 2, 2e-3);
    const Signal out = propagate_span(s, f, st, PmdRealization{});
    const Signal ref = apply_transfer(s, dispersion_transfer(f.beta2(), f.length, f.alpha()));
    CHECK(rms_error(out, ref) < 1e-10);
  }

  TEST_CASE("CW self-phase modulation") {
    FiberParams f;
    f.gamma_override = 1.3e-3;
    const double p0 = 10e-3;
    Signal cw;
    cw.sample_rate = 64e9;
    cw.x.assign(256, cplx(std::sqrt(p0), 0.0));
    StepControl st;
    const Signal out = propagate_span(cw, f, st, PmdRealization{});
    const double expected = -1.3e-3 * p0 * effective_length(0.19, 80e3);
    for (std::size_t i = 0; i < out.size(); i += 37) CHECK(std::arg(out.x[i]) == doctest::Approx(expected).epsilon(1e-3));
    CHECK(out.power() == doctest::Approx(p0 * std::pow(10.0, -0.19 * 8.0)).epsilon(1e-9));
    // dual polarization scales the rotation by dual_pol_kerr
    cw.y.assign(256, cplx(0.0, 0.0));
    const Signal dp = propagate_span(cw, f, st, PmdRealization{});
    CHECK(std::arg(dp.x[0]) == doctest::Approx(expected * 8.0 / 9.0).epsilon(1e-3));
  }

  TEST_CASE("forward then backpropagate recovers the field") {
    LinkConfig link;
    link.fiber.length = 80e3;
    StepControl st;
    const Signal s = test_channel(2048, 2, 2e-3);
    Signal cur = s;
    for (int span = 0; span < 2; ++span) cur = amplify(propagate_span(cur, link.fiber, st, PmdRealization{}), link.gain_db());
    const Signal back = backpropagate(cur, link, 2, st);
    CHECK(rms_error(back, s) < 1e-3);
  }

  TEST_CASE("step-size self-convergence") {
    FiberParams f;
    StepControl coarse, fine;
    fine.max_nonlinear_phase = 0.5 * coarse.max_nonlinear_phase;
    const Signal s = test_channel(1536, 2, 4e-3);
    PropagationStats a, b;
    const Signal o1 = propagate_span(s, f, coarse, PmdRealization{true, 3, 0}, &a);
    const Signal o2 = propagate_span(s, f, fine, PmdRealization{true, 3, 0}, &b);
    CHECK(b.steps > a.steps);
    CHECK(a.pmd_sections == b.pmd_sections);
    CHECK(rms_error(o1, o2) < 1e-4);
  }

  TEST_CASE("propagation is deterministic") {
    FiberParams f;
    StepControl st;
    const Signal s = test_channel(1536, 2, 2e-3);
    const Signal a = propagate_span(s, f, st, PmdRealization{true, 9, 1});
    const Signal b = propagate_span(s, f, st, PmdRealization{true, 9, 1});
    CHECK(rms_error(a, b) == 0.0);
  }

  TEST_CASE("PMD sections have Maxwellian mean DGD") {
    const double pmd = units::ps_sqrt_km_to_si(0.1);
    const double len = 1e3;
    const std::size_t sections = 80;
    const double dw = 2.0 * constants::pi * 1e9;
    double mean = 0.0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
      const PmdRealization r{true, static_cast<std::uint64_t>(1000 + t), 0};
      const Jones a = chain(r, sections, pmd, len, 0.0);
      const Jones b = chain(r, sections, pmd, len, dw);
      // eigenvalues of T(w + dw) T(w)^H are exp(+-i dgd dw / 2)
      const Jones ah{std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
      const Jones m = mul(b, ah);
      const cplx tr = m[0] + m[3];
      const double half = std::acos(std::clamp(0.5 * tr.real(), -1.0, 1.0));
      mean += 2.0 * half / dw;
    }
    mean /= trials;
    CHECK(mean == doctest::Approx(pmd * std::sqrt(sections * len)).epsilon(0.08));
    const PmdElement e = PmdRealization{true, 1, 2}.element(3, pmd, len);
    const cplx det = e.u[0][0] * e.u[1][1] - e.u[0][1] * e.u[1][0];
    CHECK(std::abs(det - cplx(1.0, 0.0)) < 1e-12);
  }

  TEST_CASE("amplifier and validation") {
    const Signal s = test_channel(1536, 2, 2e-3);
    CHECK(amplify(s, 10.0).power() == doctest::Approx(20e-3));
    FiberParams f;
    f.length = -1.0;
    CHECK_THROWS_AS(f.validate(), ConfigError);
    StepControl st;
    st.max_step = 0.0;
    CHECK_THROWS_AS(st.validate(), ConfigError);
  }
}
