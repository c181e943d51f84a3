// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "synthetic.hpp"

using namespace nlin;
using nlin::testing::synthetic_frame;

TEST_SUITE("metrics") {
  TEST_CASE("noise power of a known offset") {
    SymbolFrame f;
    f.symbol_rate = 28e9;
    f.tx_x = random_symbols(Modulation::QPSK, 4096, 1);
    f.rx_x = f.tx_x;
    for (std::size_t i = 0; i < f.size(); ++i) f.rx_x[i] += (i % 2 ? 0.01 : -0.01);
    CHECK(noise_power(f) == doctest::Approx(28e9 * 1e-4).epsilon(1e-9));
    f.rx_x = f.tx_x;
    CHECK(noise_power(f) == 0.0);
  }

  TEST_CASE("rotate and scale into the symbol frame") {
    const cvec tx{cplx(1, 1), cplx(-2, 0), cplx(0, 3)};
    cvec rx(tx.size());
    for (std::size_t i = 0; i < tx.size(); ++i) rx[i] = tx[i] * cplx(0.5, -0.2);
    for (const cplx& r : rotate_scale(tx, rx)) CHECK(std::abs(r - cplx(0.5, -0.2)) < 1e-15);
  }

  TEST_CASE("monitor signal on pure circular noise approaches zero from below") {
    const auto s = synthetic_frame(1 << 16, 0.0, 0.05, 100, 3);
    const auto& f = s.frame;
    double prev = -1.0;
    for (int n : {2, 4, 8, 16, 32}) {
      const MonitorValue m = monitor_signal(f.tx_x, f.rx_x, n);
      CHECK(m.m < 0.0);
      CHECK(m.m > prev);
      // the window estimate removes one of N+1 in-phase degrees of freedom
      CHECK(m.m == doctest::Approx(-1.0 / (n + 1)).epsilon(0.05));
      prev = m.m;
    }
    CHECK(monitor_signal(f.tx_x, f.tx_x, 4).zero_noise);
    CHECK_THROWS_AS(monitor_signal(f.tx_x, f.rx_x, 1), ConfigError);
  }

  TEST_CASE("monitor signal crosses zero well inside a phase block") {
    const auto s = synthetic_frame(1 << 14, 0.05, 0.03, 50, 4);
    const auto& f = s.frame;
    int cross = 0;
    for (int n = 2; n < 50 && !cross; ++n)
      if (monitor_signal(f.tx_x, f.rx_x, n).m >= 0.0) cross = n;
    CHECK(cross > 0);
    CHECK(cross < 25);
  }

  TEST_CASE("separation recovers a known decomposition") {
    const auto s = synthetic_frame(1 << 15, 0.05, 0.05, 100, 5);
    const NoiseReport r = measure(s.frame);
    CHECK(r.p_phase == doctest::Approx(s.p_phase).epsilon(0.10));
    CHECK(r.p_circular == doctest::Approx(s.p_circular).epsilon(0.10));
    CHECK((r.p_phase + r.p_circular) == doctest::Approx(r.p_nli).epsilon(0.02));
    CHECK(r.cnr_percent >= 0.0);
    CHECK(r.cnr_percent <= 100.0);
    CHECK_FALSE(r.search_exhausted);
    CHECK_FALSE(r.large_angle);
  }

  TEST_CASE("pure circular noise exhausts the search") {
    const auto s = synthetic_frame(1 << 14, 0.0, 0.05, 100, 6);
    const Separation sep = separate_phase_circular(s.frame, 0.0, 512);
    CHECK(sep.exhausted);
    CHECK(sep.n_opt == 512);
    const double pp = phase_noise_power(sep.trace, s.frame);
    CHECK(pp < 0.05 * noise_power(s.frame));
  }

  TEST_CASE("monitor signal is non-decreasing over the search") {
    const auto s = synthetic_frame(1 << 14, 0.05, 0.05, 100, 7);
    const Separation sep = separate_phase_circular(s.frame, 0.0, 200);
    REQUIRE(sep.m_x.size() > 3);
    for (std::size_t i = 1; i < sep.m_x.size(); ++i) {
      CHECK(sep.m_x[i] >= sep.m_x[i - 1] - 0.005);
      CHECK(sep.m_y[i] >= sep.m_y[i - 1] - 0.005);
    }
  }

  TEST_CASE("phase noise autocorrelation") {
    rvec dt(1000);
    for (std::size_t i = 0; i < dt.size(); ++i) dt[i] = std::sin(2.0 * constants::pi * i / 100.0);
    const rvec acf = phase_acf(dt, 60);
    REQUIRE(acf.size() == 61u);
    CHECK(acf[0] == doctest::Approx(1.0));
    CHECK(acf[50] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(acf[25] == doctest::Approx(0.0).scale(1.0));
  }

  TEST_CASE("averaging reports") {
    NoiseReport a, b;
    a.scenario = b.scenario = "A";
    a.p_nli = 1.0;
    b.p_nli = 3.0;
    a.p_circular = 0.5;
    b.p_circular = 0.5;
    a.acf = {1.0, 0.5};
    b.acf = {1.0, 0.3};
    const NoiseReport m = average_reports({a, b});
    CHECK(m.p_nli == 2.0);
    CHECK(m.cnr_percent == doctest::Approx(25.0));
    CHECK(m.count == 2);
    CHECK(m.realization == -1);
    CHECK(m.p_nli_spread == doctest::Approx(0.5));
    CHECK(m.acf[1] == doctest::Approx(0.4));
    b.distance = 1e3;
    CHECK_THROWS_AS(average_reports({a, b}), ConfigError);
    CHECK_THROWS_AS(average_reports({}), ConfigError);
  }
}
