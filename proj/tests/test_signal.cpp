// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlin/fft.hpp"
#include "nlin/signal.hpp"

using namespace nlin;

namespace {

Signal noise_signal(std::size_t n, bool dual, std::uint64_t seed, double rate = 64e9) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1e-2);
  Signal s;
  s.sample_rate = rate;
  s.x.resize(n);
  for (auto& v : s.x) v = {g(rng), g(rng)};
  if (dual) {
    s.y.resize(n);
    for (auto& v : s.y) v = {g(rng), g(rng)};
  }
  return s;
}

double max_diff(const cvec& a, const cvec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("signal") {
  TEST_CASE("unit conversions") {
    CHECK(units::dbm_to_watt(0.0) == doctest::Approx(1e-3));
    CHECK(units::watt_to_dbm(2e-3) == doctest::Approx(3.0103).epsilon(1e-4));
    CHECK(units::db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(units::linear_to_db(100.0) == doctest::Approx(20.0));
    CHECK(units::ps_nm_km_to_si(16.8) == doctest::Approx(16.8e-6));
    CHECK(units::ps_nm_to_si(13000.0) == doctest::Approx(13000e-12 / 1e-9));
    CHECK(units::ps_sqrt_km_to_si(0.1) == doctest::Approx(0.1e-12 / std::sqrt(1e3)));
    // 0.19 dB/km of power is 0.19 ln10 / 20 per km of field
    CHECK(units::db_km_to_field_np_m(0.19) == doctest::Approx(0.19 * std::log(10.0) / 20.0 / 1e3));
  }

  TEST_CASE("seed mixing is deterministic and separates streams") {
    CHECK(mix_seed(1, 2) == mix_seed(1, 2));
    CHECK(mix_seed(1, 2) != mix_seed(2, 1));
    CHECK(mix_seed(1, 2, 3) != mix_seed(1, 3, 2));
  }

  TEST_CASE("fft round trip and bin convention") {
    cvec v(12);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = {std::sin(0.3 * i), std::cos(1.1 * i)};
    cvec w = v;
    fft::forward(w);
    // bin 1 of a unit tone exp(2 pi i n / N) carries N
    cvec tone(16);
    for (std::size_t i = 0; i < tone.size(); ++i) tone[i] = std::polar(1.0, 2.0 * constants::pi * i / 16.0);
    fft::forward(tone);
    CHECK(std::abs(tone[1] - cplx(16.0, 0.0)) < 1e-12);
    CHECK(std::abs(tone[15]) < 1e-12);
    fft::inverse(w);
    CHECK(max_diff(v, w) < 1e-14);
    CHECK(fft::bin_index_offset(7, 12) == -5);
    CHECK(fft::bin_index_offset(5, 12) == 5);
    CHECK(fft::bin_index_offset(6, 13) == 6);
    CHECK(fft::bin_of_offset(-5, 12) == 7);
    const rvec f = fft::bin_frequencies(4, 10.0);
    CHECK(f[0] == 0.0);
    CHECK(f[1] == 10.0);
    CHECK(f[2] == -20.0);
    CHECK(f[3] == -10.0);
  }

  TEST_CASE("spectrum power matches time-domain power") {
    for (bool dual : {false, true}) {
      const Signal s = noise_signal(1000, dual, 5);
      const Spectrum sp = forward_transform(s);
      CHECK(sp.power() == doctest::Approx(s.power()).epsilon(1e-12));
      CHECK(sp.bin_spacing == doctest::Approx(s.sample_rate / 1000.0));
      const Signal back = inverse_transform(sp);
      CHECK(max_diff(back.x, s.x) < 1e-15);
      if (dual) CHECK(max_diff(back.y, s.y) < 1e-15);
    }
  }

  TEST_CASE("transfer functions") {
    const Signal s = noise_signal(512, true, 9);
    const Signal same = apply_transfer(s, [](double) { return cplx(1.0, 0.0); });
    CHECK(max_diff(same.x, s.x) < 1e-15);
    // a linear phase of one sample period is a circular shift by one sample
    const double fs = s.sample_rate;
    const Signal shifted =
        apply_transfer(s, [fs](double f) { return std::polar(1.0, -2.0 * constants::pi * f / fs); });
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(shifted.x[(i + 1) % s.size()] - s.x[i]) < 1e-12);
  }

  TEST_CASE("helpers") {
    const Signal a = noise_signal(64, true, 1);
    const Signal b = noise_signal(64, true, 2);
    const Signal s = add(a, b);
    CHECK(std::abs(s.x[3] - (a.x[3] + b.x[3])) < 1e-18);
    const Signal g = scaled(a, 2.0);
    CHECK(g.power() == doctest::Approx(4.0 * a.power()));
    Signal bad = a;
    bad.sample_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }

  TEST_CASE("psd estimate integrates to the signal power") {
    const Signal s = noise_signal(1 << 14, true, 3);
    const Psd p = psd_estimate(s, s.sample_rate / 256.0);
    CHECK(p.integral() == doctest::Approx(s.power()).epsilon(1e-9));
    for (std::size_t i = 1; i < p.frequency.size(); ++i) CHECK(p.frequency[i] > p.frequency[i - 1]);
    // a tone lands within a few bins of its frequency
    Signal tone;
    tone.sample_rate = 64e9;
    tone.x.resize(1 << 12);
    for (std::size_t i = 0; i < tone.x.size(); ++i)
      tone.x[i] = std::polar(1e-2, 2.0 * constants::pi * 4e9 * static_cast<double>(i) / 64e9);
    const Psd t = psd_estimate(tone, 250e6);
    std::size_t peak = 0;
    for (std::size_t i = 0; i < t.value.size(); ++i)
      if (t.value[i] > t.value[peak]) peak = i;
    CHECK(std::abs(t.frequency[peak] - 4e9) <= 250e6);
    CHECK(t.integral(3e9, 5e9) == doctest::Approx(1e-4).epsilon(1e-3));
    CHECK_THROWS_AS(psd_estimate(s, s.sample_rate), ConfigError);
  }
}
