// SPDX-License-Identifier: Apache-2.0
#include "nlin/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nlin/fft.hpp"
#include "nlin/kernels.hpp"

namespace nlin {

double FiberParams::alpha() const { return units::db_km_to_field_np_m(attenuation_db_km); }

double FiberParams::beta2() const { return beta2_from_dispersion(dispersion, wavelength); }

double FiberParams::gamma() const {
  if (gamma_override) return *gamma_override;
  return 2.0 * constants::pi * n2 / (wavelength * a_eff);
}

void FiberParams::validate() const {
  if (!(length > 0.0)) throw ConfigError("fiber: length must be positive");
  if (attenuation_db_km < 0.0) throw ConfigError("fiber: attenuation must be non-negative");
  if (!(wavelength > 0.0)) throw ConfigError("fiber: wavelength must be positive");
  if (pmd < 0.0) throw ConfigError("fiber: PMD coefficient must be non-negative");
  if (gamma() < 0.0) throw ConfigError("fiber: gamma must be non-negative");
  if (!gamma_override && !(a_eff > 0.0)) throw ConfigError("fiber: effective area must be positive");
}

double effective_length(double attenuation_db_km, double span_length) {
  const double a = units::db_km_to_field_np_m(attenuation_db_km);
  if (a * span_length < 1e-10) return span_length;
  return -std::expm1(-2.0 * a * span_length) / (2.0 * a);
}

double beta2_from_dispersion(double dispersion, double wavelength) {
  if (!(wavelength > 0.0)) throw ConfigError("beta2_from_dispersion: wavelength must be positive");
  return -dispersion * wavelength * wavelength / (2.0 * constants::pi * constants::c0);
}

void StepControl::validate() const {
  if (!(max_nonlinear_phase > 0.0)) throw ConfigError("step control: max nonlinear phase must be positive");
  if (!(max_step > 0.0)) throw ConfigError("step control: max step must be positive");
  if (min_steps_per_span < 1) throw ConfigError("step control: min steps per span must be >= 1");
}

PmdElement PmdRealization::element(std::size_t section, double pmd_coefficient, double section_length) const {
  std::mt19937_64 rng(mix_seed(seed, span, section));
  std::normal_distribution<double> nd(0.0, 1.0);
  double q[4];
  double norm = 0.0;
  for (double& v : q) {
    v = nd(rng);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  const cplx a(q[0] / norm, q[1] / norm);
  const cplx b(q[2] / norm, q[3] / norm);
  PmdElement e;
  e.u[0][0] = a;
  e.u[0][1] = -std::conj(b);
  e.u[1][0] = b;
  e.u[1][1] = std::conj(a);
  // Fixed DGD per section; sqrt(3 pi / 8) makes the mean DGD of the
  // concatenation approach pmd * sqrt(length).
  e.dgd = pmd_coefficient * std::sqrt(section_length) * std::sqrt(3.0 * constants::pi / 8.0);
  return e;
}

Medium medium_of(const FiberParams& f) {
  f.validate();
  Medium m;
  m.length = f.length;
  m.alpha = f.alpha();
  m.beta2 = f.beta2();
  m.gamma = f.gamma();
  m.dual_pol_kerr = f.dual_pol_kerr;
  m.pmd = f.pmd;
  return m;
}

namespace {

void apply_pmd(cvec& sx, cvec& sy, const rvec& freq, const PmdElement& e) {
  const std::size_t n = sx.size();
  for (std::size_t k = 0; k < n; ++k) {
    const cplx a = e.u[0][0] * sx[k] + e.u[0][1] * sy[k];
    const cplx b = e.u[1][0] * sx[k] + e.u[1][1] * sy[k];
    const cplx r = std::polar(1.0, -constants::pi * freq[k] * e.dgd);
    const cplx pa = a * r;
    const cplx pb = b * std::conj(r);
    sx[k] = std::conj(e.u[0][0]) * pa + std::conj(e.u[1][0]) * pb;
    sy[k] = std::conj(e.u[0][1]) * pa + std::conj(e.u[1][1]) * pb;
  }
}

bool all_finite(const cvec& v) {
  for (const auto& c : v)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

}  // namespace

Signal propagate(const Signal& s, const Medium& m, const StepControl& step, const PmdRealization& pmd,
                 PropagationStats* stats) {
  s.validate();
  step.validate();
  if (m.length < 0.0) throw ConfigError("propagate: negative length");
  if (m.length == 0.0) return s;

  const auto& kern = simd::kernels();
  const std::size_t n = s.size();
  const bool dual = s.dual();
  const rvec freq = fft::bin_frequencies(n, s.bin_spacing());
  rvec f2(n);
  for (std::size_t k = 0; k < n; ++k) f2[k] = freq[k] * freq[k];

  Signal out = s;
  fft::forward(out.x);
  if (dual) fft::forward(out.y);

  const double gamma_eff = m.gamma * (dual ? m.dual_pol_kerr : 1.0);
  const double p0 = s.power();
  const bool pmd_on = pmd.enabled && dual && m.pmd > 0.0;
  const double section_len = pmd_on ? step.max_step : m.length;
  const double max_dz = std::min(step.max_step, m.length / step.min_steps_per_span);
  const double two_pi2 = 2.0 * constants::pi * constants::pi;

  auto linear = [&](double d) {
    if (d == 0.0) return;
    const double c = -two_pi2 * m.beta2 * d;
    const double amp = std::exp(-m.alpha * d);
    kern.mul_expi(out.x.data(), f2.data(), c, amp, n);
    if (dual) kern.mul_expi(out.y.data(), f2.data(), c, amp, n);
  };

  double z = 0.0;
  double pending = 0.0;
  std::size_t section = 0;
  double boundary = std::min(m.length, section_len);
  std::size_t steps = 0;
  const double snap = 1e-9 * m.length;

  while (z < m.length - snap) {
    double dz = std::min(max_dz, boundary - z);
    if (gamma_eff != 0.0) {
      const double pz = p0 * std::exp(-2.0 * m.alpha * z);
      const double pmax = std::max(pz, pz * std::exp(-2.0 * m.alpha * dz));
      if (pmax > 0.0) dz = std::min(dz, step.max_nonlinear_phase / (std::abs(gamma_eff) * pmax));
      linear(pending + dz / 2.0);
      fft::inverse(out.x);
      if (dual) fft::inverse(out.y);
      const double dz_eff = std::abs(m.alpha * dz) < 1e-12 ? dz : std::sinh(m.alpha * dz) / m.alpha;
      kern.kerr(out.x.data(), dual ? out.y.data() : nullptr, -gamma_eff * dz_eff, n);
      fft::forward(out.x);
      if (dual) fft::forward(out.y);
      pending = dz / 2.0;
    } else {
      pending += dz;
    }
    z += dz;
    ++steps;
    if (boundary - z <= snap) {
      z = boundary;
      if (pmd_on) {
        linear(pending);
        pending = 0.0;
        const double len = std::min(section_len, m.length - static_cast<double>(section) * section_len);
        apply_pmd(out.x, out.y, freq, pmd.element(section, m.pmd, len));
      }
      ++section;
      boundary = std::min(m.length, boundary + section_len);
    }
  }
  linear(pending);
  fft::inverse(out.x);
  if (dual) fft::inverse(out.y);

  if (!all_finite(out.x) || (dual && !all_finite(out.y)))
    throw NumericalError("propagate: non-finite field after " + std::to_string(steps) + " steps");
  if (stats) {
    stats->steps = steps;
    stats->pmd_sections = pmd_on ? section : 0;
  }
  return out;
}

Signal propagate_span(const Signal& s, const FiberParams& fiber, const StepControl& step, const PmdRealization& pmd,
                      PropagationStats* stats) {
  return propagate(s, medium_of(fiber), step, pmd, stats);
}

Signal amplify(const Signal& s, double gain_db) { return scaled(s, std::pow(10.0, gain_db / 20.0)); }

TransferFunction dispersion_transfer(double beta2, double length, double alpha) {
  const double c = -2.0 * constants::pi * constants::pi * beta2 * length;
  const double amp = std::exp(-alpha * length);
  return [c, amp](double f) { return std::polar(amp, c * f * f); };
}

}  // namespace nlin
