// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "nlin/signal.hpp"

namespace nlin {

// Fiber description in SI units; the defaults are a standard single-mode
// fiber at 1550 nm.
struct FiberParams {
  double length = 80e3;                // [m]
  double attenuation_db_km = 0.19;     // power attenuation [dB/km]
  double dispersion = 16.8e-6;         // D [s/m^2] (16.8 ps/(nm km))
  double pmd = 0.1e-12 / 31.6227766016837933;  // [s/sqrt(m)] (0.1 ps/sqrt(km))
  double n2 = 2.25e-20;                // [m^2/W]
  double a_eff = 84.95e-12;            // [m^2]
  double wavelength = 1550e-9;         // [m]
  // Nonlinear coefficient scaling for dual-polarization fields, applied to
  // |Bx|^2 + |By|^2. 8/9 is the Manakov average over random birefringence.
  double dual_pol_kerr = 8.0 / 9.0;
  std::optional<double> gamma_override;  // [1/(W m)]

  double alpha() const;  // field attenuation [1/m]
  double beta2() const;  // [s^2/m]
  double gamma() const;  // 2 pi n2 / (lambda A_eff) unless overridden
  double loss_db() const { return attenuation_db_km * length / 1e3; }
  void validate() const;
};

double effective_length(double attenuation_db_km, double span_length);
double beta2_from_dispersion(double dispersion, double wavelength);

struct StepControl {
  double max_nonlinear_phase = 1e-3;  // [rad] per step at the mean power
  double max_step = 1e3;              // [m]; also the PMD section length
  int min_steps_per_span = 1;
  void validate() const;
};

// Coarse-step PMD: the span is cut into sections of max_step; each section
// carries an independent Haar-random rotation and a fixed differential group
// delay, seeded by (seed, span, section). Section boundaries do not depend on
// the nonlinear step size, so a gamma = 0 calibration run sees exactly the
// same birefringence as the full run.
struct PmdElement {
  cplx u[2][2];  // rotation into the local eigenbasis
  double dgd;    // [s]
};

struct PmdRealization {
  bool enabled = false;
  std::uint64_t seed = 0;
  std::uint64_t span = 0;

  PmdElement element(std::size_t section, double pmd_coefficient, double section_length) const;
};

// Raw medium parameters consumed by the integrator. Backpropagation flips the
// signs of alpha, beta2 and gamma.
struct Medium {
  double length = 0.0;
  double alpha = 0.0;
  double beta2 = 0.0;
  double gamma = 0.0;        // before polarization scaling
  double dual_pol_kerr = 8.0 / 9.0;
  double pmd = 0.0;
};
Medium medium_of(const FiberParams& f);

struct PropagationStats {
  std::size_t steps = 0;
  std::size_t pmd_sections = 0;
};

// Symmetric split-step: half linear step (loss + dispersion, frequency
// domain), Kerr phase rotation per sample, half linear step; consecutive
// linear halves are merged. The Kerr phase of each step uses the effective
// step length sinh(alpha dz)/alpha at the midpoint field, which integrates the
// exponential power profile exactly for a CW wave.
Signal propagate_span(const Signal& s, const FiberParams& fiber, const StepControl& step,
                      const PmdRealization& pmd, PropagationStats* stats = nullptr);
Signal propagate(const Signal& s, const Medium& m, const StepControl& step, const PmdRealization& pmd,
                 PropagationStats* stats = nullptr);

Signal amplify(const Signal& s, double gain_db);

// Dispersion-only transfer of a length of fiber, the closed form the
// integrator reduces to for gamma = 0 and no PMD.
TransferFunction dispersion_transfer(double beta2, double length, double alpha = 0.0);

}  // namespace nlin
