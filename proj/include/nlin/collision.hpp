// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "nlin/link.hpp"

namespace nlin {

// Single-polarization time-domain perturbation picture. Pulses evolve as
// g(z, tau) = exp(-i beta2/2 z d^2/dtau^2) g(0, tau), i.e. the spectrum is
// multiplied by exp(+i 2 pi^2 beta2 z f^2), and the interferer's envelope is
// delayed by the walk-off beta2 * Omega * z.

enum class CollisionType { TWO_PULSE, THREE_PULSE_A, THREE_PULSE_B, FOUR_PULSE };
const char* to_string(CollisionType t);

struct CollisionIndex {
  int h = 0, k = 0, m = 0;
  double interferer_offset = 0.0;  // Omega [rad/s]
};
CollisionType classify(const CollisionIndex& i);

struct PulseSpec {
  double symbol_rate = 32e9;  // [Hz]
  double roll_off = 0.2;
  int samples_per_symbol = 4;
  double period() const { return 1.0 / symbol_rate; }
  void validate() const;
};

struct CollisionLink {
  double length = 100e3;       // total [m]
  double span_length = 100e3;  // amplifier spacing [m]
  double alpha = 0.0;          // field attenuation [1/m]
  double beta2 = 21e-27;       // [s^2/m]
  double gamma = 1.3e-3;       // [1/(W m)]
  int z_steps = 0;             // 0: chosen from the walk-off

  // Power profile f(z) = exp(-2 alpha (z - span * span_length)) inside span `span`.
  double profile(double z, int span) const;
  int span_of(double z) const;
  void validate() const;
  static CollisionLink from_link(const LinkConfig& link);
};

// Demonstration setting: r = 0.2, 32 GBd, beta2 = 21 ps^2/km,
// gamma = 1.3 /(W km), 50 GHz spacing, no attenuation.
struct CollisionDemo {
  PulseSpec pulse;
  CollisionLink link;
  double offset = 2.0 * constants::pi * 50e9;  // [rad/s]
};

// Root-raised-cosine pulse with integral |g|^2 = T, dispersed over z, on a
// uniform tau grid. Throws NumericalError when more than 0.1% of the energy
// sits in the outer tenth of the window on either side (wrap-around).
cvec dispersed_pulse(double z, const rvec& tau, const PulseSpec& pulse, double beta2);

// Uniform z grid over [0, length] with the default resolution of a link.
rvec collision_z_grid(const CollisionLink& link, const PulseSpec& pulse, double offset);

// Overlap int g0* g_h q_k* q_m dtau of every index at every z (result[i][j]
// for index i, z_grid[j]), without the power profile. q is the interferer
// pulse delayed by the walk-off. All indices share one offset.
std::vector<cvec> collision_overlaps(const std::vector<CollisionIndex>& idx, const CollisionLink& link,
                                       const PulseSpec& pulse, const rvec& z_grid);

// Running trapezoidal integral of f(z) times the overlap over z_grid; the
// last value is the collision coefficient on that grid. Each interval uses the
// profile of the span it lies in, so span boundaries may be grid points.
cvec accumulation_curve(const CollisionIndex& idx, const CollisionLink& link, const rvec& z_grid,
                        const PulseSpec& pulse = {});

// X_hkm over the whole link. With `check`, the z grid is halved until two
// successive trapezoid values agree within 1e-4 relative to
// max(|X|, 1e-6 |X_000|) and the Richardson-extrapolated value is returned;
// NumericalError after five halvings.
cplx collision_coefficient(const CollisionIndex& idx, const CollisionLink& link, const PulseSpec& pulse = {},
                           bool check = true);

struct CollisionTable {
  std::vector<CollisionIndex> index;
  cvec value;
  double offset = 0.0;
};
CollisionTable collision_table(const std::vector<CollisionIndex>& idx, const CollisionLink& link,
                               const PulseSpec& pulse);

// Index triples whose estimated overlap (Gaussian envelopes of the dispersed
// width, including walk-off) exceeds `floor` somewhere on the link.
std::vector<CollisionIndex> collision_indices(const CollisionLink& link, const PulseSpec& pulse, double offset,
                                              double floor = 1e-3);

// Symbols a_n (or b_n) for n = first .. first + values.size() - 1.
struct SymbolWindow {
  cvec values;
  int first = 0;
  bool contains(int n) const { return n >= first && n < first + static_cast<int>(values.size()); }
  cplx operator()(int n) const { return values[static_cast<std::size_t>(n - first)]; }
};

struct Perturbation {
  cplx two_pulse = 0.0, three_pulse_a = 0.0, three_pulse_b = 0.0, four_pulse = 0.0;
  bool truncated = false;  // terms on the table boundary exceed 1% of the total
  cplx total() const { return two_pulse + three_pulse_a + three_pulse_b + four_pulse; }
};

// Delta a_0 = 2 i gamma sum a_h b_k* b_m X_hkm over the table, split by type.
Perturbation xci_perturbation(const SymbolWindow& cut, const SymbolWindow& interferer, const CollisionTable& table,
                              double gamma);

}  // namespace nlin
