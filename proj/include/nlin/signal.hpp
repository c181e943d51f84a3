// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "nlin/common.hpp"

namespace nlin {

// Dual- or single-polarization complex baseband block. Samples are field
// amplitudes in sqrt(W); the block is treated as one period of a periodic
// signal, so every filter is a circular convolution.
struct Signal {
  cvec x;
  cvec y;                         // empty for single polarization
  double sample_rate = 0.0;       // [Hz]
  double center_frequency = 0.0;  // [Hz], absolute optical frequency of offset 0

  std::size_t size() const { return x.size(); }
  bool dual() const { return !y.empty(); }
  double bin_spacing() const { return sample_rate / static_cast<double>(x.size()); }
  double duration() const { return static_cast<double>(x.size()) / sample_rate; }
  // mean(|x|^2 + |y|^2) [W]
  double power() const;
  void validate() const;
};

// Frequency grid convention, used everywhere: bins are stored in DFT order,
// bin k sits at offset k * bin_spacing for k < ceil(n/2) and at
// (k - n) * bin_spacing otherwise. Bins carry sqrt(W/Hz) so that
// sum |bins|^2 * bin_spacing equals the time-domain power.
struct Spectrum {
  cvec x;
  cvec y;
  double bin_spacing = 0.0;       // [Hz]
  double center_frequency = 0.0;  // [Hz]

  std::size_t size() const { return x.size(); }
  double offset(std::size_t k) const;
  double power() const;
};

// Maps a frequency offset from the signal center [Hz] to a complex gain.
using TransferFunction = std::function<cplx(double)>;

Spectrum forward_transform(const Signal& s);
Signal inverse_transform(const Spectrum& s);

Signal apply_transfer(const Signal& s, const TransferFunction& h);

// Block-averaged periodogram: periodic Hann window of length
// round(sample_rate / resolution), 75 % overlap with circular wrap. The
// squared Hann window summed at 75 % overlap is constant, so the integral of
// the estimate equals the signal power for any periodic input (no window
// loss); spectral leakage of the window spreads tones over about four bins.
struct Psd {
  rvec frequency;  // offsets [Hz], ascending
  rvec value;      // [W/Hz]
  double resolution = 0.0;

  double integral() const;
  double integral(double f_lo, double f_hi) const;
};

Psd psd_estimate(const Signal& s, double resolution);

// Helpers shared by the other modules.
Signal scaled(const Signal& s, double field_gain);
Signal add(const Signal& a, const Signal& b);
// Multiply bins of both polarizations by h evaluated at each bin offset.
void apply_transfer_inplace(cvec& spec_x, cvec* spec_y, double bin_spacing, const TransferFunction& h);

}  // namespace nlin
