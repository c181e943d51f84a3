// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>

#include "nlin/link.hpp"
#include "nlin/waveform.hpp"

namespace nlin {

// Brick-wall extraction of [center - bandwidth/2, center + bandwidth/2)
// (offsets from the signal center), shifted to baseband by whole bins and
// resampled to out_sample_rate (0 keeps the input rate). The result's
// center_frequency is the absolute frequency of the extracted band's center.
Signal extract_channel(const Signal& s, double center, double bandwidth, double out_sample_rate = 0.0);

// Periodic band-limited resampling by zero-padding / truncating the spectrum.
// The new length n * rate / sample_rate must be an integer.
Signal resample(const Signal& s, double rate);

// Single-channel digital backpropagation of `spans` spans: for each span in
// reverse order the amplifier gain is removed and the fiber is integrated with
// negated alpha, beta2 and gamma. PMD is not inverted.
Signal backpropagate(const Signal& s, const LinkConfig& link, int spans, const StepControl& step);

// Root-raised-cosine matched filter.
Signal matched_filter(const Signal& s, double symbol_rate, double roll_off);

// Noise-free matched-filter output for known symbols: the shape_pulses +
// matched_filter cascade, i.e. raised-cosine pulses at the given rate.
Signal reference_waveform(const cvec& sx, const cvec& sy, double symbol_rate, double roll_off,
                          int samples_per_symbol);

// 2x2 zero-forcing equalizer response on a grid of `taps` bins spanning the
// 2 samples/symbol band. w[i] holds {w00, w01, w10, w11} for bin i in DFT
// order (offset bin_index_offset(i, taps) * bin_spacing); bins outside the
// occupied band are zero.
struct FdeCoefficients {
  std::uint32_t taps = 128;
  double bin_spacing = 0.0;   // [Hz]
  double sample_rate = 0.0;   // [Hz] of the signals the response applies to
  double delay = 0.0;         // common group delay removed before interpolation [s]
  double band_edge = 0.0;     // |f| beyond which the response is zero [Hz]
  std::vector<std::array<cplx, 4>> w;
  std::uint64_t seed = 0;
  std::uint32_t span = 0;
  std::uint64_t fingerprint = 0;

  void validate() const;
};

// Data-aided training. rx and reference are 2 samples/symbol frames starting
// at the first header symbol; the header consists of blocks of taps/2 known
// symbols. Blocks whose neighbours carry the same symbols on both
// polarizations are circular observations of the channel; each gives one
// column of the 2x2 least-squares estimate per bin, and the equalizer is its
// inverse on the occupied band.
FdeCoefficients fde_train(const Signal& rx, const Signal& reference, const cvec& known_x, const cvec& known_y,
                          std::size_t header_symbols, double symbol_rate, double roll_off, std::uint32_t taps = 128);

// Applies the response over the whole periodic block. The coefficients are
// interpolated onto the block grid: the stored common delay is taken out,
// the residual is interpolated with Catmull-Rom cubics, and the delay is put
// back as an exact linear phase.
Signal fde_apply(const Signal& s, const FdeCoefficients& c);
cplx fde_response(const FdeCoefficients& c, double f, int row, int col);

// Aligned transmitted/received payload symbols at 1 sample/symbol.
struct SymbolFrame {
  cvec tx_x, tx_y;
  cvec rx_x, rx_y;
  double symbol_rate = 0.0;
  std::size_t lag = 0;     // circular symbol shift that was removed
  std::size_t phase = 0;   // sample phase used for decimation

  std::size_t size() const { return tx_x.size(); }
  bool dual() const { return !tx_y.empty(); }
};

// Decimates to 1 sample/symbol choosing the sample phase with the strongest
// correlation peak, removes the circular lag found by cross-correlation with
// the transmitted symbols, drops the first `skip` symbols (the header), and
// normalizes tx and rx to unit mean power per polarization. Throws when the
// second-highest correlation peak exceeds half the highest.
SymbolFrame downsample_align(const Signal& s, const cvec& tx_x, const cvec& tx_y, double symbol_rate,
                             std::size_t skip = 0);

// Removes the constant phase arg(sum x* y) per polarization.
void restore_phase(SymbolFrame& f);

// Receiver front part shared by calibration and measurement: extraction of
// the CUT slot at 2 samples/symbol, backpropagation, matched filter.
struct ReceiverConfig {
  std::uint32_t fde_taps = 128;
  bool backpropagation = true;
  double extract_bandwidth = 0.0;  // 0 selects the channel spacing (capped at 2 S_R)
};
Signal receive_front(const Signal& wdm, const ChannelPlan& plan, const LinkConfig& link, int spans,
                     const StepControl& step, const ReceiverConfig& rx);

}  // namespace nlin
