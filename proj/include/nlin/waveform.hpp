// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>

#include "nlin/signal.hpp"

namespace nlin {

enum class Modulation { QPSK, QAM16, GAUSSIAN };

std::string to_string(Modulation m);
Modulation modulation_from_string(const std::string& s);
// Bits consumed per symbol. GAUSSIAN draws from the seed and ignores bits;
// it nominally consumes 4 so that frames of all formats have equal length.
int bits_per_symbol(Modulation m);
// Unit-average-power alphabet; empty for GAUSSIAN.
cvec alphabet(Modulation m);

struct ChannelSpec {
  int index = 0;                // slot number; 0 is the channel under test
  double center_offset = 0.0;   // [Hz] from the CUT
  Modulation format = Modulation::QAM16;
  double launch_power = 2e-3;   // [W]
  double pre_dispersion = 0.0;  // accumulated dispersion [s/m]
  std::uint64_t seed = 0;
};

struct ChannelPlan {
  std::vector<ChannelSpec> channels;
  double spacing = 37.5e9;     // [Hz]
  double symbol_rate = 28e9;   // [Hz]
  double roll_off = 0.2;
  double cut_frequency = 193.4e12;  // [Hz]

  const ChannelSpec& cut() const;
  const ChannelSpec* find(int index) const;
  double occupied_bandwidth() const { return (1.0 + roll_off) * symbol_rate; }
  void validate() const;
};

// Gray maps. QPSK: bit pair (b0 b1) -> ((1 - 2 b0) + i (1 - 2 b1)) / sqrt 2.
// 16QAM: per axis (b0 b1) 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3; bits 0-1
// drive I, bits 2-3 drive Q; scaled by 1/sqrt 10.
cvec map_symbols(const std::vector<std::uint8_t>& bits, Modulation format, std::uint64_t seed);
std::vector<std::uint8_t> random_bits(std::size_t count, std::uint64_t seed);
cvec random_symbols(Modulation format, std::size_t count, std::uint64_t seed);

// Zadoff-Chu sequence, exp(-i pi u k^2 / N) for even N and
// exp(-i pi u k (k+1) / N) for odd N.
cvec cazac_sequence(std::size_t length, std::size_t root);

// Training header: 8 blocks of 64 Zadoff-Chu symbols per polarization.
// X repeats the block eight times; Y repeats it four times and then four
// times negated, so blocks 1-2 and 5-6 give two independent circular
// observations per bin for 2x2 channel estimation.
inline constexpr std::size_t kHeaderBlock = 64;
inline constexpr std::size_t kHeaderBlocks = 8;
inline constexpr std::size_t kHeaderLength = kHeaderBlock * kHeaderBlocks;
std::pair<cvec, cvec> training_header();

// Transmit symbols of one channel: header followed by payload, total length
// frame_symbols per polarization.
struct SymbolStreams {
  cvec x;
  cvec y;
  std::size_t header = 0;
};
SymbolStreams make_symbol_frame(Modulation format, std::size_t frame_symbols, std::uint64_t seed);

// Raised-cosine amplitude: 1 in the flat part, cos^2 of
// pi/(2 r S) (|f| - (1-r) S/2) on the roll-off, 0 beyond (1+r) S/2.
// root_raised_cosine is its square root.
double raised_cosine(double f, double symbol_rate, double roll_off);
double root_raised_cosine(double f, double symbol_rate, double roll_off);
// Continuous RRC impulse response, t in symbol periods, peak 1 - r + 4r/pi.
double rrc_impulse(double t, double roll_off);

// Frequency-domain RRC shaping over the periodic block; sample values at the
// symbol instants of the matched-filtered output equal the symbols.
Signal shape_pulses(const cvec& symbols, double roll_off, int samples_per_symbol, double symbol_rate);
Signal shape_pulses(const cvec& sx, const cvec& sy, double roll_off, int samples_per_symbol,
                    double symbol_rate);

// Spectrum times the transfer function of acc_dispersion [s/m] worth of
// fiber dispersion, i.e. identical to linear propagation through a fiber
// with D * L = acc_dispersion. Applied about the signal's own center.
Signal apply_pre_dispersion(const Signal& s, double acc_dispersion, double wavelength = 1550e-9);

// Seeded sub-symbol delay in [0, 1/symbol_rate), random common phase and a
// Haar-random polarization rotation (dual-pol only). Unitary.
struct Conditioning {
  double delay = 0.0;  // [s]
  double phase = 0.0;  // [rad]
  cplx u[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
};
Conditioning conditioning_for_seed(std::uint64_t seed, double symbol_rate);
Signal condition_channel(const Signal& s, std::uint64_t seed, double symbol_rate);
Signal apply_conditioning(const Signal& s, const Conditioning& c);

// Sum of channels shifted to their center offsets. Offsets are rounded to the
// nearest bin of the periodic grid. Throws when any channel's occupied band
// would cross the Nyquist edge.
Signal multiplex(const std::vector<std::pair<ChannelSpec, Signal>>& channels);

// Shift a signal by an integer number of bins (exact on the periodic grid).
Signal frequency_shift(const Signal& s, double offset);

// One transmitter: symbols, shaped at the requested rate, scaled to exactly
// the launch power (sum over polarizations), pre-dispersed; conditioning is
// left to the caller.
struct TxChannel {
  ChannelSpec spec;
  SymbolStreams symbols;
  Signal signal;  // unconditioned, at baseband of the channel
};
TxChannel generate_channel(const ChannelSpec& spec, const ChannelPlan& plan, std::size_t frame_symbols,
                           int samples_per_symbol, bool dual = true);

}  // namespace nlin
