// SPDX-License-Identifier: Apache-2.0
#include "nlin/waveform.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>

#include "nlin/fft.hpp"

namespace nlin {

std::string to_string(Modulation m) {
  switch (m) {
    case Modulation::QPSK: return "QPSK";
    case Modulation::QAM16: return "16QAM";
    case Modulation::GAUSSIAN: return "GAUSSIAN";
  }
  return "?";
}

Modulation modulation_from_string(const std::string& s) {
  std::string u = s;
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
  if (u == "QPSK") return Modulation::QPSK;
  if (u == "16QAM" || u == "QAM16") return Modulation::QAM16;
  if (u == "GAUSSIAN" || u == "GAUSS") return Modulation::GAUSSIAN;
  throw ConfigError("unknown modulation format '" + s + "'");
}

int bits_per_symbol(Modulation m) { return m == Modulation::QPSK ? 2 : 4; }

namespace {

const double kQam[4] = {-3.0, -1.0, 3.0, 1.0};  // indexed by (b0 << 1) | b1

cplx qpsk_point(unsigned b0, unsigned b1) {
  const double s = 1.0 / std::sqrt(2.0);
  return {b0 ? -s : s, b1 ? -s : s};
}

cplx qam16_point(unsigned b0, unsigned b1, unsigned b2, unsigned b3) {
  const double s = 1.0 / std::sqrt(10.0);
  return {kQam[(b0 << 1) | b1] * s, kQam[(b2 << 1) | b3] * s};
}

cvec gaussian_symbols(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  cvec out(count);
  for (auto& v : out) {
    double re = nd(rng);
    double im = nd(rng);
    v = {re, im};
  }
  return out;
}

}  // namespace

cvec alphabet(Modulation m) {
  cvec out;
  if (m == Modulation::QPSK) {
    for (unsigned v = 0; v < 4; ++v) out.push_back(qpsk_point(v >> 1, v & 1));
  } else if (m == Modulation::QAM16) {
    for (unsigned v = 0; v < 16; ++v) out.push_back(qam16_point(v >> 3, (v >> 2) & 1, (v >> 1) & 1, v & 1));
  }
  return out;
}

std::vector<std::uint8_t> random_bits(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> bits(count);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 64 == 0) word = rng();
    bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
  }
  return bits;
}

cvec map_symbols(const std::vector<std::uint8_t>& bits, Modulation format, std::uint64_t seed) {
  const std::size_t bps = static_cast<std::size_t>(bits_per_symbol(format));
  if (bits.size() % bps != 0)
    throw ConfigError("map_symbols: bit count " + std::to_string(bits.size()) + " not divisible by " +
                      std::to_string(bps));
  const std::size_t n = bits.size() / bps;
  if (format == Modulation::GAUSSIAN) return gaussian_symbols(n, seed);
  cvec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* b = &bits[i * bps];
    out[i] = format == Modulation::QPSK ? qpsk_point(b[0] & 1, b[1] & 1)
                                        : qam16_point(b[0] & 1, b[1] & 1, b[2] & 1, b[3] & 1);
  }
  return out;
}

cvec random_symbols(Modulation format, std::size_t count, std::uint64_t seed) {
  const std::size_t bps = static_cast<std::size_t>(bits_per_symbol(format));
  if (format == Modulation::GAUSSIAN) return gaussian_symbols(count, seed);
  return map_symbols(random_bits(count * bps, seed), format, seed);
}

cvec cazac_sequence(std::size_t length, std::size_t root) {
  if (length < 2) throw ConfigError("cazac_sequence: length must be >= 2");
  if (std::gcd(length, root) != 1)
    throw ConfigError("cazac_sequence: root " + std::to_string(root) + " not coprime with length " +
                      std::to_string(length));
  cvec out(length);
  const double n = static_cast<double>(length);
  for (std::size_t k = 0; k < length; ++k) {
    // Reduce the quadratic index modulo 2N before forming the angle so the
    // phase stays accurate for long sequences.
    const unsigned long long two_n = 2ull * length;
    unsigned long long q = length % 2 == 0 ? (k * k) % two_n : (k * (k + 1)) % two_n;
    q = (q * (root % two_n)) % two_n;
    const double ang = -constants::pi * static_cast<double>(q) / n;
    out[k] = {std::cos(ang), std::sin(ang)};
  }
  return out;
}

std::pair<cvec, cvec> training_header() {
  const cvec zc = cazac_sequence(kHeaderBlock, 1);
  cvec x(kHeaderLength), y(kHeaderLength);
  for (std::size_t b = 0; b < kHeaderBlocks; ++b) {
    const double sy = b < kHeaderBlocks / 2 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < kHeaderBlock; ++i) {
      x[b * kHeaderBlock + i] = zc[i];
      y[b * kHeaderBlock + i] = sy * zc[i];
    }
  }
  return {x, y};
}

SymbolStreams make_symbol_frame(Modulation format, std::size_t frame_symbols, std::uint64_t seed) {
  if (frame_symbols <= 2 * kHeaderLength)
    throw ConfigError("frame of " + std::to_string(frame_symbols) + " symbols too short for the training header");
  SymbolStreams s;
  s.header = kHeaderLength;
  auto [hx, hy] = training_header();
  const std::size_t payload = frame_symbols - kHeaderLength;
  cvec px = random_symbols(format, payload, mix_seed(seed, 1));
  cvec py = random_symbols(format, payload, mix_seed(seed, 2));
  s.x = hx;
  s.y = hy;
  s.x.insert(s.x.end(), px.begin(), px.end());
  s.y.insert(s.y.end(), py.begin(), py.end());
  return s;
}

double raised_cosine(double f, double symbol_rate, double roll_off) {
  const double a = std::abs(f);
  const double lo = (1.0 - roll_off) * symbol_rate / 2.0;
  const double hi = (1.0 + roll_off) * symbol_rate / 2.0;
  if (a <= lo) return 1.0;
  if (a >= hi) return 0.0;
  const double c = std::cos(constants::pi / (2.0 * roll_off * symbol_rate) * (a - lo));
  return c * c;
}

double root_raised_cosine(double f, double symbol_rate, double roll_off) {
  return std::sqrt(raised_cosine(f, symbol_rate, roll_off));
}

double rrc_impulse(double t, double r) {
  const double pi = constants::pi;
  if (std::abs(t) < 1e-12) return 1.0 - r + 4.0 * r / pi;
  if (r > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * r)) < 1e-9) {
    return r / std::sqrt(2.0) *
           ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * r)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * r)));
  }
  const double num = std::sin(pi * t * (1.0 - r)) + 4.0 * r * t * std::cos(pi * t * (1.0 + r));
  const double den = pi * t * (1.0 - 16.0 * r * r * t * t);
  return num / den;
}

namespace {

cvec shape_one(const cvec& symbols, double roll_off, int sps, double symbol_rate) {
  const std::size_t ns = symbols.size();
  const std::size_t n = ns * static_cast<std::size_t>(sps);
  cvec s = symbols;
  fft::forward(s);
  cvec o(n, cplx(0.0));
  const double df = symbol_rate / static_cast<double>(ns);
  for (std::size_t k = 0; k < n; ++k) {
    const long off = fft::bin_index_offset(k, n);
    const double g = root_raised_cosine(static_cast<double>(off) * df, symbol_rate, roll_off);
    if (g == 0.0) continue;
    o[k] = s[fft::bin_of_offset(off, ns)] * (static_cast<double>(sps) * g);
  }
  fft::inverse(o);
  return o;
}

}  // namespace

Signal shape_pulses(const cvec& symbols, double roll_off, int sps, double symbol_rate) {
  return shape_pulses(symbols, cvec{}, roll_off, sps, symbol_rate);
}

Signal shape_pulses(const cvec& sx, const cvec& sy, double roll_off, int sps, double symbol_rate) {
  if (sx.empty()) throw ConfigError("shape_pulses: no symbols");
  if (!sy.empty() && sy.size() != sx.size()) throw ConfigError("shape_pulses: polarization lengths differ");
  if (roll_off < 0.0 || roll_off > 1.0) throw ConfigError("shape_pulses: roll-off outside [0, 1]");
  if (sps < 1 || static_cast<double>(sps) < 1.0 + roll_off)
    throw ConfigError("shape_pulses: " + std::to_string(sps) + " samples/symbol aliases a roll-off of " +
                      std::to_string(roll_off));
  if (!(symbol_rate > 0.0)) throw ConfigError("shape_pulses: symbol rate must be positive");
  Signal out;
  out.sample_rate = symbol_rate * sps;
  out.x = shape_one(sx, roll_off, sps, symbol_rate);
  if (!sy.empty()) out.y = shape_one(sy, roll_off, sps, symbol_rate);
  return out;
}

Signal apply_pre_dispersion(const Signal& s, double acc_dispersion, double wavelength) {
  if (acc_dispersion == 0.0) return s;
  const double beta2_acc = -acc_dispersion * wavelength * wavelength / (2.0 * constants::pi * constants::c0);
  const double k = -2.0 * constants::pi * constants::pi * beta2_acc;
  return apply_transfer(s, [k](double f) { return std::polar(1.0, k * f * f); });
}

Conditioning conditioning_for_seed(std::uint64_t seed, double symbol_rate) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> nd(0.0, 1.0);
  Conditioning c;
  c.delay = u01(rng) / symbol_rate;
  c.phase = 2.0 * constants::pi * u01(rng);
  // Uniform point on the unit 3-sphere gives a Haar SU(2) element.
  double q[4];
  double norm = 0.0;
  for (double& v : q) {
    v = nd(rng);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  const cplx a(q[0] / norm, q[1] / norm);
  const cplx b(q[2] / norm, q[3] / norm);
  c.u[0][0] = a;
  c.u[0][1] = -std::conj(b);
  c.u[1][0] = b;
  c.u[1][1] = std::conj(a);
  return c;
}

Signal apply_conditioning(const Signal& s, const Conditioning& c) {
  s.validate();
  Signal out = s;
  const std::size_t n = s.size();
  const double df = s.bin_spacing();
  fft::forward(out.x);
  if (out.dual()) fft::forward(out.y);
  for (std::size_t k = 0; k < n; ++k) {
    const double f = static_cast<double>(fft::bin_index_offset(k, n)) * df;
    const cplx g = std::polar(1.0, c.phase - 2.0 * constants::pi * f * c.delay);
    if (out.dual()) {
      const cplx x = out.x[k], y = out.y[k];
      out.x[k] = g * (c.u[0][0] * x + c.u[0][1] * y);
      out.y[k] = g * (c.u[1][0] * x + c.u[1][1] * y);
    } else {
      out.x[k] *= g;
    }
  }
  fft::inverse(out.x);
  if (out.dual()) fft::inverse(out.y);
  return out;
}

Signal condition_channel(const Signal& s, std::uint64_t seed, double symbol_rate) {
  return apply_conditioning(s, conditioning_for_seed(seed, symbol_rate));
}

namespace {

// Largest |bin offset| carrying energy above a relative floor.
long occupied_half_width(const cvec& spec_x, const cvec& spec_y) {
  const std::size_t n = spec_x.size();
  double peak = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double e = std::norm(spec_x[k]) + (spec_y.empty() ? 0.0 : std::norm(spec_y[k]));
    peak = std::max(peak, e);
  }
  long w = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double e = std::norm(spec_x[k]) + (spec_y.empty() ? 0.0 : std::norm(spec_y[k]));
    if (e > 1e-20 * peak) w = std::max(w, std::abs(fft::bin_index_offset(k, n)));
  }
  return w;
}

void roll_bins(cvec& spec, long shift) {
  const std::size_t n = spec.size();
  cvec tmp(n);
  for (std::size_t k = 0; k < n; ++k) tmp[fft::bin_of_offset(static_cast<long>(k) + shift, n)] = spec[k];
  spec.swap(tmp);
}

}  // namespace

Signal frequency_shift(const Signal& s, double offset) {
  s.validate();
  const long shift = std::lround(offset / s.bin_spacing());
  if (shift == 0) return s;
  Signal out = s;
  fft::forward(out.x);
  roll_bins(out.x, shift);
  fft::inverse(out.x);
  if (out.dual()) {
    fft::forward(out.y);
    roll_bins(out.y, shift);
    fft::inverse(out.y);
  }
  out.center_frequency = s.center_frequency - static_cast<double>(shift) * s.bin_spacing();
  return out;
}

Signal multiplex(const std::vector<std::pair<ChannelSpec, Signal>>& channels) {
  if (channels.empty()) throw ConfigError("multiplex: no channels");
  const Signal& first = channels.front().second;
  first.validate();
  const std::size_t n = first.size();
  const double df = first.bin_spacing();
  Signal out;
  out.sample_rate = first.sample_rate;
  out.center_frequency = first.center_frequency - channels.front().first.center_offset;
  out.x.assign(n, cplx(0.0));
  if (first.dual()) out.y.assign(n, cplx(0.0));
  cvec sx, sy;
  for (const auto& [spec, sig] : channels) {
    sig.validate();
    if (sig.size() != n || sig.sample_rate != first.sample_rate || sig.dual() != first.dual())
      throw ConfigError("multiplex: channel " + std::to_string(spec.index) + " has a different sample grid");
    const long shift = std::lround(spec.center_offset / df);
    sx = sig.x;
    fft::forward(sx);
    sy.clear();
    if (sig.dual()) {
      sy = sig.y;
      fft::forward(sy);
    }
    const long half = occupied_half_width(sx, sy);
    if (std::abs(shift) + half >= static_cast<long>(n / 2))
      throw ConfigError("multiplex: composite bandwidth exceeds the sample rate (channel " +
                        std::to_string(spec.index) + ")");
    roll_bins(sx, shift);
    for (std::size_t k = 0; k < n; ++k) out.x[k] += sx[k];
    if (sig.dual()) {
      roll_bins(sy, shift);
      for (std::size_t k = 0; k < n; ++k) out.y[k] += sy[k];
    }
  }
  fft::inverse(out.x);
  if (out.dual()) fft::inverse(out.y);
  return out;
}

const ChannelSpec& ChannelPlan::cut() const {
  const ChannelSpec* c = find(0);
  if (!c) throw ConfigError("channel plan: no channel under test (index 0)");
  return *c;
}

const ChannelSpec* ChannelPlan::find(int index) const {
  for (const auto& c : channels)
    if (c.index == index) return &c;
  return nullptr;
}

void ChannelPlan::validate() const {
  if (roll_off < 0.0 || roll_off > 1.0) throw ConfigError("channel plan: roll-off outside [0, 1]");
  if (!(symbol_rate > 0.0)) throw ConfigError("channel plan: symbol rate must be positive");
  if (spacing < occupied_bandwidth() * (1.0 - 1e-12))
    throw ConfigError("channel plan: spacing below (1+r) * symbol rate");
  int cuts = 0;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const auto& c = channels[i];
    if (!(c.launch_power > 0.0))
      throw ConfigError("channel plan: channel " + std::to_string(c.index) + " launch power must be positive");
    if (c.index == 0) ++cuts;
    for (std::size_t j = i + 1; j < channels.size(); ++j)
      if (channels[j].index == c.index) throw ConfigError("channel plan: duplicate index " + std::to_string(c.index));
  }
  if (cuts != 1) throw ConfigError("channel plan: exactly one channel must have index 0 (CUT)");
}

TxChannel generate_channel(const ChannelSpec& spec, const ChannelPlan& plan, std::size_t frame_symbols,
                           int samples_per_symbol, bool dual) {
  TxChannel ch;
  ch.spec = spec;
  ch.symbols = make_symbol_frame(spec.format, frame_symbols, spec.seed);
  if (!dual) ch.symbols.y.clear();
  ch.signal = shape_pulses(ch.symbols.x, ch.symbols.y, plan.roll_off, samples_per_symbol, plan.symbol_rate);
  const double p = ch.signal.power();
  if (!(p > 0.0)) throw NumericalError("generate_channel: zero-power waveform");
  ch.signal = scaled(ch.signal, std::sqrt(spec.launch_power / p));
  ch.signal.center_frequency = plan.cut_frequency + spec.center_offset;
  if (spec.pre_dispersion != 0.0) ch.signal = apply_pre_dispersion(ch.signal, spec.pre_dispersion);
  return ch;
}

}  // namespace nlin
