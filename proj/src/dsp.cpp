// SPDX-License-Identifier: Apache-2.0
#include "nlin/dsp.hpp"

#include <algorithm>
#include <cmath>

#include "nlin/fft.hpp"

namespace nlin {

namespace {

std::size_t resampled_length(std::size_t n, double rate, double new_rate) {
  const double exact = static_cast<double>(n) * new_rate / rate;
  const double r = std::round(exact);
  if (r < 1.0 || std::abs(exact - r) > 1e-6 * exact)
    throw ConfigError("resample: rate " + std::to_string(new_rate) + " Hz does not give an integer block length");
  return static_cast<std::size_t>(r);
}

// Copies bins of `in` (length n) into a block of length m, source offset
// o = o' + shift for every output offset o', keeping those accepted by keep(o).
template <class Keep>
cvec rebin(const cvec& in, std::size_t m, long shift, Keep keep) {
  const std::size_t n = in.size();
  const long lo = -static_cast<long>(n / 2);
  const long hi = static_cast<long>((n - 1) / 2);
  cvec out(m, cplx(0.0));
  const double scale = static_cast<double>(m) / static_cast<double>(n);
  for (std::size_t k = 0; k < m; ++k) {
    const long o = fft::bin_index_offset(k, m) + shift;
    if (o < lo || o > hi || !keep(o)) continue;
    out[k] = in[fft::bin_of_offset(o, n)] * scale;
  }
  return out;
}

}  // namespace

Signal extract_channel(const Signal& s, double center, double bandwidth, double out_sample_rate) {
  s.validate();
  if (!(bandwidth > 0.0) || bandwidth > s.sample_rate)
    throw ConfigError("extract_channel: bandwidth must be in (0, sample_rate]");
  if (std::abs(center) + bandwidth / 2.0 > s.sample_rate / 2.0 * (1.0 + 1e-12))
    throw ConfigError("extract_channel: band outside the signal range");
  const double rate = out_sample_rate > 0.0 ? out_sample_rate : s.sample_rate;
  if (rate < bandwidth * (1.0 - 1e-12)) throw ConfigError("extract_channel: output rate below the bandwidth");
  const std::size_t n = s.size();
  const std::size_t m = resampled_length(n, s.sample_rate, rate);
  const double df = s.bin_spacing();
  const long shift = std::lround(center / df);
  const double lo = center - bandwidth / 2.0, hi = center + bandwidth / 2.0;
  auto keep = [&](long o) {
    const double f = static_cast<double>(o) * df;
    return f >= lo && f < hi;
  };
  Signal out;
  out.sample_rate = rate;
  out.center_frequency = s.center_frequency + static_cast<double>(shift) * df;
  cvec sx = s.x;
  fft::forward(sx);
  out.x = rebin(sx, m, shift, keep);
  fft::inverse(out.x);
  if (s.dual()) {
    cvec sy = s.y;
    fft::forward(sy);
    out.y = rebin(sy, m, shift, keep);
    fft::inverse(out.y);
  }
  return out;
}

Signal resample(const Signal& s, double rate) {
  s.validate();
  const std::size_t m = resampled_length(s.size(), s.sample_rate, rate);
  if (m == s.size()) return s;
  Signal out;
  out.sample_rate = rate;
  out.center_frequency = s.center_frequency;
  auto all = [](long) { return true; };
  out.x = s.x;
  fft::forward(out.x);
  out.x = rebin(out.x, m, 0, all);
  fft::inverse(out.x);
  if (s.dual()) {
    out.y = s.y;
    fft::forward(out.y);
    out.y = rebin(out.y, m, 0, all);
    fft::inverse(out.y);
  }
  return out;
}

Signal backpropagate(const Signal& s, const LinkConfig& link, int spans, const StepControl& step) {
  if (spans < 0) throw ConfigError("backpropagate: negative span count");
  if (spans > 0) link.validate();
  Signal cur = s;
  if (spans == 0) return cur;
  Medium m = medium_of(link.fiber);
  m.alpha = -m.alpha;
  m.beta2 = -m.beta2;
  m.gamma = -m.gamma;
  const PmdRealization no_pmd;
  for (int i = spans; i >= 1; --i) {
    cur = amplify(cur, -link.gain_db());
    cur = propagate(cur, m, step, no_pmd);
  }
  return cur;
}

Signal matched_filter(const Signal& s, double symbol_rate, double roll_off) {
  return apply_transfer(s, [=](double f) { return cplx(root_raised_cosine(f, symbol_rate, roll_off)); });
}

Signal reference_waveform(const cvec& sx, const cvec& sy, double symbol_rate, double roll_off,
                          int samples_per_symbol) {
  return matched_filter(shape_pulses(sx, sy, roll_off, samples_per_symbol, symbol_rate), symbol_rate, roll_off);
}

void FdeCoefficients::validate() const {
  if (taps < 4) throw ConfigError("fde: tap count must be >= 4");
  if (w.size() != taps) throw ConfigError("fde: tap count does not match the coefficient table");
  if (!(bin_spacing > 0.0) || !(sample_rate > 0.0)) throw ConfigError("fde: invalid grid");
  for (const auto& e : w)
    for (const auto& v : e)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalError("fde: non-finite coefficient");
}

namespace {

using Mat2 = std::array<cplx, 4>;  // row-major

Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

cplx det(const Mat2& a) { return a[0] * a[3] - a[1] * a[2]; }

double frob2(const Mat2& a) { return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]) + std::norm(a[3]); }

Mat2 inverse(const Mat2& a) {
  const cplx d = det(a);
  return {a[3] / d, -a[1] / d, -a[2] / d, a[0] / d};
}

bool same_block(const cvec& v, std::size_t a, std::size_t b, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i)
    if (std::abs(v[a * len + i] - v[b * len + i]) > 1e-12) return false;
  return true;
}

}  // namespace

FdeCoefficients fde_train(const Signal& rx, const Signal& reference, const cvec& known_x, const cvec& known_y,
                          std::size_t header_symbols, double symbol_rate, double roll_off, std::uint32_t taps) {
  rx.validate();
  reference.validate();
  if (taps < 4 || taps % 2) throw ConfigError("fde_train: tap count must be even and >= 4");
  const bool dual = rx.dual();
  if (reference.size() != rx.size() || reference.dual() != dual)
    throw ConfigError("fde_train: reference and received frames differ in shape");
  if (std::abs(rx.sample_rate - 2.0 * symbol_rate) > 1e-9 * rx.sample_rate)
    throw ConfigError("fde_train: received frame must be at 2 samples/symbol");
  const std::size_t block_sym = taps / 2;
  const std::size_t blocks = header_symbols / block_sym;
  if (header_symbols < taps || blocks < 3 || known_x.size() < header_symbols ||
      (dual && known_y.size() < header_symbols) || rx.size() < 2 * header_symbols)
    throw ConfigError("fde_train: training shorter than three blocks of taps/2 symbols");

  std::vector<std::size_t> usable;
  for (std::size_t b = 1; b + 1 < blocks; ++b) {
    bool ok = same_block(known_x, b - 1, b, block_sym) && same_block(known_x, b + 1, b, block_sym);
    if (dual) ok = ok && same_block(known_y, b - 1, b, block_sym) && same_block(known_y, b + 1, b, block_sym);
    if (ok) usable.push_back(b);
  }
  if (usable.empty()) throw ConfigError("fde_train: header has no block with identical neighbours");

  std::vector<Mat2> a(taps, Mat2{}), c(taps, Mat2{});
  cvec rxb(taps), ryb(taps), txb(taps), tyb(taps);
  for (std::size_t b : usable) {
    const std::size_t off = b * taps;
    for (std::size_t i = 0; i < taps; ++i) {
      rxb[i] = rx.x[off + i];
      txb[i] = reference.x[off + i];
      if (dual) {
        ryb[i] = rx.y[off + i];
        tyb[i] = reference.y[off + i];
      }
    }
    fft::forward(rxb);
    fft::forward(txb);
    if (dual) {
      fft::forward(ryb);
      fft::forward(tyb);
    }
    for (std::size_t k = 0; k < taps; ++k) {
      const cplx r0 = rxb[k], r1 = dual ? ryb[k] : 0.0, t0 = txb[k], t1 = dual ? tyb[k] : 0.0;
      a[k][0] += r0 * std::conj(t0);
      a[k][1] += r0 * std::conj(t1);
      a[k][2] += r1 * std::conj(t0);
      a[k][3] += r1 * std::conj(t1);
      c[k][0] += t0 * std::conj(t0);
      c[k][1] += t0 * std::conj(t1);
      c[k][2] += t1 * std::conj(t0);
      c[k][3] += t1 * std::conj(t1);
    }
  }

  FdeCoefficients out;
  out.taps = taps;
  out.sample_rate = rx.sample_rate;
  out.bin_spacing = rx.sample_rate / taps;
  out.band_edge = (1.0 + roll_off) * symbol_rate / 2.0;
  out.w.assign(taps, Mat2{});
  std::vector<bool> in_band(taps, false);
  for (std::size_t k = 0; k < taps; ++k) {
    const double f = static_cast<double>(fft::bin_index_offset(k, taps)) * out.bin_spacing;
    if (std::abs(f) >= out.band_edge) continue;
    in_band[k] = true;
    Mat2 w;
    if (dual) {
      const double tc = std::abs(c[k][0]) + std::abs(c[k][3]);
      if (!(tc > 0.0) || std::abs(det(c[k])) < 1e-9 * tc * tc / 4.0)
        throw NumericalError("fde_train: training matrix singular at bin " + std::to_string(k));
      const Mat2 h = mul(a[k], inverse(c[k]));
      const double hf = frob2(h);
      if (!(hf > 0.0) || std::abs(det(h)) < 1e-9 * hf / 2.0)
        throw NumericalError("fde_train: channel estimate singular at bin " + std::to_string(k));
      w = inverse(h);
    } else {
      if (!(std::abs(c[k][0]) > 0.0))
        throw NumericalError("fde_train: training matrix singular at bin " + std::to_string(k));
      const cplx h = a[k][0] / c[k][0];
      if (!(std::abs(h) > 1e-9 * std::sqrt(std::abs(a[k][0]) / std::abs(c[k][0])) && std::abs(h) > 0.0))
        throw NumericalError("fde_train: channel estimate singular at bin " + std::to_string(k));
      w = {1.0 / h, 0.0, 0.0, 0.0};
    }
    out.w[k] = w;
  }

  // Common delay from the phase progression between neighbouring bins.
  cplx acc = 0.0;
  for (long o = -static_cast<long>(taps / 2); o + 1 < static_cast<long>(taps / 2); ++o) {
    const std::size_t k0 = fft::bin_of_offset(o, taps), k1 = fft::bin_of_offset(o + 1, taps);
    if (!in_band[k0] || !in_band[k1]) continue;
    const Mat2& w0 = out.w[k0];
    const Mat2& w1 = out.w[k1];
    for (int i = 0; i < 4; ++i) acc += w1[i] * std::conj(w0[i]);
  }
  out.delay = std::abs(acc) > 0.0 ? std::arg(acc) / (2.0 * constants::pi * out.bin_spacing) : 0.0;
  out.validate();
  return out;
}

namespace {

// Residual (delay-free) response on ascending offsets with out-of-band
// entries clamped to the nearest in-band value.
struct FdeInterpolator {
  const FdeCoefficients& c;
  long half;
  std::vector<Mat2> table;  // index o + half

  explicit FdeInterpolator(const FdeCoefficients& coeffs) : c(coeffs), half(static_cast<long>(coeffs.taps / 2)) {
    const std::size_t n = c.taps;
    table.assign(n, Mat2{});
    std::vector<bool> valid(n, false);
    for (long o = -half; o < static_cast<long>(n) - half; ++o) {
      const double f = static_cast<double>(o) * c.bin_spacing;
      if (std::abs(f) >= c.band_edge) continue;
      const cplx rot = std::polar(1.0, -2.0 * constants::pi * f * c.delay);
      Mat2 v = c.w[fft::bin_of_offset(o, n)];
      for (auto& e : v) e *= rot;
      table[o + half] = v;
      valid[o + half] = true;
    }
    long first = -1, last = -1;
    for (std::size_t i = 0; i < n; ++i)
      if (valid[i]) {
        if (first < 0) first = static_cast<long>(i);
        last = static_cast<long>(i);
      }
    if (first < 0) throw ConfigError("fde: empty occupied band");
    for (long i = 0; i < first; ++i) table[i] = table[first];
    for (long i = last + 1; i < static_cast<long>(n); ++i) table[i] = table[last];
  }

  const Mat2& at(long o) const {
    o = std::clamp(o, -half, static_cast<long>(c.taps) - half - 1);
    return table[o + half];
  }

  Mat2 operator()(double f) const {
    if (std::abs(f) >= c.band_edge) return Mat2{};
    const double u = f / c.bin_spacing;
    const long i0 = static_cast<long>(std::floor(u));
    const double t = u - static_cast<double>(i0);
    const double t2 = t * t, t3 = t2 * t;
    const double b0 = -0.5 * t3 + t2 - 0.5 * t;
    const double b1 = 1.5 * t3 - 2.5 * t2 + 1.0;
    const double b2 = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
    const double b3 = 0.5 * t3 - 0.5 * t2;
    const Mat2 &p0 = at(i0 - 1), &p1 = at(i0), &p2 = at(i0 + 1), &p3 = at(i0 + 2);
    const cplx rot = std::polar(1.0, 2.0 * constants::pi * f * c.delay);
    Mat2 r;
    for (int i = 0; i < 4; ++i) r[i] = (b0 * p0[i] + b1 * p1[i] + b2 * p2[i] + b3 * p3[i]) * rot;
    return r;
  }
};

}  // namespace

cplx fde_response(const FdeCoefficients& c, double f, int row, int col) {
  return FdeInterpolator(c)(f)[row * 2 + col];
}

Signal fde_apply(const Signal& s, const FdeCoefficients& c) {
  s.validate();
  c.validate();
  if (std::abs(s.sample_rate - c.sample_rate) > 1e-9 * c.sample_rate)
    throw ConfigError("fde_apply: coefficients are for " + std::to_string(c.sample_rate) +
                      " Hz, signal is sampled at " + std::to_string(s.sample_rate) + " Hz");
  const FdeInterpolator interp(c);
  Signal out = s;
  const std::size_t n = s.size();
  const double df = s.bin_spacing();
  fft::forward(out.x);
  if (out.dual()) fft::forward(out.y);
  for (std::size_t k = 0; k < n; ++k) {
    const Mat2 w = interp(static_cast<double>(fft::bin_index_offset(k, n)) * df);
    if (out.dual()) {
      const cplx x = out.x[k], y = out.y[k];
      out.x[k] = w[0] * x + w[1] * y;
      out.y[k] = w[2] * x + w[3] * y;
    } else {
      out.x[k] *= w[0];
    }
  }
  fft::inverse(out.x);
  if (out.dual()) fft::inverse(out.y);
  return out;
}

namespace {

cvec circular_xcorr(const cvec& d, const cvec& t) {
  // c[l] = sum_j d[j + l] conj(t[j])
  cvec a = d, b = t;
  fft::forward(a);
  fft::forward(b);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= std::conj(b[k]);
  fft::inverse(a);
  return a;
}

void normalize(cvec& v) {
  double p = 0.0;
  for (const auto& c : v) p += std::norm(c);
  p /= static_cast<double>(v.size());
  if (!(p > 0.0)) throw NumericalError("normalize: zero-power symbol stream");
  const double g = 1.0 / std::sqrt(p);
  for (auto& c : v) c *= g;
}

}  // namespace

SymbolFrame downsample_align(const Signal& s, const cvec& tx_x, const cvec& tx_y, double symbol_rate,
                             std::size_t skip) {
  s.validate();
  const double ratio = s.sample_rate / symbol_rate;
  const long sps = std::lround(ratio);
  if (sps < 1 || std::abs(ratio - static_cast<double>(sps)) > 1e-9 * ratio)
    throw ConfigError("downsample_align: signal is not at an integer number of samples per symbol");
  const std::size_t ns = s.size() / static_cast<std::size_t>(sps);
  if (tx_x.size() != ns || (s.dual() && tx_y.size() != ns))
    throw ConfigError("downsample_align: transmitted symbol count does not match the signal length");
  if (skip >= ns) throw ConfigError("downsample_align: nothing left after skipping the header");
  const bool dual = s.dual();

  double best = -1.0;
  std::size_t best_phase = 0, best_lag = 0;
  rvec best_mag;
  cvec dx(ns), dy(dual ? ns : 0);
  for (long p = 0; p < sps; ++p) {
    for (std::size_t j = 0; j < ns; ++j) {
      dx[j] = s.x[j * sps + p];
      if (dual) dy[j] = s.y[j * sps + p];
    }
    const cvec cx = circular_xcorr(dx, tx_x);
    cvec cy;
    if (dual) cy = circular_xcorr(dy, tx_y);
    rvec mag(ns);
    for (std::size_t l = 0; l < ns; ++l) mag[l] = std::abs(cx[l]) + (dual ? std::abs(cy[l]) : 0.0);
    const auto it = std::max_element(mag.begin(), mag.end());
    if (*it > best) {
      best = *it;
      best_phase = static_cast<std::size_t>(p);
      best_lag = static_cast<std::size_t>(it - mag.begin());
      best_mag = mag;
    }
  }
  double second = 0.0;
  for (std::size_t l = 0; l < ns; ++l)
    if (l != best_lag) second = std::max(second, best_mag[l]);
  if (!(best > 0.0) || second > 0.5 * best)
    throw NumericalError("downsample_align: ambiguous correlation peak (second/first = " +
                         std::to_string(best > 0.0 ? second / best : 1.0) + ")");

  SymbolFrame f;
  f.symbol_rate = symbol_rate;
  f.lag = best_lag;
  f.phase = best_phase;
  const std::size_t m = ns - skip;
  f.tx_x.resize(m);
  f.rx_x.resize(m);
  if (dual) {
    f.tx_y.resize(m);
    f.rx_y.resize(m);
  }
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t src = ((j + skip + best_lag) % ns) * sps + best_phase;
    f.tx_x[j] = tx_x[j + skip];
    f.rx_x[j] = s.x[src];
    if (dual) {
      f.tx_y[j] = tx_y[j + skip];
      f.rx_y[j] = s.y[src];
    }
  }
  normalize(f.tx_x);
  normalize(f.rx_x);
  if (dual) {
    normalize(f.tx_y);
    normalize(f.rx_y);
  }
  return f;
}

void restore_phase(SymbolFrame& f) {
  auto fix = [](const cvec& tx, cvec& rx) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < tx.size(); ++j) acc += std::conj(tx[j]) * rx[j];
    if (std::abs(acc) == 0.0) return;
    const cplx rot = std::polar(1.0, -std::arg(acc));
    for (auto& v : rx) v *= rot;
  };
  fix(f.tx_x, f.rx_x);
  if (f.dual()) fix(f.tx_y, f.rx_y);
}

Signal receive_front(const Signal& wdm, const ChannelPlan& plan, const LinkConfig& link, int spans,
                     const StepControl& step, const ReceiverConfig& rx) {
  const ChannelSpec& cut = plan.cut();
  const double rate = 2.0 * plan.symbol_rate;
  const double width = std::min(rx.extract_bandwidth > 0.0 ? rx.extract_bandwidth : plan.spacing, rate);
  const double center = plan.cut_frequency + cut.center_offset - wdm.center_frequency;
  Signal e = extract_channel(wdm, center, width, rate);
  if (rx.backpropagation && spans > 0) e = backpropagate(e, link, spans, step);
  return matched_filter(e, plan.symbol_rate, plan.roll_off);
}

}  // namespace nlin
