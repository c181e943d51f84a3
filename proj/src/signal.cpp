// SPDX-License-Identifier: Apache-2.0
#include "nlin/signal.hpp"

#include <cmath>

#include "nlin/fft.hpp"
#include "nlin/kernels.hpp"

namespace nlin {

double Signal::power() const {
  if (x.empty()) return 0.0;
  const auto& k = simd::kernels();
  double e = k.energy(x.data(), x.size());
  if (dual()) e += k.energy(y.data(), y.size());
  return e / static_cast<double>(x.size());
}

void Signal::validate() const {
  if (x.empty()) throw ConfigError("signal: empty sample block");
  if (!y.empty() && y.size() != x.size()) throw ConfigError("signal: polarization lengths differ");
  if (!(sample_rate > 0.0)) throw ConfigError("signal: sample rate must be positive");
}

double Spectrum::offset(std::size_t k) const {
  return static_cast<double>(fft::bin_index_offset(k, x.size())) * bin_spacing;
}

double Spectrum::power() const {
  const auto& k = simd::kernels();
  double e = k.energy(x.data(), x.size());
  if (!y.empty()) e += k.energy(y.data(), y.size());
  return e * bin_spacing;
}

Spectrum forward_transform(const Signal& s) {
  s.validate();
  Spectrum out;
  const std::size_t n = s.size();
  out.bin_spacing = s.bin_spacing();
  out.center_frequency = s.center_frequency;
  const double scale = 1.0 / (static_cast<double>(n) * std::sqrt(out.bin_spacing));
  out.x.resize(n);
  fft::forward(s.x.data(), out.x.data(), n);
  for (auto& v : out.x) v *= scale;
  if (s.dual()) {
    out.y.resize(n);
    fft::forward(s.y.data(), out.y.data(), n);
    for (auto& v : out.y) v *= scale;
  }
  return out;
}

Signal inverse_transform(const Spectrum& sp) {
  if (sp.x.empty()) throw ConfigError("spectrum: empty");
  Signal out;
  const std::size_t n = sp.size();
  out.sample_rate = sp.bin_spacing * static_cast<double>(n);
  out.center_frequency = sp.center_frequency;
  const double scale = static_cast<double>(n) * std::sqrt(sp.bin_spacing);
  out.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.x[i] = sp.x[i] * scale;
  fft::inverse(out.x);
  if (!sp.y.empty()) {
    out.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.y[i] = sp.y[i] * scale;
    fft::inverse(out.y);
  }
  return out;
}

void apply_transfer_inplace(cvec& spec_x, cvec* spec_y, double bin_spacing, const TransferFunction& h) {
  const std::size_t n = spec_x.size();
  for (std::size_t k = 0; k < n; ++k) {
    cplx g = h(static_cast<double>(fft::bin_index_offset(k, n)) * bin_spacing);
    spec_x[k] *= g;
    if (spec_y) (*spec_y)[k] *= g;
  }
}

Signal apply_transfer(const Signal& s, const TransferFunction& h) {
  s.validate();
  Signal out = s;
  const std::size_t n = s.size();
  fft::forward(out.x);
  if (out.dual()) fft::forward(out.y);
  apply_transfer_inplace(out.x, out.dual() ? &out.y : nullptr, s.bin_spacing(), h);
  fft::inverse(out.x);
  if (out.dual()) fft::inverse(out.y);
  (void)n;
  return out;
}

double Psd::integral() const {
  double s = 0.0;
  for (double v : value) s += v;
  return s * resolution;
}

double Psd::integral(double f_lo, double f_hi) const {
  double s = 0.0;
  for (std::size_t k = 0; k < value.size(); ++k)
    if (frequency[k] >= f_lo && frequency[k] <= f_hi) s += value[k];
  return s * resolution;
}

Psd psd_estimate(const Signal& s, double resolution) {
  s.validate();
  if (!(resolution > 0.0) || resolution > s.sample_rate / 2.0)
    throw ConfigError("psd_estimate: resolution must be in (0, sample_rate/2]");
  const std::size_t n = s.size();
  const double target_hop = s.sample_rate / resolution / 4.0;
  if (target_hop * 4.0 > static_cast<double>(n))
    throw ConfigError("psd_estimate: resolution too fine for signal length");
  // hop must divide n so every sample is covered by exactly four windows.
  std::size_t hop = 0;
  double best = 1e300;
  for (std::size_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    for (std::size_t c : {d, n / d}) {
      if (c * 4 > n) continue;
      double err = std::abs(std::log(static_cast<double>(c) / target_hop));
      if (err < best) {
        best = err;
        hop = c;
      }
    }
  }
  if (hop == 0) throw ConfigError("psd_estimate: signal too short");
  const std::size_t len = 4 * hop;
  const std::size_t segments = n / hop;

  rvec w(len);
  double w2 = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    double v = std::sin(constants::pi * static_cast<double>(i) / static_cast<double>(len));
    w[i] = v * v;
    w2 += w[i] * w[i];
  }

  rvec acc(len, 0.0);
  cvec buf(len);
  auto accumulate = [&](const cvec& v) {
    for (std::size_t sgm = 0; sgm < segments; ++sgm) {
      const std::size_t start = sgm * hop;
      for (std::size_t i = 0; i < len; ++i) buf[i] = v[(start + i) % n] * w[i];
      fft::forward(buf);
      for (std::size_t k = 0; k < len; ++k) acc[k] += std::norm(buf[k]);
    }
  };
  accumulate(s.x);
  if (s.dual()) accumulate(s.y);

  Psd out;
  out.resolution = s.sample_rate / static_cast<double>(len);
  out.frequency.resize(len);
  out.value.resize(len);
  const double norm = 1.0 / (static_cast<double>(segments) * s.sample_rate * w2);
  const std::size_t half = len / 2;
  for (std::size_t i = 0; i < len; ++i) {
    std::size_t k = (i + len - half) % len;  // ascending offsets
    out.frequency[i] = static_cast<double>(fft::bin_index_offset(k, len)) * out.resolution;
    out.value[i] = acc[k] * norm;
  }
  return out;
}

Signal scaled(const Signal& s, double g) {
  Signal out = s;
  for (auto& v : out.x) v *= g;
  for (auto& v : out.y) v *= g;
  return out;
}

Signal add(const Signal& a, const Signal& b) {
  if (a.size() != b.size() || a.dual() != b.dual() || a.sample_rate != b.sample_rate)
    throw ConfigError("signal add: incompatible operands");
  Signal out = a;
  for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += b.x[i];
  for (std::size_t i = 0; i < out.y.size(); ++i) out.y[i] += b.y[i];
  return out;
}

}  // namespace nlin
