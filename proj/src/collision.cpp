// SPDX-License-Identifier: Apache-2.0
#include "nlin/collision.hpp"

#include <algorithm>
#include <cmath>

#include "nlin/fft.hpp"
#include "nlin/waveform.hpp"

namespace nlin {

const char* to_string(CollisionType t) {
  switch (t) {
    case CollisionType::TWO_PULSE: return "TWO_PULSE";
    case CollisionType::THREE_PULSE_A: return "THREE_PULSE_A";
    case CollisionType::THREE_PULSE_B: return "THREE_PULSE_B";
    case CollisionType::FOUR_PULSE: return "FOUR_PULSE";
  }
  return "?";
}

CollisionType classify(const CollisionIndex& i) {
  if (i.h == 0) return i.k == i.m ? CollisionType::TWO_PULSE : CollisionType::THREE_PULSE_A;
  return i.k == i.m ? CollisionType::THREE_PULSE_B : CollisionType::FOUR_PULSE;
}

void PulseSpec::validate() const {
  if (!(symbol_rate > 0.0)) throw ConfigError("pulse: symbol rate must be positive");
  if (roll_off < 0.0 || roll_off > 1.0) throw ConfigError("pulse: roll-off must lie in [0, 1]");
  if (static_cast<double>(samples_per_symbol) < 1.0 + roll_off)
    throw ConfigError("pulse: samples_per_symbol must cover the occupied band");
}

double CollisionLink::profile(double z, int span) const {
  return alpha == 0.0 ? 1.0 : std::exp(-2.0 * alpha * (z - span * span_length));
}

int CollisionLink::span_of(double z) const {
  const int s = static_cast<int>(std::floor(z / span_length));
  const int last = static_cast<int>(std::ceil(length / span_length - 1e-9)) - 1;
  return std::clamp(s, 0, std::max(last, 0));
}

void CollisionLink::validate() const {
  if (!(length > 0.0) || !(span_length > 0.0)) throw ConfigError("collision link: lengths must be positive");
  if (alpha < 0.0) throw ConfigError("collision link: attenuation must be non-negative");
  if (z_steps < 0) throw ConfigError("collision link: z_steps must be non-negative");
}

CollisionLink CollisionLink::from_link(const LinkConfig& link) {
  link.validate();
  CollisionLink c;
  c.span_length = link.span_length();
  c.length = link.span_length() * link.span_count;
  c.alpha = link.fiber.alpha();
  c.beta2 = link.fiber.beta2();
  c.gamma = link.fiber.gamma();
  return c;
}

namespace {

struct TauWindow {
  std::size_t n = 0;
  double dt = 0.0;
  double tau0 = 0.0;
};

// Spectrum of the undispersed pulse centered at tau = 0, prepared for an
// inverse DFT onto the window (tau_j = tau0 + j dt).
cvec base_spectrum(const TauWindow& w, const PulseSpec& p) {
  const double df = 1.0 / (static_cast<double>(w.n) * w.dt);
  const double T = p.period();
  cvec s(w.n);
  for (std::size_t k = 0; k < w.n; ++k) {
    const double f = static_cast<double>(fft::bin_index_offset(k, w.n)) * df;
    s[k] = T * root_raised_cosine(f, p.symbol_rate, p.roll_off) * std::polar(1.0, 2.0 * constants::pi * f * w.tau0) *
           (static_cast<double>(w.n) * df);
  }
  return s;
}

// Spectrum -> dispersed, delayed pulse on the window.
cvec evolve(const cvec& base, const TauWindow& w, double beta2, double z, double delay) {
  const double df = 1.0 / (static_cast<double>(w.n) * w.dt);
  cvec s(base);
  const double c = 2.0 * constants::pi * constants::pi * beta2 * z;
  for (std::size_t k = 0; k < w.n; ++k) {
    const double f = static_cast<double>(fft::bin_index_offset(k, w.n)) * df;
    s[k] *= std::polar(1.0, c * f * f - 2.0 * constants::pi * f * delay);
  }
  fft::inverse(s);
  return s;
}

void check_leakage(const cvec& g) {
  const std::size_t n = g.size();
  const std::size_t edge = std::max<std::size_t>(1, n / 10);
  double total = 0.0, outer = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double e = std::norm(g[j]);
    total += e;
    if (j < edge || j >= n - edge) outer += e;
  }
  if (total > 0.0 && outer / total > 1e-3)
    throw NumericalError("dispersed pulse: tau window too short (" + std::to_string(100.0 * outer / total) +
                         "% of the energy near the window edges)");
}

double dispersed_extent(const CollisionLink& link, const PulseSpec& p) {
  return 4.0 * p.period() +
         std::abs(link.beta2) * link.length * 2.0 * constants::pi * (1.0 + p.roll_off) * p.symbol_rate;
}

TauWindow window_for(const std::vector<CollisionIndex>& idx, const CollisionLink& link, const PulseSpec& p) {
  const double T = p.period();
  int reach = 0;
  for (const auto& i : idx) reach = std::max({reach, std::abs(i.h), std::abs(i.k), std::abs(i.m)});
  const double walk = idx.empty() ? 0.0 : std::abs(link.beta2 * idx.front().interferer_offset * link.length);
  const double width = 4.0 * (dispersed_extent(link, p) + walk + 2.0 * reach * T);
  TauWindow w;
  w.dt = T / p.samples_per_symbol;
  w.n = 256;
  while (static_cast<double>(w.n) * w.dt < width) w.n *= 2;
  w.tau0 = -0.5 * static_cast<double>(w.n) * w.dt;
  return w;
}

long wrap(long j, long n) {
  j %= n;
  return j < 0 ? j + n : j;
}

}  // namespace

cvec dispersed_pulse(double z, const rvec& tau, const PulseSpec& pulse, double beta2) {
  pulse.validate();
  if (tau.size() < 16) throw ConfigError("dispersed_pulse: tau grid needs at least 16 points");
  TauWindow w;
  w.n = tau.size();
  w.dt = tau[1] - tau[0];
  w.tau0 = tau[0];
  if (!(w.dt > 0.0)) throw ConfigError("dispersed_pulse: tau grid must be increasing");
  for (std::size_t j = 1; j < tau.size(); ++j)
    if (std::abs(tau[j] - tau[0] - static_cast<double>(j) * w.dt) > 1e-6 * w.dt)
      throw ConfigError("dispersed_pulse: tau grid must be uniform");
  if (w.dt > pulse.period() / (1.0 + pulse.roll_off))
    throw ConfigError("dispersed_pulse: tau grid does not resolve the pulse bandwidth");
  cvec g = evolve(base_spectrum(w, pulse), w, beta2, z, 0.0);
  check_leakage(g);
  return g;
}

rvec collision_z_grid(const CollisionLink& link, const PulseSpec& pulse, double offset) {
  link.validate();
  int steps = link.z_steps;
  if (steps == 0) {
    // walk-off per step at most T/8
    const double walk = std::abs(link.beta2 * offset * link.length);
    steps = std::max(64, static_cast<int>(std::ceil(8.0 * walk / pulse.period())));
  }
  rvec z(static_cast<std::size_t>(steps) + 1);
  for (int j = 0; j <= steps; ++j) z[static_cast<std::size_t>(j)] = link.length * j / steps;
  return z;
}

std::vector<cvec> collision_overlaps(const std::vector<CollisionIndex>& idx, const CollisionLink& link,
                                     const PulseSpec& pulse, const rvec& z_grid) {
  pulse.validate();
  link.validate();
  if (idx.empty()) return {};
  const double omega = idx.front().interferer_offset;
  for (const auto& i : idx)
    if (i.interferer_offset != omega) throw ConfigError("collision_overlaps: indices with different offsets");
  const TauWindow w = window_for(idx, link, pulse);
  const cvec base = base_spectrum(w, pulse);
  const long n = static_cast<long>(w.n);
  const long sps = pulse.samples_per_symbol;
  std::vector<cvec> out(idx.size(), cvec(z_grid.size()));
  for (std::size_t iz = 0; iz < z_grid.size(); ++iz) {
    const double z = z_grid[iz];
    const cvec g = evolve(base, w, link.beta2, z, 0.0);
    const cvec q = evolve(base, w, link.beta2, z, link.beta2 * omega * z);
    if (iz + 1 == z_grid.size()) check_leakage(g);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const long sh = idx[i].h * sps, sk = idx[i].k * sps, sm = idx[i].m * sps;
      cplx acc = 0.0;
      for (long j = 0; j < n; ++j) {
        acc += std::conj(g[static_cast<std::size_t>(j)]) * g[static_cast<std::size_t>(wrap(j - sh, n))] *
               std::conj(q[static_cast<std::size_t>(wrap(j - sk, n))]) * q[static_cast<std::size_t>(wrap(j - sm, n))];
      }
      out[i][iz] = acc * w.dt;
    }
  }
  return out;
}

namespace {

cvec accumulate(const cvec& overlap, const CollisionLink& link, const rvec& z) {
  cvec acc(z.size());
  if (z.empty()) return acc;
  acc[0] = 0.0;
  for (std::size_t j = 1; j < z.size(); ++j) {
    const int span = link.span_of(0.5 * (z[j - 1] + z[j]));
    acc[j] = acc[j - 1] + 0.5 * (z[j] - z[j - 1]) *
                              (link.profile(z[j - 1], span) * overlap[j - 1] + link.profile(z[j], span) * overlap[j]);
  }
  return acc;
}

}  // namespace

cvec accumulation_curve(const CollisionIndex& idx, const CollisionLink& link, const rvec& z_grid,
                        const PulseSpec& pulse) {
  for (std::size_t j = 1; j < z_grid.size(); ++j)
    if (!(z_grid[j] > z_grid[j - 1])) throw ConfigError("accumulation_curve: z grid must be increasing");
  return accumulate(collision_overlaps({idx}, link, pulse, z_grid).front(), link, z_grid);
}

cplx collision_coefficient(const CollisionIndex& idx, const CollisionLink& link, const PulseSpec& pulse,
                           bool check) {
  const rvec z = collision_z_grid(link, pulse, idx.interferer_offset);
  cplx x = accumulation_curve(idx, link, z, pulse).back();
  if (!check) return x;
  CollisionIndex ref = idx;
  ref.h = ref.k = ref.m = 0;
  CollisionLink fine = link;
  int steps = static_cast<int>(z.size()) - 1;
  double change = 0.0;
  // trapezoid halving with Richardson extrapolation of the last pair
  for (int level = 0; level < 5; ++level) {
    steps *= 2;
    fine.z_steps = steps;
    const rvec z2 = collision_z_grid(fine, pulse, idx.interferer_offset);
    const auto ov = collision_overlaps({idx, ref}, link, pulse, z2);
    const cplx x2 = accumulate(ov[0], link, z2).back();
    const double scale = std::max(std::abs(x2), 1e-6 * std::abs(accumulate(ov[1], link, z2).back()));
    change = std::abs(x - x2) / scale;
    const cplx extrapolated = (4.0 * x2 - x) / 3.0;
    if (change <= 1e-4) return extrapolated;
    x = x2;
  }
  throw NumericalError("collision_coefficient: z integration not converged (relative change " +
                       std::to_string(change) + ")");
}

CollisionTable collision_table(const std::vector<CollisionIndex>& idx, const CollisionLink& link,
                               const PulseSpec& pulse) {
  CollisionTable t;
  t.index = idx;
  if (idx.empty()) return t;
  t.offset = idx.front().interferer_offset;
  const rvec z = collision_z_grid(link, pulse, t.offset);
  const auto ov = collision_overlaps(idx, link, pulse, z);
  t.value.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) t.value[i] = accumulate(ov[i], link, z).back();
  return t;
}

std::vector<CollisionIndex> collision_indices(const CollisionLink& link, const PulseSpec& pulse, double offset,
                                              double floor) {
  link.validate();
  pulse.validate();
  if (!(floor > 0.0 && floor < 1.0)) throw ConfigError("collision_indices: floor must lie in (0, 1)");
  const double T = pulse.period();
  const double sigma0 = 0.5 * T;
  const double sigma_f = pulse.symbol_rate / std::sqrt(12.0);
  auto sigma = [&](double z) {
    const double s = link.beta2 * z * 2.0 * constants::pi * sigma_f;
    return std::sqrt(sigma0 * sigma0 + s * s);
  };
  const double smax = sigma(link.length);
  const double radius = std::sqrt(2.0 * std::log(1.0 / floor)) * smax * 2.0;
  const double walk = link.beta2 * offset * link.length;
  const int hmax = static_cast<int>(std::ceil(radius / T));
  const int klo = static_cast<int>(std::floor((-radius - std::max(walk, 0.0)) / T));
  const int khi = static_cast<int>(std::ceil((radius - std::min(walk, 0.0)) / T));
  const int zs = 32;
  std::vector<CollisionIndex> out;
  for (int h = -hmax; h <= hmax; ++h)
    for (int k = klo; k <= khi; ++k)
      for (int m = klo; m <= khi; ++m) {
        double best = 0.0;
        for (int j = 0; j <= zs; ++j) {
          const double z = link.length * j / zs;
          const double c = link.beta2 * offset * z;
          const double t[4] = {0.0, h * T, k * T + c, m * T + c};
          const double mean = 0.25 * (t[0] + t[1] + t[2] + t[3]);
          double d2 = 0.0;
          for (double v : t) d2 += (v - mean) * (v - mean);
          const double s = sigma(z);
          best = std::max(best, std::exp(-d2 / (2.0 * s * s)));
        }
        if (best >= floor) out.push_back({h, k, m, offset});
      }
  return out;
}

Perturbation xci_perturbation(const SymbolWindow& cut, const SymbolWindow& interferer, const CollisionTable& table,
                              double gamma) {
  if (table.index.size() != table.value.size()) throw ConfigError("xci_perturbation: malformed coefficient table");
  Perturbation p;
  if (table.index.empty()) return p;
  int hmax = 0, klo = table.index.front().k, khi = klo;
  for (const auto& i : table.index) {
    hmax = std::max(hmax, std::abs(i.h));
    klo = std::min({klo, i.k, i.m});
    khi = std::max({khi, i.k, i.m});
  }
  cplx boundary = 0.0;
  const cplx pre(0.0, 2.0 * gamma);
  for (std::size_t n = 0; n < table.index.size(); ++n) {
    const auto& i = table.index[n];
    if (!cut.contains(i.h) || !interferer.contains(i.k) || !interferer.contains(i.m))
      throw ConfigError("xci_perturbation: symbol windows do not cover index (" + std::to_string(i.h) + ", " +
                        std::to_string(i.k) + ", " + std::to_string(i.m) + ")");
    const cplx term = pre * cut(i.h) * std::conj(interferer(i.k)) * interferer(i.m) * table.value[n];
    switch (classify(i)) {
      case CollisionType::TWO_PULSE: p.two_pulse += term; break;
      case CollisionType::THREE_PULSE_A: p.three_pulse_a += term; break;
      case CollisionType::THREE_PULSE_B: p.three_pulse_b += term; break;
      case CollisionType::FOUR_PULSE: p.four_pulse += term; break;
    }
    const bool edge = (hmax > 0 && std::abs(i.h) == hmax) || i.k == klo || i.k == khi || i.m == klo || i.m == khi;
    if (edge) boundary += term;
  }
  p.truncated = std::abs(boundary) > 0.01 * std::abs(p.total());
  return p;
}

}  // namespace nlin
