// SPDX-License-Identifier: Apache-2.0
#include "nlin/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace nlin {

namespace {

constexpr double kGnPrefactor = 16.0 / 27.0;

double spacing_of(const ChannelPlan& plan, const ModelOptions& opt) {
  const double d = opt.resolution > 0.0 ? opt.resolution : plan.symbol_rate / 64.0;
  if (!(d > 0.0) || d > plan.symbol_rate / 4.0)
    throw ConfigError("models: quadrature spacing must be positive and below S_R/4");
  return d;
}

const simd::KernelTable& table_of(const ModelOptions& opt) {
  return opt.kernels ? *opt.kernels : simd::kernels();
}

// [lo, hi] of the union of occupied channel bands, offsets from the CUT.
std::pair<double, double> occupied_range(const ChannelPlan& plan) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  const double half = 0.5 * plan.occupied_bandwidth();
  for (const auto& c : plan.channels) {
    if (first) {
      lo = c.center_offset - half;
      hi = c.center_offset + half;
      first = false;
    } else {
      lo = std::min(lo, c.center_offset - half);
      hi = std::max(hi, c.center_offset + half);
    }
  }
  return {lo, hi};
}

// Offsets u = m * delta, m in [m_lo, m_hi], with f + u covering [lo, hi].
struct OffsetRange {
  long m_lo = 0, m_hi = 0;
  std::size_t count() const { return static_cast<std::size_t>(m_hi - m_lo + 1); }
};

OffsetRange offsets_for(double f, double lo, double hi, double delta) {
  OffsetRange r;
  r.m_lo = static_cast<long>(std::floor((lo - f) / delta)) - 1;
  r.m_hi = static_cast<long>(std::ceil((hi - f) / delta)) + 1;
  return r;
}

// Samples of a spectrum at f + m delta over the hull of [m_lo, m_hi] and
// [2 m_lo, 2 m_hi], so both f2 = f + n delta and f3 = f1 + f2 - f =
// f + (m + n) delta index into it.
struct ShiftedSamples {
  long base = 0;  // lowest sampled m
  rvec v;
  const double* at(long m) const { return v.data() + (m - base); }
  double operator[](long m) const { return v[static_cast<std::size_t>(m - base)]; }
};

template <class F>
ShiftedSamples sample_shifted(const OffsetRange& r, double f, double delta, F&& g) {
  ShiftedSamples s;
  s.base = std::min(r.m_lo, 2 * r.m_lo);
  const long n = std::max(r.m_hi, 2 * r.m_hi) - s.base + 1;
  s.v.resize(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) s.v[static_cast<std::size_t>(i)] = g(f + static_cast<double>(s.base + i) * delta);
  return s;
}

rvec offsets_vector(const OffsetRange& r, double delta) {
  rvec dy(r.count());
  for (long m = r.m_lo; m <= r.m_hi; ++m) dy[static_cast<std::size_t>(m - r.m_lo)] = static_cast<double>(m) * delta;
  return dy;
}

void require_channels(const ChannelPlan& plan) {
  if (plan.channels.empty()) throw ConfigError("models: empty channel plan");
  plan.validate();
}

// Fraction of the cell [f - delta/2, f + delta/2] inside [lo, hi).
double cell_cover(double f, double delta, double lo, double hi) {
  const double a = std::max(f - 0.5 * delta, lo);
  const double b = std::min(f + 0.5 * delta, hi);
  return b > a ? (b - a) / delta : 0.0;
}

}  // namespace

ModulationMoments modulation_moments(Modulation m) {
  ModulationMoments r;
  if (m == Modulation::GAUSSIAN) {
    // circular complex Gaussian: E|b|^{2k} = k!
    r.second = 1.0;
    r.fourth = 2.0;
    r.sixth = 6.0;
  } else {
    const cvec a = alphabet(m);
    double s2 = 0.0, s4 = 0.0, s6 = 0.0;
    for (const auto& b : a) {
      const double p = std::norm(b);
      s2 += p;
      s4 += p * p;
      s6 += p * p * p;
    }
    const double n = static_cast<double>(a.size());
    r.second = s2 / n;
    r.fourth = s4 / n;
    r.sixth = s6 / n;
  }
  const double s2 = r.second * r.second;
  r.phi_b = r.fourth / s2 - 2.0;
  r.psi_b = r.sixth / (s2 * r.second) - 9.0 * r.fourth / s2 + 12.0;
  return r;
}

cplx fwm_efficiency(double f1, double f2, double f, const FiberParams& fiber, double span_length) {
  simd::MuParams p;
  p.alpha = fiber.alpha();
  p.beta2 = fiber.beta2();
  p.gamma = fiber.gamma();
  p.span_length = span_length;
  p.span_count = 1;
  const double x = 2.0 * constants::pi * constants::pi * p.beta2 * (f1 - f) * (f2 - f) * span_length;
  return simd::mu_value(x, p);
}

cplx coherence_factor(double f1, double f2, double f, double beta2, double span_length, int span_count) {
  if (span_count < 1) throw ConfigError("coherence_factor: span_count must be >= 1");
  if (span_count == 1) return 1.0;
  const double x = 2.0 * constants::pi * constants::pi * beta2 * (f1 - f) * (f2 - f) * span_length;
  const double ns = span_count;
  const double s = std::sin(x);
  const double ratio = std::abs(s) < 1e-8 ? ns * std::cos(ns * x) / std::cos(x) : std::sin(ns * x) / s;
  return ratio * std::polar(1.0, x * (ns - 1.0));
}

simd::MuParams mu_params(const LinkConfig& link, int span_count) {
  if (span_count < 1) throw ConfigError("models: span_count must be >= 1");
  simd::MuParams p;
  p.alpha = link.fiber.alpha();
  p.beta2 = link.fiber.beta2();
  p.gamma = link.fiber.gamma();
  p.span_length = link.span_length();
  p.span_count = span_count;
  return p;
}

rvec band_grid(double lo, double hi, double spacing) {
  if (!(spacing > 0.0) || hi < lo) throw ConfigError("band_grid: invalid interval or spacing");
  const long a = static_cast<long>(std::ceil(lo / spacing - 1e-9));
  const long b = static_cast<long>(std::floor(hi / spacing + 1e-9));
  rvec g;
  for (long m = a; m <= b; ++m) g.push_back(static_cast<double>(m) * spacing);
  return g;
}

NliPsd gn_nli_psd(const ChannelPlan& plan, const LinkConfig& link, const rvec& f_grid, int span_count,
                  const ModelOptions& opt) {
  require_channels(plan);
  const double delta = spacing_of(plan, opt);
  simd::MuParams p = mu_params(link, span_count);
  p.cell = delta;
  const simd::KernelTable& k = table_of(opt);
  const auto [lo, hi] = occupied_range(plan);
  const double sr = plan.symbol_rate;

  auto g_wdm = [&](double f) {
    double g = 0.0;
    for (const auto& c : plan.channels) g += c.launch_power / sr * raised_cosine(f - c.center_offset, sr, plan.roll_off);
    return g;
  };

  NliPsd out;
  out.frequency = f_grid;
  out.total.resize(f_grid.size());
  for (std::size_t i = 0; i < f_grid.size(); ++i) {
    const double f = f_grid[i];
    const OffsetRange r = offsets_for(f, lo, hi, delta);
    const ShiftedSamples h = sample_shifted(r, f, delta, g_wdm);
    const rvec dy = offsets_vector(r, delta);
    // The spectra vanish at the band edges, so plain sums are the trapezoidal
    // rule. The integrand is symmetric in (u1, u2): rows keep |n| <= |m| with
    // off-diagonal points counted twice, so the coherence ridges near u1 = 0
    // and u2 = 0 both run along rows, where the kernels average nu exactly.
    double acc = 0.0;
    for (long m = r.m_lo; m <= r.m_hi; ++m) {
      const double g1 = h[m];
      if (g1 == 0.0) continue;
      const double a = static_cast<double>(m) * delta;
      const long am = std::abs(m);
      const long n_lo = std::max(r.m_lo, 1 - am), n_hi = std::min(r.m_hi, am - 1);
      double row = 0.0;
      if (n_hi >= n_lo) {
        const auto off = static_cast<std::size_t>(n_lo - r.m_lo);
        row += 2.0 * k.gn_row(h.at(n_lo), h.at(m + n_lo), dy.data() + off, a, p,
                              static_cast<std::size_t>(n_hi - n_lo + 1));
      }
      for (long n : {-am, am}) {
        if (n >= r.m_lo && n <= r.m_hi) row += k.gn_row(h.at(n), h.at(m + n), dy.data() + (n - r.m_lo), a, p, 1);
        if (am == 0) break;
      }
      acc += g1 * row;
    }
    out.total[i] = kGnPrefactor * acc * delta * delta;
  }
  out.gn = out.total;
  return out;
}

double band_power(const NliPsd& psd, const rvec& values, double lo, double hi) {
  if (values.size() != psd.frequency.size()) throw ConfigError("band_power: value/grid size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < psd.frequency.size(); ++i) {
    const double a = psd.frequency[i], b = psd.frequency[i + 1];
    if (a < lo - 1e-6 || b > hi + 1e-6) continue;
    s += 0.5 * (values[i] + values[i + 1]) * (b - a);
  }
  return s;
}

double xmci_power(const NliPsd& full, const NliPsd& cut_only, double lo, double hi) {
  if (full.frequency != cut_only.frequency) throw ConfigError("xmci_power: frequency grids differ");
  rvec d(full.total.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = full.total[i] - cut_only.total[i];
  return band_power(full, d, lo, hi);
}

namespace {

struct RectChannel {
  double center = 0.0;
  double power = 0.0;
  ModulationMoments moments;
};

// Adaptive Simpson over [a, b], seeded with panels of about `panel` width.
// The tolerance is relative to the seeded estimate of the whole integral.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double panel, double rel_tol) {
  if (!(b > a)) return 0.0;
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
  const double h = (b - a) / n;
  rvec fx(2 * static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i < fx.size(); ++i) fx[i] = f(a + 0.5 * h * static_cast<double>(i));
  double est = 0.0;
  for (int i = 0; i < n; ++i) est += h / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]);
  const double tol = rel_tol * std::abs(est) + 1e-300;
  constexpr int kMaxDepth = 14;
  auto rec = [&](auto&& self, double x0, double x1, double f0, double fm, double f1, double whole, double t,
                 int depth) -> double {
    const double xm = 0.5 * (x0 + x1);
    const double fl = f(0.5 * (x0 + xm)), fr = f(0.5 * (xm + x1));
    const double left = (xm - x0) / 6.0 * (f0 + 4.0 * fl + fm);
    const double right = (x1 - xm) / 6.0 * (fm + 4.0 * fr + f1);
    const double diff = left + right - whole;
    if (depth >= kMaxDepth || std::abs(diff) <= 15.0 * t) return left + right + diff / 15.0;
    return self(self, x0, xm, f0, fl, fm, left, 0.5 * t, depth + 1) +
           self(self, xm, x1, fm, fr, f1, right, 0.5 * t, depth + 1);
  };
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x0 = a + h * i;
    const double whole = h / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]);
    total += rec(rec, x0, x0 + h, fx[2 * i], fx[2 * i + 1], fx[2 * i + 2], whole, tol * h / (b - a), 0);
  }
  return total;
}

constexpr double kOuterTolerance = 1e-4;

// One evaluated term with its roles bound to channels. The outer variable
// u1 = f1 - f runs over the outer channel's band adaptively (the coherent
// ridge near u1 = 0 narrows as 1/N); the inner sum runs on the delta grid
// with the coherence factor averaged over each cell.
double term_value(const EgnTerm& t, const RectChannel& o, const RectChannel& c2, const RectChannel& c3,
                  const RectChannel& mom, double f, double sr, double delta, const simd::MuParams& p,
                  const simd::KernelTable& k) {
  const double m = t.moment == "psi" ? mom.moments.psi_b : mom.moments.phi_b;
  if (m == 0.0) return 0.0;
  const bool twice = t.form == "double";
  // rectangular spectra, cell averaged: cover / S_R (|G|^2: cover / S_R^2)
  const double norm = twice ? sr * sr : sr;
  const double lo3 = c3.center - 0.5 * sr, hi3 = c3.center + 0.5 * sr;
  const OffsetRange r = offsets_for(f, c2.center - 0.5 * sr, c2.center + 0.5 * sr, delta);
  const rvec dy = offsets_vector(r, delta);
  rvec g2(r.count()), g3(r.count());
  for (std::size_t j = 0; j < g2.size(); ++j)
    g2[j] = cell_cover(f + dy[j], delta, c2.center - 0.5 * sr, c2.center + 0.5 * sr) / norm;

  auto row = [&](double u1) {
    for (std::size_t j = 0; j < g3.size(); ++j) g3[j] = cell_cover(f + u1 + dy[j], delta, lo3, hi3) / norm;
    if (twice) return k.gn_row(g2.data(), g3.data(), dy.data(), u1, p, g2.size()) * delta / (sr * sr);
    const cplx inner = k.mu_row(g2.data(), g3.data(), dy.data(), u1, p, g2.size()) * delta;
    return std::norm(inner) / (sr * sr);
  };
  const double acc =
      adaptive_simpson(row, o.center - 0.5 * sr - f, o.center + 0.5 * sr - f, 2.0 * delta, kOuterTolerance);
  const double scale = twice ? sr * sr * sr : sr * sr;
  return t.coefficient * m * o.power * c2.power * c3.power * scale * acc;
}

std::set<std::string> roles_of(const EgnTerm& t) { return {t.outer, t.inner_f2, t.inner_f3, t.moment_of}; }

void check_term(const EgnTerm& t) {
  static const std::set<std::string> known{"cut", "int", "int_a", "int_b"};
  const auto roles = roles_of(t);
  for (const auto& r : roles)
    if (!known.count(r)) throw ConfigError("EGN term " + t.name + ": unknown role '" + r + "'");
  if (roles.count("int") && (roles.count("int_a") || roles.count("int_b")))
    throw ConfigError("EGN term " + t.name + ": mixes 'int' with 'int_a'/'int_b'");
  if (t.moment != "phi" && t.moment != "psi") throw ConfigError("EGN term " + t.name + ": moment must be phi or psi");
  if (t.form != "nested" && t.form != "double") throw ConfigError("EGN term " + t.name + ": form must be nested or double");
  if (t.family != "SCI" && t.family != "XCI" && t.family != "MCI")
    throw ConfigError("EGN term " + t.name + ": family must be SCI, XCI or MCI");
}

RectChannel rect_of(const ChannelSpec& c) { return {c.center_offset, c.launch_power, modulation_moments(c.format)}; }

// Sum of a term over all channel assignments of its roles at frequency f.
double term_sum(const EgnTerm& t, const RectChannel& cut, const std::vector<RectChannel>& ints, double f, double sr,
                double delta, const simd::MuParams& p, const simd::KernelTable& k) {
  const auto roles = roles_of(t);
  double s = 0.0;
  auto eval = [&](const std::map<std::string, const RectChannel*>& bind) {
    auto b = [&](const std::string& role) -> const RectChannel& { return *bind.at(role); };
    s += term_value(t, b(t.outer), b(t.inner_f2), b(t.inner_f3), b(t.moment_of), f, sr, delta, p, k);
  };
  std::map<std::string, const RectChannel*> bind{{"cut", &cut}};
  if (roles.count("int_a") || roles.count("int_b")) {
    for (std::size_t a = 0; a < ints.size(); ++a)
      for (std::size_t b = 0; b < ints.size(); ++b) {
        if (a == b) continue;
        bind["int_a"] = &ints[a];
        bind["int_b"] = &ints[b];
        eval(bind);
      }
  } else if (roles.count("int")) {
    for (const auto& i : ints) {
      bind["int"] = &i;
      eval(bind);
    }
  } else {
    eval(bind);
  }
  return s;
}

void reject_pre_dispersion(const ChannelPlan& plan) {
  for (const auto& c : plan.channels)
    if (c.pre_dispersion != 0.0)
      throw UnsupportedConfiguration("EGN model does not support pre-dispersed channels (channel " +
                                     std::to_string(c.index) + ")");
}

}  // namespace

rvec egn_correction_xci(const ChannelPlan& plan, const LinkConfig& link, const ChannelSpec& cut,
                        const ChannelSpec& interferer, const rvec& f_grid, int span_count,
                        const EgnConstants& constants, const ModelOptions& opt) {
  require_channels(plan);
  if (cut.pre_dispersion != 0.0 || interferer.pre_dispersion != 0.0)
    throw UnsupportedConfiguration("EGN model does not support pre-dispersed channels");
  const double delta = spacing_of(plan, opt);
  simd::MuParams p = mu_params(link, span_count);
  p.cell = delta;
  const simd::KernelTable& k = table_of(opt);
  const RectChannel c = rect_of(cut);
  const std::vector<RectChannel> ints{rect_of(interferer)};
  rvec out(f_grid.size(), 0.0);
  for (const auto& t : constants.terms) {
    check_term(t);
    if (!t.enabled || t.family != "XCI") continue;
    for (std::size_t i = 0; i < f_grid.size(); ++i)
      out[i] += term_sum(t, c, ints, f_grid[i], plan.symbol_rate, delta, p, k);
  }
  return out;
}

NliPsd egn_nli_psd(const ChannelPlan& plan, const LinkConfig& link, const rvec& f_grid, int span_count,
                   const EgnConstants& constants, const ModelOptions& opt) {
  require_channels(plan);
  reject_pre_dispersion(plan);
  NliPsd out = gn_nli_psd(plan, link, f_grid, span_count, opt);
  const double delta = spacing_of(plan, opt);
  simd::MuParams p = mu_params(link, span_count);
  p.cell = delta;
  const simd::KernelTable& k = table_of(opt);
  const RectChannel cut = rect_of(plan.cut());
  std::vector<RectChannel> ints;
  for (const auto& c : plan.channels)
    if (c.index != 0) ints.push_back(rect_of(c));
  const std::size_t n = f_grid.size();
  out.sci.assign(n, 0.0);
  out.xci.assign(n, 0.0);
  out.mci.assign(n, 0.0);
  for (const auto& t : constants.terms) {
    check_term(t);
    if (!t.enabled) continue;
    if (t.family == "SCI" && !opt.include_sci) continue;
    rvec& dst = t.family == "SCI" ? out.sci : t.family == "XCI" ? out.xci : out.mci;
    for (std::size_t i = 0; i < n; ++i) dst[i] += term_sum(t, cut, ints, f_grid[i], plan.symbol_rate, delta, p, k);
  }
  out.correction.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.correction[i] = out.sci[i] + out.xci[i] + out.mci[i];
    out.total[i] = out.gn[i] + out.correction[i];
  }
  return out;
}

double replaced_int_adaptation(double single_span_xmci, int span_count) {
  if (span_count < 1) throw ConfigError("replaced_int_adaptation: span_count must be >= 1");
  return static_cast<double>(span_count) * single_span_xmci;
}

namespace {

ChannelPlan cut_only(const ChannelPlan& plan) {
  ChannelPlan c = plan;
  c.channels.clear();
  c.channels.push_back(plan.cut());
  return c;
}

template <class Eval>
double xmci_checked(const ChannelPlan& plan, const ModelOptions& opt, Eval&& eval) {
  const double delta = spacing_of(plan, opt);
  const double half = 0.5 * plan.symbol_rate;
  auto once = [&](double d) {
    ModelOptions o = opt;
    o.resolution = d;
    const rvec grid = band_grid(-half, half, d);
    return xmci_power(eval(plan, grid, o), eval(cut_only(plan), grid, o), -half, half);
  };
  const double v = once(delta);
  if (opt.self_check_tolerance > 0.0) {
    const double fine = once(0.5 * delta);
    const double ref = std::max(std::abs(fine), 1e-300);
    if (std::abs(v - fine) / ref > opt.self_check_tolerance)
      throw NumericalError("models: quadrature grid too coarse (refinement changes XMCI by " +
                           std::to_string(100.0 * std::abs(v - fine) / ref) + "%)");
  }
  return v;
}

}  // namespace

double gn_xmci(const ChannelPlan& plan, const LinkConfig& link, int span_count, const ModelOptions& opt) {
  require_channels(plan);
  return xmci_checked(plan, opt, [&](const ChannelPlan& pl, const rvec& g, const ModelOptions& o) {
    return gn_nli_psd(pl, link, g, span_count, o);
  });
}

double egn_xmci(const ChannelPlan& plan, const LinkConfig& link, int span_count, const EgnConstants& constants,
                const ModelOptions& opt) {
  require_channels(plan);
  reject_pre_dispersion(plan);
  return xmci_checked(plan, opt, [&](const ChannelPlan& pl, const rvec& g, const ModelOptions& o) {
    return egn_nli_psd(pl, link, g, span_count, constants, o);
  });
}

}  // namespace nlin
