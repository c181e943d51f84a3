// SPDX-License-Identifier: Apache-2.0
#include "nlin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlin/fft.hpp"

namespace nlin {

namespace {

double complex_variance(const cvec& v) {
  cplx mean = 0.0;
  for (const auto& c : v) mean += c;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c - mean);
  return s / static_cast<double>(v.size());
}

double real_variance(const rvec& v) {
  double mean = 0.0;
  for (double d : v) mean += d;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (double d : v) s += (d - mean) * (d - mean);
  return s / static_cast<double>(v.size());
}

double mean_power(const cvec& v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return s / static_cast<double>(v.size());
}

void check_frame(const SymbolFrame& f) {
  if (f.tx_x.empty()) throw ConfigError("metrics: empty symbol frame");
  if (f.rx_x.size() != f.tx_x.size() || f.rx_y.size() != f.tx_y.size())
    throw ConfigError("metrics: tx and rx lengths differ");
  if (!(f.symbol_rate > 0.0)) throw ConfigError("metrics: symbol rate must be positive");
}

// Phase estimate and derotated residual for one polarization at window N.
struct WindowResult {
  rvec dtheta;
  double var_i = 0.0, var_q = 0.0;
};

WindowResult window_estimate(const cvec& r, int window) {
  const std::size_t len = r.size();
  const std::size_t w = static_cast<std::size_t>(window) + 1;
  const std::size_t before = static_cast<std::size_t>(window) / 2;
  // prefix sums over two periods give every circular window in O(1)
  cvec prefix(2 * len + 1);
  prefix[0] = 0.0;
  for (std::size_t i = 0; i < 2 * len; ++i) prefix[i + 1] = prefix[i] + r[i % len];
  WindowResult out;
  out.dtheta.resize(len);
  rvec di(len), dq(len);
  for (std::size_t j = 0; j < len; ++j) {
    const std::size_t start = (j + len - before % len) % len;
    const cplx m = (prefix[start + w] - prefix[start]) / static_cast<double>(w);
    const double th = -std::arg(m);
    out.dtheta[j] = th;
    // d_j = r_j - e^{-i th}, de-rotated by e^{+i th}
    const cplx d = r[j] * std::polar(1.0, th) - 1.0;
    di[j] = d.real();
    dq[j] = d.imag();
  }
  out.var_i = real_variance(di);
  out.var_q = real_variance(dq);
  return out;
}

}  // namespace

double noise_power(const SymbolFrame& f) {
  check_frame(f);
  auto one = [](const cvec& tx, const cvec& rx) {
    cvec d(tx.size());
    for (std::size_t j = 0; j < tx.size(); ++j) d[j] = rx[j] - tx[j];
    return complex_variance(d);
  };
  double v = one(f.tx_x, f.rx_x);
  if (f.dual()) v = 0.5 * (v + one(f.tx_y, f.rx_y));
  return f.symbol_rate * v;
}

cvec rotate_scale(const cvec& tx, const cvec& rx) {
  if (tx.size() != rx.size()) throw ConfigError("rotate_scale: length mismatch");
  cvec r(tx.size());
  for (std::size_t j = 0; j < tx.size(); ++j) {
    const double a = std::norm(tx[j]);
    if (a < 1e-20) throw ConfigError("rotate_scale: transmitted symbol " + std::to_string(j) + " has zero amplitude");
    r[j] = std::conj(tx[j]) * rx[j] / a;
  }
  return r;
}

MonitorValue monitor_signal(const cvec& tx, const cvec& rx, int window) {
  if (window < 2 || static_cast<std::size_t>(window) >= tx.size())
    throw ConfigError("monitor_signal: window " + std::to_string(window) + " out of range");
  const WindowResult w = window_estimate(rotate_scale(tx, rx), window);
  MonitorValue m;
  const double scale = std::max(w.var_i, w.var_q);
  if (scale < 1e-30) {
    m.zero_noise = true;
    return m;
  }
  m.m = w.var_i > 0.0 ? w.var_q / w.var_i - 1.0 : std::numeric_limits<double>::infinity();
  return m;
}

Separation separate_phase_circular(const SymbolFrame& f, double epsilon, int n_max) {
  check_frame(f);
  const std::size_t len = f.size();
  if (n_max <= 0) n_max = static_cast<int>(len / 8);
  if (n_max < 2 || static_cast<std::size_t>(n_max) * 4 > len)
    throw ConfigError("separate_phase_circular: frame of " + std::to_string(len) + " symbols too short for n_max " +
                      std::to_string(n_max));
  const bool dual = f.dual();
  const cvec rx_r = rotate_scale(f.tx_x, f.rx_x);
  const cvec ry_r = dual ? rotate_scale(f.tx_y, f.rx_y) : cvec{};

  Separation s;
  double best = std::numeric_limits<double>::infinity();
  int best_n = n_max;
  bool stopped = false;
  for (int n = 2; n <= n_max; ++n) {
    const WindowResult wx = window_estimate(rx_r, n);
    const double mx = wx.var_i > 0.0 ? wx.var_q / wx.var_i - 1.0 : 0.0;
    double my = 0.0;
    if (dual) {
      const WindowResult wy = window_estimate(ry_r, n);
      my = wy.var_i > 0.0 ? wy.var_q / wy.var_i - 1.0 : 0.0;
      s.m_y.push_back(my);
    }
    s.m_x.push_back(mx);
    const double score = std::abs(mx + my);
    if (score < best) {
      best = score;
      best_n = n;
    }
    if (mx >= -epsilon && (!dual || my >= -epsilon)) {
      stopped = true;
      break;
    }
  }
  s.exhausted = !stopped;
  s.n_opt = stopped ? best_n : n_max;

  auto finish = [&](const cvec& tx, const cvec& rx, const cvec& r, rvec& th, cvec& circ) {
    th = window_estimate(r, s.n_opt).dtheta;
    circ.resize(tx.size());
    for (std::size_t j = 0; j < tx.size(); ++j) circ[j] = rx[j] - tx[j] * std::polar(1.0, -th[j]);
  };
  finish(f.tx_x, f.rx_x, rx_r, s.trace.x, s.circular_x);
  if (dual) finish(f.tx_y, f.rx_y, ry_r, s.trace.y, s.circular_y);
  double peak = 0.0;
  for (double v : s.trace.x) peak = std::max(peak, std::abs(v));
  for (double v : s.trace.y) peak = std::max(peak, std::abs(v));
  s.trace.large_angle = peak > 0.3;
  return s;
}

double phase_noise_power(const PhaseTrace& t, const SymbolFrame& f) {
  check_frame(f);
  double v = real_variance(t.x) * mean_power(f.tx_x);
  if (f.dual() && !t.y.empty()) v = 0.5 * (v + real_variance(t.y) * mean_power(f.tx_y));
  return f.symbol_rate * v;
}

double circular_noise_power(const Separation& s, const SymbolFrame& f) {
  check_frame(f);
  double v = complex_variance(s.circular_x);
  if (f.dual() && !s.circular_y.empty()) v = 0.5 * (v + complex_variance(s.circular_y));
  return f.symbol_rate * v;
}

rvec phase_acf(const rvec& dt, int max_lag) {
  const std::size_t len = dt.size();
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) * 4 >= len)
    throw ConfigError("phase_acf: max_lag must be below a quarter of the trace length");
  cvec a(len);
  for (std::size_t j = 0; j < len; ++j) a[j] = dt[j];
  fft::forward(a);
  for (auto& v : a) v = std::norm(v);
  fft::inverse(a);
  rvec out(static_cast<std::size_t>(max_lag) + 1);
  const double z = a[0].real();
  for (int l = 0; l <= max_lag; ++l) out[l] = z > 0.0 ? a[l].real() / z : 1.0;
  out[0] = 1.0;
  return out;
}

NoiseReport measure(const SymbolFrame& f, const MeasureOptions& opt) {
  const Separation sep = separate_phase_circular(f, opt.epsilon, opt.n_max);
  const double scale = opt.signal_power > 0.0 ? opt.signal_power / f.symbol_rate : 1.0;
  NoiseReport r;
  r.p_nli = noise_power(f) * scale;
  r.p_phase = phase_noise_power(sep.trace, f) * scale;
  r.p_circular = circular_noise_power(sep, f) * scale;
  r.cnr_percent = r.p_nli > 0.0 ? std::clamp(100.0 * r.p_circular / r.p_nli, 0.0, 100.0) : 0.0;
  r.n_opt = sep.n_opt;
  r.search_exhausted = sep.exhausted;
  r.large_angle = sep.trace.large_angle;
  const int lag = std::min<int>(opt.acf_max_lag, static_cast<int>((f.size() - 1) / 4));
  r.acf = phase_acf(sep.trace.x, lag);
  return r;
}

NoiseReport average_reports(const std::vector<NoiseReport>& reports) {
  if (reports.empty()) throw ConfigError("average_reports: no reports");
  const NoiseReport& first = reports.front();
  if (reports.size() == 1) return first;
  NoiseReport out;
  out.scenario = first.scenario;
  out.span = first.span;
  out.distance = first.distance;
  out.realization = -1;
  out.count = 0;
  double n_opt = 0.0;
  for (const auto& r : reports) {
    if (r.scenario != first.scenario || std::abs(r.distance - first.distance) > 1e-6)
      throw ConfigError("average_reports: reports of different scenarios or distances");
    out.p_nli += r.p_nli;
    out.p_phase += r.p_phase;
    out.p_circular += r.p_circular;
    n_opt += r.n_opt;
    out.search_exhausted = out.search_exhausted || r.search_exhausted;
    out.large_angle = out.large_angle || r.large_angle;
    out.count += r.count;
    if (out.acf.empty()) out.acf.assign(r.acf.size(), 0.0);
    for (std::size_t i = 0; i < std::min(out.acf.size(), r.acf.size()); ++i) out.acf[i] += r.acf[i];
  }
  const double n = static_cast<double>(reports.size());
  out.p_nli /= n;
  out.p_phase /= n;
  out.p_circular /= n;
  for (auto& v : out.acf) v /= n;
  out.n_opt = static_cast<int>(std::lround(n_opt / n));
  out.cnr_percent = out.p_nli > 0.0 ? std::clamp(100.0 * out.p_circular / out.p_nli, 0.0, 100.0) : 0.0;
  double dev = 0.0;
  for (const auto& r : reports) dev += std::abs(r.p_nli - out.p_nli);
  out.p_nli_spread = out.p_nli > 0.0 ? dev / n / out.p_nli : 0.0;
  return out;
}

}  // namespace nlin
