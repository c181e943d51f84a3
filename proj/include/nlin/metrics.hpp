// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "nlin/dsp.hpp"

namespace nlin {

struct NoiseReport {
  std::string scenario;
  int realization = -1;  // -1 after averaging
  int span = 0;
  double distance = 0.0;     // [m]
  double p_nli = 0.0;        // [W]
  double p_phase = 0.0;      // [W]
  double p_circular = 0.0;   // [W]
  double cnr_percent = 0.0;
  int n_opt = 0;
  bool search_exhausted = false;
  bool large_angle = false;  // max |delta theta| above 0.3 rad
  double p_nli_spread = 0.0; // mean absolute deviation / mean over the averaged reports
  int count = 1;
  rvec acf;                  // phase-noise ACF, lags 0..max_lag (X polarization)
};

struct PhaseTrace {
  rvec x, y;  // delta theta per symbol [rad]; y empty for single polarization
  bool large_angle = false;
};

// S_R * var(y - x), averaged over polarizations.
double noise_power(const SymbolFrame& f);

// r_j = conj(x_j) y_j / |x_j|^2.
cvec rotate_scale(const cvec& tx, const cvec& rx);

struct MonitorValue {
  double m = 0.0;
  bool zero_noise = false;
};
// M(N) = sigma_Q^2 / sigma_I^2 - 1 of the residual after removing the phase
// estimated over a centered circular window of N+1 symbols. The residual is
// taken rotated and scaled into the symbol frame and de-rotated by the phase
// estimate, so the in-phase axis is radial along x_j.
MonitorValue monitor_signal(const cvec& tx, const cvec& rx, int window);

struct Separation {
  PhaseTrace trace;
  cvec circular_x, circular_y;  // n_j = y_j - x_j exp(-i delta theta_j)
  int n_opt = 0;
  bool exhausted = false;
  std::vector<double> m_x, m_y;  // M(N) for N = 2 .. last evaluated
};

// Window search: N = 2, 3, ... until M(N) >= -epsilon (both polarizations for
// dual-pol frames) or N = n_max; N_opt minimizes |M_X + M_Y| among the
// evaluated windows. n_max = 0 selects frame length / 8.
Separation separate_phase_circular(const SymbolFrame& f, double epsilon = 0.0, int n_max = 0);

// S_R * var(delta theta) * E|x|^2, averaged over polarizations.
double phase_noise_power(const PhaseTrace& t, const SymbolFrame& f);
// S_R * var(n), averaged over polarizations.
double circular_noise_power(const Separation& s, const SymbolFrame& f);

// Circular ACF sum_j dt_j dt_{j+lag} for lags 0..max_lag normalized to lag 0;
// ACF(-lag) = ACF(lag) by construction.
rvec phase_acf(const rvec& delta_theta, int max_lag);

struct MeasureOptions {
  double epsilon = 0.0;
  int n_max = 0;
  int acf_max_lag = 200;
  // When positive, powers are reported as var * signal_power [W] instead of
  // S_R * var, i.e. relative to the channel power.
  double signal_power = 0.0;
};
NoiseReport measure(const SymbolFrame& f, const MeasureOptions& opt = {});

NoiseReport average_reports(const std::vector<NoiseReport>& reports);

}  // namespace nlin
