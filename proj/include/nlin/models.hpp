// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "nlin/kernels.hpp"
#include "nlin/link.hpp"
#include "nlin/waveform.hpp"

namespace nlin {

class UnsupportedConfiguration : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct ModulationMoments {
  double second = 1.0;  // E|b|^2
  double fourth = 0.0;  // E|b|^4
  double sixth = 0.0;   // E|b|^6
  double phi_b = 0.0;   // fourth / second^2 - 2
  double psi_b = 0.0;   // sixth / second^3 - 9 fourth / second^2 + 12
};
ModulationMoments modulation_moments(Modulation m);

// Per-span FWM efficiency (lumped amplification):
// gamma (1 - e^{-2 alpha L} e^{i 4 pi^2 beta2 (f1-f)(f2-f) L}) / (2 alpha - i 4 pi^2 beta2 (f1-f)(f2-f)).
cplx fwm_efficiency(double f1, double f2, double f, const FiberParams& fiber, double span_length);
// sin(Ns x) / sin(x) e^{i x (Ns - 1)}, x = 2 pi^2 beta2 (f1-f)(f2-f) L.
cplx coherence_factor(double f1, double f2, double f, double beta2, double span_length, int span_count);
simd::MuParams mu_params(const LinkConfig& link, int span_count);

struct ModelOptions {
  double resolution = 0.0;  // quadrature spacing [Hz]; 0 selects symbol_rate / 64
  const simd::KernelTable* kernels = nullptr;  // null: runtime dispatch
  bool include_sci = true;  // evaluate self-channel terms of the EGN corrections
  // When positive, gn_xmci / egn_xmci repeat the evaluation at half the
  // spacing and throw NumericalError if the relative change exceeds it.
  double self_check_tolerance = 0.0;
};

// NLI PSD on a frequency grid (offsets from the CUT center) with its
// decomposition. For the GN model only `total` is filled; EGN fills every
// field, with sci/xci/mci holding the correction terms by channel family.
struct NliPsd {
  rvec frequency;
  rvec total;
  rvec gn;
  rvec sci, xci, mci;  // EGN corrections
  rvec correction;     // sci + xci + mci
};

// Frequencies (multiples of the quadrature spacing) covering [lo, hi].
rvec band_grid(double lo, double hi, double spacing);

NliPsd gn_nli_psd(const ChannelPlan& plan, const LinkConfig& link, const rvec& f_grid, int span_count,
                  const ModelOptions& opt = {});

// Trapezoidal integral of full - cut_only over [lo, hi].
double xmci_power(const NliPsd& full, const NliPsd& cut_only, double lo, double hi);
double band_power(const NliPsd& psd, const rvec& values, double lo, double hi);

// EGN correction terms. Each term is
//   c * m * S_R^2 P_o P_2 P_3 int |G_o(f1)|^2 |int G_2(f2) G_3*(f1+f2-f) mu df2|^2 df1   (nested)
//   c * m * S_R^3 P_o P_2 P_3 int int |G_o(f1)|^2 |G_2(f2)|^2 |G_3(f1+f2-f)|^2 |mu|^2     (double)
// with rectangular unit-normalized spectra (int |G|^2 df = 1/S_R), m the
// phi_b or psi_b moment of the channel in role `moment_of`, and roles
// assigned to concrete channels of the plan.
struct EgnTerm {
  std::string name;
  std::string family;      // SCI, XCI or MCI
  double coefficient = 0.0;
  std::string moment;      // phi or psi
  std::string moment_of;   // role whose moment enters
  std::string form;        // nested or double
  std::string outer, inner_f2, inner_f3;  // roles: cut, int, int_a, int_b
  bool enabled = true;
  std::string note;
};
struct EgnConstants {
  std::vector<EgnTerm> terms;
};
EgnConstants default_egn_constants();
EgnConstants load_egn_constants(const std::filesystem::path& path);
std::string egn_constants_json(const EgnConstants& c);

// XCI corrections between the CUT and one interferer (all XCI terms of the
// table evaluated for that pair).
rvec egn_correction_xci(const ChannelPlan& plan, const LinkConfig& link, const ChannelSpec& cut,
                        const ChannelSpec& interferer, const rvec& f_grid, int span_count,
                        const EgnConstants& constants, const ModelOptions& opt = {});

NliPsd egn_nli_psd(const ChannelPlan& plan, const LinkConfig& link, const rvec& f_grid, int span_count,
                   const EgnConstants& constants, const ModelOptions& opt = {});

double replaced_int_adaptation(double single_span_xmci, int span_count);

// CUT-band XMCI of a plan: model(full plan) - model(CUT only), integrated over
// +-S_R/2 around the CUT.
double gn_xmci(const ChannelPlan& plan, const LinkConfig& link, int span_count, const ModelOptions& opt = {});
double egn_xmci(const ChannelPlan& plan, const LinkConfig& link, int span_count, const EgnConstants& constants,
                const ModelOptions& opt = {});

}  // namespace nlin
